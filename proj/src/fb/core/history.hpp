#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace fb {

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_mse = 0.0;
    std::optional<double> val_mse;
};

using TrainHistory = std::vector<EpochRecord>;

// One JSON object per line: {"epoch":..,"train_mse":..[,"val_mse":..]}
std::string history_to_jsonl(const TrainHistory& history);

}  // namespace fb
