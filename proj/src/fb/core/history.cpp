#include "fb/core/history.hpp"

#include "json.hpp"

namespace fb {

std::string history_to_jsonl(const TrainHistory& history)
{
    std::string out;
    for (const EpochRecord& r : history) {
        nlohmann::ordered_json line;
        line["epoch"] = r.epoch;
        line["train_mse"] = r.train_mse;
        if (r.val_mse)
            line["val_mse"] = *r.val_mse;
        out += line.dump();
        out += '\n';
    }
    return out;
}

}  // namespace fb
