#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fb/cart/cart.hpp"
#include "fb/core/dataset.hpp"
#include "fb/core/history.hpp"
#include "fb/core/io.hpp"
#include "fb/core/tsk.hpp"
#include "fb/moe/moe.hpp"
#include "fb/rbfn/rbfn.hpp"
#include "fb/stacking/stacking.hpp"

// The glue shared by the C API and the command line: one variant over every
// model family, file I/O, conversion, rule listings and training dispatch.
namespace fb::app {

using AnyModel = std::variant<TskModel, rbfn::RbfnModel, moe::MoeModel, cart::RegressionTree,
                              cart::FuzzyRegressionTree, stacking::StackModel>;

// "tsk", "rbfn", "moe", "tree", "fuzzy_tree" or "stack"; the JSON "type" field.
std::string model_kind(const AnyModel& model);
std::size_t input_dim(const AnyModel& model);

Json model_to_json(const AnyModel& model);
AnyModel model_from_json(const Json& j);

// Two-space indented JSON with a trailing newline.
std::string dump_json(const Json& j);
Json parse_json(std::string_view text, std::string_view source);
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

AnyModel load_model(const std::string& path);
void save_model(const std::string& path, const AnyModel& model);

double predict(const AnyModel& model, std::span<const double> x);
std::vector<double> predict(const AnyModel& model, const Dataset& data);

// Targets: "tsk", "rbfn" (standard constraints), "generalized-rbfn", "moe".
// Constraint failures raise ModelError carrying the converter's message.
AnyModel convert(const AnyModel& model, std::string_view target);

// One line per rule (or unit, expert, base), parameters to 4 significant digits.
std::vector<std::string> describe(const AnyModel& model);

struct TrainOutcome {
    AnyModel model;
    Json metrics;
    TrainHistory history;  // empty for methods without epochs
};

// Methods: anfis, moe, cart, fuzzy-cart, stack, nozaki, local-rules. The
// options object holds method-specific settings (see README); unknown keys
// are rejected. `test` may be empty.
TrainOutcome train(std::string_view method, const Dataset& train, const Dataset& test, const Json& options);

}  // namespace fb::app
