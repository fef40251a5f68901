#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fb/core/dataset.hpp"
#include "fb/core/history.hpp"
#include "fb/core/io.hpp"
#include "fb/core/tsk.hpp"
#include "fb/moe/moe.hpp"

namespace fb::stacking {

// Ridge-regularized affine regressor trained on one bootstrap resample.
struct BaseModel {
    std::vector<double> slopes;
    double intercept = 0.0;
    std::uint64_t seed = 0;
    double ridge = 0.0;

    double predict(std::span<const double> x) const;
    friend bool operator==(const BaseModel&, const BaseModel&) = default;
};

// y = intercept + sum_k weights[k] * base_k(x)
struct ConstantWeights {
    std::vector<double> weights;
    double intercept = 0.0;
    friend bool operator==(const ConstantWeights&, const ConstantWeights&) = default;
};

// y = sum_k softmax_k(gate_1(x), ..., gate_K(x)) * base_k(x)
struct AdaptiveGates {
    std::vector<moe::AffineGate> gates;
    friend bool operator==(const AdaptiveGates&, const AdaptiveGates&) = default;
};

using Combiner = std::variant<ConstantWeights, AdaptiveGates>;

class StackModel {
public:
    StackModel(std::size_t input_dim, std::vector<BaseModel> bases, Combiner combiner);

    std::size_t input_dim() const { return input_dim_; }
    const std::vector<BaseModel>& bases() const { return bases_; }
    const Combiner& combiner() const { return combiner_; }

    std::vector<double> base_predictions(std::span<const double> x) const;
    double predict(std::span<const double> x) const;

    friend bool operator==(const StackModel&, const StackModel&) = default;

private:
    std::size_t input_dim_;
    std::vector<BaseModel> bases_;
    Combiner combiner_;
};

inline double stack_predict(const StackModel& model, std::span<const double> x) { return model.predict(x); }

// N draws with replacement from [0, N).
std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed);

inline constexpr double kDefaultRidge = 1e-8;

// K ridge affine fits; base k trains on bootstrap_indices(N, derive_seed(seed, k)).
std::vector<BaseModel> fit_bases(const Dataset& data, std::size_t count, std::uint64_t seed,
                                 double ridge = kDefaultRidge);

// Least-squares weights and intercept on the base-prediction columns (ridge on
// the weights keeps duplicate bases solvable).
StackModel fit_constant_stack(std::vector<BaseModel> bases, const Dataset& data, double ridge = kDefaultRidge);

struct AdaptiveConfig {
    std::size_t epochs = 500;
    double learning_rate = 0.5;
    std::uint64_t seed = 0;
};

// Affine softmax gates over frozen bases, trained by full-batch gradient
// descent on the squared error of the blended prediction. Gates start equal.
StackModel fit_adaptive_stack(std::vector<BaseModel> bases, const Dataset& data, const AdaptiveConfig& config,
                              TrainHistory* history = nullptr);

// The adaptive stack viewed as a mixture with frozen affine experts.
moe::MoeModel as_mixture(const StackModel& model);

struct NozakiResult {
    TskModel model;
    // Grid cells whose total weight fell below kFiringEpsilon; their
    // consequent is the global target mean.
    std::vector<std::size_t> empty_cells;
};

// One constant-consequent rule per grid cell:
//   c_k = sum_n f_k(x_n)^exponent y_n / sum_n f_k(x_n)^exponent
NozakiResult nozaki_fit(const Dataset& data, const std::vector<std::vector<MembershipFunction>>& grid,
                        double exponent = 1.0);

// Independent firing-weighted least squares per rule; affine consequents.
TskModel local_rule_fit(const Dataset& data, std::vector<Antecedent> antecedents);

Json to_json(const StackModel& model);
StackModel stack_from_json(const Json& j);

}  // namespace fb::stacking
