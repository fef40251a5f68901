#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fb/core/dataset.hpp"
#include "fb/core/history.hpp"
#include "fb/core/tsk.hpp"

namespace fb::anfis {

inline constexpr std::size_t kDefaultRuleCap = 10000;
inline constexpr double kDefaultRidgeJitter = 1e-8;

struct TrainConfig {
    std::size_t epochs = 100;
    double learning_rate = 0.01;
    double ridge_jitter = kDefaultRidgeJitter;
    std::uint64_t seed = 0;
};

// p Gaussians per input over each range, all p^d conjunctions as rules, affine
// consequents with zero slopes and intercept = target mean of `data` (0 when
// no data is given).
TskModel grid_init(std::size_t dim, std::size_t mfs_per_input, std::span<const FeatureRange> ranges,
                   const Dataset* data = nullptr, std::size_t rule_cap = kDefaultRuleCap);

// One rule per k-means cluster: Gaussian centers at the centroid, widths at
// the within-cluster standard deviation per feature.
TskModel cluster_init(const Dataset& data, std::size_t rules, std::uint64_t seed);

// Least-squares refit of every affine consequent with the antecedents held
// fixed.
TskModel lse_consequents(const TskModel& model, const Dataset& data, double ridge_jitter = kDefaultRidgeJitter);

struct ClauseGradient {
    double center = 0.0;
    double width = 0.0;
};
// Indexed [rule][clause], in the model's clause order.
using AntecedentGradient = std::vector<std::vector<ClauseGradient>>;

// sum_n (y_n - y(x_n))^2
double squared_error(const TskModel& model, const Dataset& data);

// Analytic gradient of squared_error() with respect to every Gaussian center
// and width. Only Gaussian antecedents are supported.
AntecedentGradient antecedent_gradients(const TskModel& model, const Dataset& data);

// Flat (center, width) pairs in rule/clause order, matching flatten().
std::vector<double> antecedent_parameters(const TskModel& model);
TskModel with_antecedent_parameters(const TskModel& model, std::span<const double> params);
std::vector<double> flatten(const AntecedentGradient& gradient);

struct TrainResult {
    TskModel model;
    TrainHistory history;
};

// Per epoch: least-squares consequents, then one full-batch gradient step on
// the antecedents (consequents frozen) using the mean-squared-error gradient.
// The history records the model at the end of each epoch.
TrainResult hybrid_train(const TskModel& initial, const Dataset& train, const TrainConfig& config,
                         const Dataset* validation = nullptr);

}  // namespace fb::anfis
