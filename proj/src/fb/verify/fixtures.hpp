#pragma once

#include <cstddef>
#include <vector>

#include "fb/cart/cart.hpp"
#include "fb/common/rng.hpp"
#include "fb/core/dataset.hpp"
#include "fb/core/tsk.hpp"
#include "fb/moe/moe.hpp"

// Seeded random models that satisfy the preconditions of each converter. All
// Gaussian centers lie in [-1, 1] and widths in [0.3, 1.5], so inputs drawn
// from [-2, 2] keep every rule firing well above the underflow guard.
namespace fb::verify {

inline constexpr double kInputLo = -2.0;
inline constexpr double kInputHi = 2.0;

std::vector<double> random_point(Rng& rng, std::size_t dim, double lo = kInputLo, double hi = kInputHi);
Dataset random_dataset(Rng& rng, std::size_t dim, std::size_t n, double lo = kInputLo, double hi = kInputHi);
Affine random_affine(Rng& rng, std::size_t dim);

// Full antecedents, one shared width per rule, constant consequents.
TskModel random_standard_tsk(Rng& rng, std::size_t dim, std::size_t rules,
                             Aggregation aggregation = Aggregation::WeightedAverage);
// Random feature subsets (possibly empty), per-feature widths, affine consequents.
TskModel random_generalized_tsk(Rng& rng, std::size_t dim, std::size_t rules);
// Full antecedents, per-feature widths, affine consequents, weighted average.
TskModel random_gaussian_tsk(Rng& rng, std::size_t dim, std::size_t rules);

moe::MoeModel random_affine_gated_moe(Rng& rng, std::size_t dim, std::size_t experts);

// A tree grown on random data to exactly `leaves` leaves, then fuzzified with
// the default gap-scaled steepness.
cart::FuzzyRegressionTree random_fuzzy_tree(Rng& rng, std::size_t dim, std::size_t leaves);

}  // namespace fb::verify
