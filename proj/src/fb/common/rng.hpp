#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

namespace fb {

// Portable seeded generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the derived distributions below are
// implemented here rather than taken from <random>, because the standard
// library distributions differ between implementations.
//
//   uniform()  = (next() >> 11) * 2^-53                      in [0, 1)
//   normal()   = Box-Muller on u1 = 1 - uniform(), u2 = uniform(),
//                returning sqrt(-2 ln u1) cos(2 pi u2) and caching the sin term
//   index(n)   = rejection sampling on next() against the largest multiple of n
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    std::size_t index(std::size_t n);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

// splitmix64 finalizer over (seed, stream); gives independent child seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fb
