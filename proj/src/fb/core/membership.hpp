#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace fb {

// Widths produced by any fitting or training step never drop below this.
inline constexpr double kMinWidth = 1e-6;
// Total firing below this is treated as zero; normalization then falls back
// to uniform weights.
inline constexpr double kFiringEpsilon = 1e-300;

inline double clamp_width(double width) { return width < kMinWidth ? kMinWidth : width; }

// exp(-(x - center)^2 / (2 width^2))
struct Gaussian {
    double center = 0.0;
    double width = 1.0;
};

// 1 / (1 + exp(-steepness (x - threshold)))
struct SigmoidUp {
    double steepness = 1.0;
    double threshold = 0.0;
};

// 1 / (1 + exp(steepness (x - threshold)))
struct SigmoidDown {
    double steepness = 1.0;
    double threshold = 0.0;
};

class MembershipFunction {
public:
    using Shape = std::variant<Gaussian, SigmoidUp, SigmoidDown>;

    MembershipFunction(Gaussian g);
    MembershipFunction(SigmoidUp s);
    MembershipFunction(SigmoidDown s);

    const Shape& shape() const { return shape_; }
    const Gaussian* gaussian() const { return std::get_if<Gaussian>(&shape_); }
    bool is_gaussian() const { return gaussian() != nullptr; }

    double grade(double x) const;
    // log(grade(x)), evaluated without forming grade(x) first.
    double log_grade(double x) const;

    friend bool operator==(const MembershipFunction& a, const MembershipFunction& b);

private:
    Shape shape_;
};

double mf_eval(const MembershipFunction& mf, double x);

struct FeatureRange {
    double lo = 0.0;
    double hi = 1.0;
    friend bool operator==(const FeatureRange&, const FeatureRange&) = default;
};

// p Gaussians with centers equally spaced over [lo, hi] and width = spacing / 2.
// p = 1 puts a single Gaussian at the midpoint with width (hi - lo) / 2.
std::vector<MembershipFunction> uniform_gaussian_partition(FeatureRange range, std::size_t count);

inline bool operator==(const Gaussian& a, const Gaussian& b) { return a.center == b.center && a.width == b.width; }
inline bool operator==(const SigmoidUp& a, const SigmoidUp& b)
{
    return a.steepness == b.steepness && a.threshold == b.threshold;
}
inline bool operator==(const SigmoidDown& a, const SigmoidDown& b)
{
    return a.steepness == b.steepness && a.threshold == b.threshold;
}

}  // namespace fb
