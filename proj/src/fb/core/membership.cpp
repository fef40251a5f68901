#include "fb/core/membership.hpp"

#include <cmath>

#include "fb/common/error.hpp"

namespace fb {
namespace {

void require_positive(double value, const char* what)
{
    if (!(value > 0.0) || !std::isfinite(value))
        throw InvalidArgument(std::string("membership function: ") + what + " must be finite and > 0");
}

void require_finite(double value, const char* what)
{
    if (!std::isfinite(value))
        throw InvalidArgument(std::string("membership function: ") + what + " must be finite");
}

// log(1 / (1 + exp(-z)))
double log_logistic(double z)
{
    if (z >= 0.0)
        return -std::log1p(std::exp(-z));
    return z - std::log1p(std::exp(z));
}

}  // namespace

MembershipFunction::MembershipFunction(Gaussian g) : shape_(g)
{
    require_finite(g.center, "center");
    require_positive(g.width, "width");
}

MembershipFunction::MembershipFunction(SigmoidUp s) : shape_(s)
{
    require_finite(s.threshold, "threshold");
    require_positive(s.steepness, "steepness");
}

MembershipFunction::MembershipFunction(SigmoidDown s) : shape_(s)
{
    require_finite(s.threshold, "threshold");
    require_positive(s.steepness, "steepness");
}

double MembershipFunction::grade(double x) const
{
    if (!std::isfinite(x))
        throw DataError("membership function: non-finite input");
    struct Visitor {
        double x;
        double operator()(const Gaussian& g) const
        {
            const double u = x - g.center;
            return std::exp(-(u * u) / (2.0 * g.width * g.width));
        }
        double operator()(const SigmoidUp& s) const { return 1.0 / (1.0 + std::exp(-s.steepness * (x - s.threshold))); }
        double operator()(const SigmoidDown& s) const { return 1.0 / (1.0 + std::exp(s.steepness * (x - s.threshold))); }
    };
    return std::visit(Visitor{x}, shape_);
}

double MembershipFunction::log_grade(double x) const
{
    if (!std::isfinite(x))
        throw DataError("membership function: non-finite input");
    struct Visitor {
        double x;
        double operator()(const Gaussian& g) const
        {
            const double u = x - g.center;
            return -(u * u) / (2.0 * g.width * g.width);
        }
        double operator()(const SigmoidUp& s) const { return log_logistic(s.steepness * (x - s.threshold)); }
        double operator()(const SigmoidDown& s) const { return log_logistic(-s.steepness * (x - s.threshold)); }
    };
    return std::visit(Visitor{x}, shape_);
}

bool operator==(const MembershipFunction& a, const MembershipFunction& b) { return a.shape_ == b.shape_; }

double mf_eval(const MembershipFunction& mf, double x) { return mf.grade(x); }

std::vector<MembershipFunction> uniform_gaussian_partition(FeatureRange range, std::size_t count)
{
    if (count == 0)
        throw InvalidArgument("grid partition: need at least one membership function per input");
    if (!(range.lo < range.hi))
        throw InvalidArgument("grid partition: range requires lo < hi");
    std::vector<MembershipFunction> mfs;
    mfs.reserve(count);
    if (count == 1) {
        mfs.emplace_back(Gaussian{0.5 * (range.lo + range.hi), clamp_width(0.5 * (range.hi - range.lo))});
        return mfs;
    }
    const double spacing = (range.hi - range.lo) / static_cast<double>(count - 1);
    for (std::size_t j = 0; j < count; ++j) {
        const double center = j + 1 == count ? range.hi : range.lo + spacing * static_cast<double>(j);
        mfs.emplace_back(Gaussian{center, clamp_width(0.5 * spacing)});
    }
    return mfs;
}

}  // namespace fb
