#include "fb/rbfn/rbfn.hpp"

#include <cmath>

#include "fb/common/error.hpp"

namespace fb::rbfn {

double RbfUnit::width(std::size_t j) const
{
    if (const double* shared = std::get_if<double>(&widths))
        return *shared;
    return std::get<std::vector<double>>(widths)[j];
}

double unit_response(const RbfUnit& unit, std::span<const double> x)
{
    double exponent = 0.0;
    for (std::size_t j = 0; j < unit.features.size(); ++j) {
        if (unit.features[j] >= x.size())
            throw DataError("rbf unit: feature " + std::to_string(unit.features[j]) + " outside input of size " +
                            std::to_string(x.size()));
        const double u = x[unit.features[j]] - unit.centers[j];
        const double w = unit.width(j);
        exponent += u * u / (w * w);
    }
    return std::exp(-exponent);
}

RbfnModel::RbfnModel(std::size_t input_dim, std::vector<RbfUnit> units, bool normalized)
    : input_dim_(input_dim), units_(std::move(units)), normalized_(normalized)
{
    if (input_dim_ == 0)
        throw InvalidArgument("rbfn: input dimension must be >= 1");
    if (units_.empty())
        throw InvalidArgument("rbfn: needs at least one unit");
    for (std::size_t k = 0; k < units_.size(); ++k) {
        const RbfUnit& u = units_[k];
        const std::string where = "rbfn: unit " + std::to_string(k);
        if (u.centers.size() != u.features.size())
            throw InvalidArgument(where + " has " + std::to_string(u.centers.size()) + " centers for " +
                                  std::to_string(u.features.size()) + " features");
        std::vector<bool> used(input_dim_, false);
        for (std::size_t f : u.features) {
            if (f >= input_dim_)
                throw InvalidArgument(where + " connects feature " + std::to_string(f) + " >= input dimension");
            if (used[f])
                throw InvalidArgument(where + " connects feature " + std::to_string(f) + " twice");
            used[f] = true;
        }
        if (const auto* per = std::get_if<std::vector<double>>(&u.widths); per && per->size() != u.features.size())
            throw InvalidArgument(where + " has " + std::to_string(per->size()) + " widths for " +
                                  std::to_string(u.features.size()) + " features");
        for (std::size_t j = 0; j < u.features.size(); ++j) {
            if (!std::isfinite(u.centers[j]))
                throw InvalidArgument(where + " has a non-finite center");
            if (!(u.width(j) > 0.0) || !std::isfinite(u.width(j)))
                throw InvalidArgument(where + " has a non-positive width");
        }
        if (const double* shared = std::get_if<double>(&u.widths); shared && !(*shared > 0.0))
            throw InvalidArgument(where + " has a non-positive width");
        if (const auto* a = u.output.affine(); a && a->slopes.size() != input_dim_)
            throw InvalidArgument(where + " output has the wrong number of slopes");
    }
}

double RbfnModel::predict(std::span<const double> x) const
{
    if (x.size() != input_dim_)
        throw DataError("rbfn: input has " + std::to_string(x.size()) + " features, model expects " +
                        std::to_string(input_dim_));
    std::vector<double> f;
    f.reserve(units_.size());
    for (const RbfUnit& u : units_)
        f.push_back(unit_response(u, x));
    if (normalized_)
        f = normalize_firings(std::move(f));
    double y = 0.0;
    for (std::size_t k = 0; k < units_.size(); ++k)
        y += f[k] * units_[k].output.evaluate(x);
    return y;
}

}  // namespace fb::rbfn
