#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fb/core/io.hpp"
#include "fb/core/tsk.hpp"

namespace fb::rbfn {

// Gaussian receptive field over a subset of the inputs:
//   exp(-sum_j (x[features[j]] - centers[j])^2 / width_j^2)
// with either one shared width or one width per connected feature.
struct RbfUnit {
    std::vector<std::size_t> features;
    std::vector<double> centers;
    std::variant<double, std::vector<double>> widths;
    Consequent output;

    double width(std::size_t j) const;
    bool shared_width() const { return std::holds_alternative<double>(widths); }

    friend bool operator==(const RbfUnit&, const RbfUnit&) = default;
};

double unit_response(const RbfUnit& unit, std::span<const double> x);

class RbfnModel {
public:
    RbfnModel(std::size_t input_dim, std::vector<RbfUnit> units, bool normalized);

    std::size_t input_dim() const { return input_dim_; }
    const std::vector<RbfUnit>& units() const { return units_; }
    bool normalized() const { return normalized_; }

    // normalized: sum f_k y_k / sum f_k (uniform fallback on underflow);
    // otherwise the plain weighted sum.
    double predict(std::span<const double> x) const;

    friend bool operator==(const RbfnModel&, const RbfnModel&) = default;

private:
    std::size_t input_dim_;
    std::vector<RbfUnit> units_;
    bool normalized_;
};

inline double rbfn_predict(const RbfnModel& model, std::span<const double> x) { return model.predict(x); }

// Standard-RBFN equivalence conditions, one message per violation, each
// naming the condition number and rule index. Empty means convertible.
std::vector<std::string> standard_rbfn_violations(const TskModel& model);

// Exact conversions. The TSK Gaussian uses 2 sigma^2 in its exponent and the
// receptive field uses sigma^2, so widths are scaled by sqrt(2) in transit.
RbfnModel tsk_to_rbfn(const TskModel& model);
RbfnModel generalized_tsk_rbfn(const TskModel& model);
TskModel rbfn_to_tsk(const RbfnModel& model);

Json to_json(const RbfnModel& model);
RbfnModel rbfn_from_json(const Json& j);

}  // namespace fb::rbfn
