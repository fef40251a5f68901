#include <algorithm>
#include <cmath>
#include <limits>

#include "fb/common/error.hpp"
#include "fb/stacking/stacking.hpp"

namespace fb::stacking {

namespace {

constexpr std::size_t kNozakiRuleCap = 100000;

}  // namespace

NozakiResult nozaki_fit(const Dataset& data, const std::vector<std::vector<MembershipFunction>>& grid,
                        double exponent)
{
    if (data.empty())
        throw DataError("nozaki: empty dataset");
    if (!(exponent > 0.0) || !std::isfinite(exponent))
        throw InvalidArgument("nozaki: exponent must be a positive finite number");
    if (grid.size() != data.dim())
        throw InvalidArgument("nozaki: grid needs one membership list per feature");
    for (const auto& mfs : grid)
        if (mfs.empty())
            throw InvalidArgument("nozaki: every feature needs at least one membership function");

    std::vector<Antecedent> cells = grid_antecedents(grid, kNozakiRuleCap);
    const double mean = data.target_mean();
    const double y_min = *std::min_element(data.targets().begin(), data.targets().end());
    const double y_max = *std::max_element(data.targets().begin(), data.targets().end());
    const double log_eps = std::log(kFiringEpsilon);

    std::vector<Rule> rules;
    std::vector<std::size_t> empty_cells;
    std::vector<double> log_w(data.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        // (prod mu)^alpha in log space, shifted by the largest term so that
        // sharp exponents do not underflow the ratio.
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < data.size(); ++n) {
            log_w[n] = exponent * cells[k].log_firing(data.row(n));
            top = std::max(top, log_w[n]);
        }
        double num = 0.0;
        double den = 0.0;
        if (std::isfinite(top)) {
            for (std::size_t n = 0; n < data.size(); ++n) {
                const double w = std::exp(log_w[n] - top);
                num += w * data.target(n);
                den += w;
            }
        }
        double c = mean;
        if (std::isfinite(top) && top + std::log(den) >= log_eps)
            c = std::clamp(num / den, y_min, y_max);
        else
            empty_cells.push_back(k);
        rules.push_back(Rule{std::move(cells[k]), Constant{c}});
    }
    return NozakiResult{TskModel(data.dim(), std::move(rules)), std::move(empty_cells)};
}

}  // namespace fb::stacking
