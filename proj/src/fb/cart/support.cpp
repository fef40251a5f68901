#include <cmath>
#include <string>

#include "fb/cart/cart.hpp"
#include "fb/common/error.hpp"
#include "fb/common/linalg.hpp"

namespace fb::cart {

std::vector<SupportPartition> fit_support(const Dataset& data, const RegressionTree& tree)
{
    if (data.empty())
        throw DataError("fit_support: empty dataset");
    if (data.dim() != tree.input_dim())
        throw DataError("fit_support: dataset dimension does not match the tree");
    const std::size_t d = data.dim();
    const std::vector<std::size_t> leaves = tree.leaves();
    std::vector<std::vector<std::size_t>> members(tree.nodes().size());
    for (std::size_t n = 0; n < data.size(); ++n)
        members[tree.leaf_for(data.row(n))].push_back(n);

    std::vector<SupportPartition> out;
    for (std::size_t k = 0; k < leaves.size(); ++k) {
        const std::vector<std::size_t>& rows = members[leaves[k]];
        if (rows.size() < d + 2)
            throw ModelError("fit_support: partition " + std::to_string(k) + " holds " + std::to_string(rows.size()) +
                             " examples; an affine fit needs at least " + std::to_string(d + 2));
        const Dataset part = data.subset(rows);
        SupportPartition p;
        p.means.assign(d, 0.0);
        p.widths.assign(d, 0.0);
        const double count = static_cast<double>(rows.size());
        for (std::size_t n = 0; n < part.size(); ++n)
            for (std::size_t i = 0; i < d; ++i)
                p.means[i] += part.row(n)[i] / count;
        for (std::size_t n = 0; n < part.size(); ++n)
            for (std::size_t i = 0; i < d; ++i) {
                const double u = part.row(n)[i] - p.means[i];
                p.widths[i] += u * u;
            }
        for (double& w : p.widths)
            w = clamp_width(std::sqrt(w / (count - 1.0)));

        const AffineSolution fit = fit_affine(part.input_matrix(), part.target_vector(), Eigen::VectorXd(), 0.0);
        if (fit.rank < static_cast<Eigen::Index>(d + 1))
            throw ModelError("fit_support: partition " + std::to_string(k) + " is rank-deficient for an affine fit");
        p.model.slopes.assign(fit.slopes.data(), fit.slopes.data() + fit.slopes.size());
        p.model.intercept = fit.intercept;
        out.push_back(std::move(p));
    }
    return out;
}

double support_predict(std::span<const SupportPartition> partitions, std::span<const double> x)
{
    if (partitions.empty())
        throw InvalidArgument("support_predict: no partitions");
    std::vector<double> weights;
    weights.reserve(partitions.size());
    for (const SupportPartition& p : partitions) {
        if (p.means.size() != x.size())
            throw DataError("support_predict: input dimension does not match the partitions");
        double exponent = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double u = x[i] - p.means[i];
            exponent += u * u / (p.widths[i] * p.widths[i]);
        }
        weights.push_back(std::exp(-exponent));
    }
    weights = normalize_firings(std::move(weights));
    double y = 0.0;
    for (std::size_t k = 0; k < partitions.size(); ++k)
        y += weights[k] * Consequent(partitions[k].model).evaluate(x);
    return y;
}

}  // namespace fb::cart
