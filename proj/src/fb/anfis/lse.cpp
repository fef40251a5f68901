#include <string>

#include "fb/anfis/anfis.hpp"
#include "fb/common/error.hpp"
#include "fb/common/linalg.hpp"

namespace fb::anfis {

TskModel lse_consequents(const TskModel& model, const Dataset& data, double ridge_jitter)
{
    if (data.empty())
        throw DataError("lse_consequents: empty dataset");
    if (data.dim() != model.input_dim())
        throw DataError("lse_consequents: dataset has " + std::to_string(data.dim()) + " features, model expects " +
                        std::to_string(model.input_dim()));
    if (ridge_jitter < 0.0)
        throw InvalidArgument("lse_consequents: ridge_jitter must be >= 0");
    for (std::size_t k = 0; k < model.size(); ++k)
        if (!model.rule(k).consequent.is_affine())
            throw ModelError("lse_consequents: rule " + std::to_string(k) +
                             " has a constant consequent; convert it to affine first");

    const std::size_t n_rows = data.size();
    const std::size_t d = model.input_dim();
    const std::size_t block = d + 1;
    const std::size_t rules = model.size();

    // Row n, block k: [w_k(x_n) x_n^T, w_k(x_n)].
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(rules * block));
    for (std::size_t n = 0; n < n_rows; ++n) {
        const auto x = data.row(n);
        const std::vector<double> w =
            model.aggregation() == Aggregation::WeightedAverage ? model.normalized_firings(x) : model.firings(x);
        for (std::size_t k = 0; k < rules; ++k) {
            const auto col0 = static_cast<Eigen::Index>(k * block);
            for (std::size_t i = 0; i < d; ++i)
                design(static_cast<Eigen::Index>(n), col0 + static_cast<Eigen::Index>(i)) = w[k] * x[i];
            design(static_cast<Eigen::Index>(n), col0 + static_cast<Eigen::Index>(d)) = w[k];
        }
    }

    const LeastSquaresSolution sol = solve_least_squares(design, data.target_vector(), ridge_jitter);

    std::vector<Rule> rules_out;
    rules_out.reserve(rules);
    for (std::size_t k = 0; k < rules; ++k) {
        Affine a;
        a.slopes.resize(d);
        for (std::size_t i = 0; i < d; ++i)
            a.slopes[i] = sol.coefficients[static_cast<Eigen::Index>(k * block + i)];
        a.intercept = sol.coefficients[static_cast<Eigen::Index>(k * block + d)];
        rules_out.push_back(Rule{model.rule(k).antecedent, std::move(a)});
    }
    return TskModel(d, std::move(rules_out), model.aggregation());
}

}  // namespace fb::anfis
