#include <string>

#include "fb/common/error.hpp"
#include "fb/common/linalg.hpp"
#include "fb/stacking/stacking.hpp"

namespace fb::stacking {

TskModel local_rule_fit(const Dataset& data, std::vector<Antecedent> antecedents)
{
    if (data.empty())
        throw DataError("local rules: empty dataset");
    if (antecedents.empty())
        throw InvalidArgument("local rules: need at least one antecedent");
    const std::size_t d = data.dim();
    const Eigen::MatrixXd x = data.input_matrix();
    const Eigen::VectorXd y = data.target_vector();
    const double min_mass = static_cast<double>(d + 2);

    std::vector<Rule> rules;
    rules.reserve(antecedents.size());
    for (std::size_t k = 0; k < antecedents.size(); ++k) {
        Eigen::VectorXd w(static_cast<Eigen::Index>(data.size()));
        for (std::size_t n = 0; n < data.size(); ++n)
            w(static_cast<Eigen::Index>(n)) = antecedents[k].firing(data.row(n));
        const double mass = w.sum();
        if (mass < min_mass)
            throw ModelError("local rules: rule " + std::to_string(k) + " is degenerate: firing mass " +
                             std::to_string(mass) + " is below d + 2 = " + std::to_string(d + 2));
        const AffineSolution fit = fit_affine(x, y, w, 0.0);
        if (fit.rank < static_cast<Eigen::Index>(d + 1))
            throw ModelError("local rules: rule " + std::to_string(k) +
                             " is degenerate: its weighted design is rank deficient (rank " +
                             std::to_string(fit.rank) + " of " + std::to_string(d + 1) + ")");
        Affine a{std::vector<double>(fit.slopes.data(), fit.slopes.data() + fit.slopes.size()), fit.intercept};
        rules.push_back(Rule{std::move(antecedents[k]), std::move(a)});
    }
    return TskModel(d, std::move(rules));
}

}  // namespace fb::stacking
