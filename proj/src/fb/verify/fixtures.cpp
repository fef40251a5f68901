#include "fb/verify/fixtures.hpp"

namespace fb::verify {

namespace {

Gaussian random_gaussian(Rng& rng) { return Gaussian{rng.uniform(-1.0, 1.0), rng.uniform(0.3, 1.5)}; }

}  // namespace

std::vector<double> random_point(Rng& rng, std::size_t dim, double lo, double hi)
{
    std::vector<double> x(dim);
    for (double& v : x)
        v = rng.uniform(lo, hi);
    return x;
}

Dataset random_dataset(Rng& rng, std::size_t dim, std::size_t n, double lo, double hi)
{
    Dataset data(dim);
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> x = random_point(rng, dim, lo, hi);
        data.push_back(x, rng.normal());
    }
    return data;
}

Affine random_affine(Rng& rng, std::size_t dim)
{
    Affine a{std::vector<double>(dim), rng.normal()};
    for (double& s : a.slopes)
        s = rng.normal();
    return a;
}

TskModel random_standard_tsk(Rng& rng, std::size_t dim, std::size_t rules, Aggregation aggregation)
{
    std::vector<Rule> out;
    for (std::size_t k = 0; k < rules; ++k) {
        const double width = rng.uniform(0.3, 1.5);
        Antecedent a;
        for (std::size_t i = 0; i < dim; ++i)
            a.clauses.push_back(Clause{i, Gaussian{rng.uniform(-1.0, 1.0), width}});
        out.push_back(Rule{std::move(a), Constant{rng.normal()}});
    }
    return TskModel(dim, std::move(out), aggregation);
}

TskModel random_generalized_tsk(Rng& rng, std::size_t dim, std::size_t rules)
{
    std::vector<Rule> out;
    for (std::size_t k = 0; k < rules; ++k) {
        Antecedent a;
        for (std::size_t i = 0; i < dim; ++i)
            if (rng.uniform() < 0.7)
                a.clauses.push_back(Clause{i, random_gaussian(rng)});
        out.push_back(Rule{std::move(a), random_affine(rng, dim)});
    }
    return TskModel(dim, std::move(out));
}

TskModel random_gaussian_tsk(Rng& rng, std::size_t dim, std::size_t rules)
{
    std::vector<Rule> out;
    for (std::size_t k = 0; k < rules; ++k) {
        Antecedent a;
        for (std::size_t i = 0; i < dim; ++i)
            a.clauses.push_back(Clause{i, random_gaussian(rng)});
        out.push_back(Rule{std::move(a), random_affine(rng, dim)});
    }
    return TskModel(dim, std::move(out));
}

moe::MoeModel random_affine_gated_moe(Rng& rng, std::size_t dim, std::size_t experts)
{
    std::vector<Affine> ex;
    std::vector<moe::GateFunction> gates;
    for (std::size_t k = 0; k < experts; ++k) {
        ex.push_back(random_affine(rng, dim));
        Affine g = random_affine(rng, dim);
        gates.emplace_back(moe::AffineGate{std::move(g.slopes), g.intercept});
    }
    return moe::MoeModel(dim, std::move(ex), std::move(gates));
}

cart::FuzzyRegressionTree random_fuzzy_tree(Rng& rng, std::size_t dim, std::size_t leaves)
{
    const Dataset data = random_dataset(rng, dim, 8 * leaves + 16, -1.0, 1.0);
    return cart::fuzzify_tree(cart::fit_tree(data, leaves));
}

}  // namespace fb::verify
