#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

#include "fb/common/error.hpp"
#include "fb/common/rng.hpp"
#include "fb/data/data.hpp"
#include "fb/stacking/stacking.hpp"

#include "gen.hpp"
#include "oracles.hpp"

using namespace fb;
using namespace fb::stacking;

namespace {

Dataset linear_data(testgen::Gen& g, const Affine& line, std::size_t n, double noise = 0.0)
{
    Dataset d(line.slopes.size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> x = g.point(line.slopes.size());
        d.push_back(x, oracle::affine(line, x) + noise * g.normal());
    }
    return d;
}

BaseModel base_from(const Affine& a) { return BaseModel{a.slopes, a.intercept, 0, 0.0}; }

double stack_oracle(const StackModel& m, std::span<const double> x)
{
    std::vector<double> b;
    for (const BaseModel& base : m.bases()) {
        double v = base.intercept;
        for (std::size_t i = 0; i < x.size(); ++i)
            v += base.slopes[i] * x[i];
        b.push_back(v);
    }
    if (const auto* c = std::get_if<ConstantWeights>(&m.combiner())) {
        double y = c->intercept;
        for (std::size_t k = 0; k < b.size(); ++k)
            y += c->weights[k] * b[k];
        return y;
    }
    const auto& gates = std::get<AdaptiveGates>(m.combiner()).gates;
    std::vector<double> e;
    double total = 0.0;
    for (const auto& g : gates) {
        double v = g.bias;
        for (std::size_t i = 0; i < x.size(); ++i)
            v += g.weights[i] * x[i];
        e.push_back(std::exp(v));
        total += e.back();
    }
    double y = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k)
        y += e[k] / total * b[k];
    return y;
}

std::vector<double> nozaki_oracle(const Dataset& d, const std::vector<std::vector<MembershipFunction>>& grid,
                                  double alpha)
{
    // Cells enumerated with the first feature varying slowest.
    std::size_t cells = 1;
    for (const auto& f : grid)
        cells *= f.size();
    std::vector<double> out;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        std::vector<std::size_t> pick(grid.size());
        std::size_t rest = cell;
        for (std::size_t i = grid.size(); i-- > 0;) {
            pick[i] = rest % grid[i].size();
            rest /= grid[i].size();
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t n = 0; n < d.size(); ++n) {
            double f = 1.0;
            for (std::size_t i = 0; i < grid.size(); ++i)
                f *= oracle::grade(grid[i][pick[i]], d.row(n)[i]);
            num += std::pow(f, alpha) * d.target(n);
            den += std::pow(f, alpha);
        }
        out.push_back(num / den);
    }
    return out;
}

}  // namespace

TEST_CASE("bootstrap indices")
{
    CHECK(bootstrap_indices(1, 9) == std::vector<std::size_t>{0});
    CHECK(bootstrap_indices(500, 4) == bootstrap_indices(500, 4));
    CHECK(bootstrap_indices(500, 4) != bootstrap_indices(500, 5));
    for (std::size_t i : bootstrap_indices(300, 1))
        CHECK(i < 300);
    const std::vector<std::size_t> big = bootstrap_indices(10000, 2);
    const std::set<std::size_t> unique(big.begin(), big.end());
    // 1 - (1 - 1/N)^N ~= 1 - 1/e = 0.632
    CHECK(std::abs(static_cast<double>(unique.size()) / 10000.0 - 0.632) < 0.02);
}

TEST_CASE("bases recover noise-free linear data")
{
    testgen::Gen g(1);
    const Affine line{{0.8, -1.1, 2.0}, 0.4};
    const Dataset d = linear_data(g, line, 100);
    const std::vector<BaseModel> bases = fit_bases(d, 6, 3, 1e-8);
    REQUIRE(bases.size() == 6);
    for (std::size_t k = 0; k < bases.size(); ++k) {
        CHECK(bases[k].seed == derive_seed(3, k));
        CHECK(bases[k].ridge == 1e-8);
        CHECK(std::abs(bases[k].intercept - line.intercept) < 1e-4);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(std::abs(bases[k].slopes[i] - line.slopes[i]) < 1e-4);
    }
    CHECK_THROWS_AS(fit_bases(d, 0, 3), InvalidArgument);
    CHECK_THROWS_AS(fit_bases(d.subset(std::vector<std::size_t>{0}), 2, 3), DataError);
}

TEST_CASE("different resamples give different bases on noisy data")
{
    testgen::Gen g(2);
    const Dataset d = linear_data(g, Affine{{1.0}, 0.0}, 50, 0.5);
    const std::vector<BaseModel> a = fit_bases(d, 2, 10);
    const std::vector<BaseModel> b = fit_bases(d, 2, 11);
    CHECK(a[0].slopes != a[1].slopes);
    CHECK(a[0].slopes != b[0].slopes);
    CHECK(fit_bases(d, 2, 10) == a);
}

TEST_CASE("constant stack examples")
{
    testgen::Gen g(3);
    const Affine line{{0.5, 1.5}, -0.2};
    const Dataset d = linear_data(g, line, 60);
    const StackModel exact = fit_constant_stack({base_from(line)}, d);
    const auto& c = std::get<ConstantWeights>(exact.combiner());
    CHECK(std::abs(c.weights[0] - 1.0) < 1e-6);
    CHECK(std::abs(c.intercept) < 1e-6);

    const Dataset noisy = linear_data(g, line, 60, 0.3);
    const std::vector<BaseModel> bases = fit_bases(noisy, 1, 5);
    const StackModel once = fit_constant_stack(bases, noisy);
    const StackModel twice = fit_constant_stack({bases[0], bases[0]}, noisy);
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> x = g.point(2);
        CHECK(std::abs(once.predict(x) - twice.predict(x)) < 1e-6);
    }
}

TEST_CASE("property: constant stack dominates every base on training data")
{
    testgen::Gen g(4);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 1 + g.index(3);
        const Dataset data = testgen::noise_dataset(g, d, 40);
        const std::vector<BaseModel> bases = fit_bases(data, 1 + g.index(8), trial);
        const StackModel s = fit_constant_stack(bases, data);
        double best = 1e300;
        for (const BaseModel& b : bases)
            best = std::min(best, model_mse(b, data));
        CHECK(model_mse(s, data) <= best + 1e-9);
    }
}

TEST_CASE("adaptive stack with equal gates is the plain mean")
{
    testgen::Gen g(5);
    const Dataset data = testgen::noise_dataset(g, 2, 40);
    const std::vector<BaseModel> bases = fit_bases(data, 4, 1);
    const StackModel s = fit_adaptive_stack(bases, data, {.epochs = 3, .learning_rate = 0.0});
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> x = g.point(2);
        double mean = 0.0;
        for (const BaseModel& b : bases)
            mean += b.predict(x) / 4.0;
        CHECK(s.predict(x) == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("frozen constant gates give a fixed convex combination")
{
    testgen::Gen g(6);
    const std::vector<BaseModel> bases{base_from(testgen::affine(g, 2)), base_from(testgen::affine(g, 2))};
    const StackModel s(2, bases, AdaptiveGates{{moe::AffineGate{{0.0, 0.0}, 0.7}, moe::AffineGate{{0.0, 0.0}, -0.4}}});
    const double w0 = std::exp(0.7) / (std::exp(0.7) + std::exp(-0.4));
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> x = g.point(2);
        CHECK(s.predict(x) == doctest::Approx(w0 * bases[0].predict(x) + (1 - w0) * bases[1].predict(x)).epsilon(1e-12));
    }
}

TEST_CASE("adaptive stack beats the constant stack on two regimes")
{
    data::DataSpec spec{data::Generator::PiecewiseLinear, 400, 0.0, 7, {{-4.5, 5.5}, {0.0, 1.0}}};
    const Dataset train = data::generate(spec);
    spec.seed = 8;
    const Dataset test = data::generate(spec);
    const auto [left, right] = data::piecewise_regimes(2);
    const std::vector<BaseModel> bases{base_from(left), base_from(right)};
    const StackModel constant = fit_constant_stack(bases, train);
    TrainHistory history;
    const StackModel adaptive = fit_adaptive_stack(bases, train, {}, &history);
    CHECK(history.size() == AdaptiveConfig{}.epochs);
    CHECK(model_mse(adaptive, test) < model_mse(constant, test));
}

TEST_CASE("adaptive gate gradients match central differences")
{
    testgen::Gen g(9);
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset data = testgen::noise_dataset(g, 2, 30);
        std::vector<BaseModel> bases{base_from(testgen::affine(g, 2)), base_from(testgen::affine(g, 2)),
                                     base_from(testgen::affine(g, 2))};
        std::vector<moe::AffineGate> gates;
        for (int k = 0; k < 3; ++k)
            gates.push_back({{g.normal(), g.normal()}, g.normal()});
        const StackModel s(2, bases, AdaptiveGates{gates});
        const moe::MoeModel mix = as_mixture(s);
        const std::vector<double> full = moe::loss_gradient(mix, data, moe::LossKind::Coupled, 0.0);
        const std::size_t skip = moe::expert_parameter_count(mix);
        const std::vector<double> analytic(full.begin() + static_cast<std::ptrdiff_t>(skip), full.end());
        std::vector<double> params;
        for (const auto& gate : gates) {
            params.insert(params.end(), gate.weights.begin(), gate.weights.end());
            params.push_back(gate.bias);
        }
        const std::vector<double> numeric = oracle::central_difference(params, [&](const std::vector<double>& p) {
            std::vector<moe::AffineGate> q;
            for (std::size_t k = 0; k < 3; ++k)
                q.push_back({{p[3 * k], p[3 * k + 1]}, p[3 * k + 2]});
            const StackModel t(2, bases, AdaptiveGates{q});
            double sse = 0.0;
            for (std::size_t n = 0; n < data.size(); ++n) {
                const double e = data.target(n) - stack_oracle(t, data.row(n));
                sse += e * e;
            }
            return sse;
        });
        CHECK(oracle::relative_error(analytic, numeric) < 1e-4);
    }
}

TEST_CASE("stack predict examples and oracle")
{
    testgen::Gen g(10);
    const BaseModel b = base_from(testgen::affine(g, 2));
    const StackModel single(2, {b}, ConstantWeights{{1.0}, 0.0});
    const StackModel gated(2, {b, base_from(testgen::affine(g, 2))},
                           AdaptiveGates{{moe::AffineGate{{0.0, 0.0}, 0.0}, moe::AffineGate{{0.0, 0.0}, 0.0}}});
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> x = g.point(2);
        CHECK(single.predict(x) == b.predict(x));
        CHECK(gated.predict(x) == doctest::Approx(0.5 * (gated.bases()[0].predict(x) + gated.bases()[1].predict(x))).epsilon(1e-14));
    }
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset data = testgen::noise_dataset(g, 3, 30);
        const std::vector<BaseModel> bases = fit_bases(data, 3, trial);
        const StackModel c = fit_constant_stack(bases, data);
        const StackModel a = fit_adaptive_stack(bases, data, {.epochs = 20});
        for (int i = 0; i < 50; ++i) {
            const std::vector<double> x = g.point(3);
            CHECK(c.predict(x) == doctest::Approx(stack_oracle(c, x)).epsilon(1e-12));
            CHECK(a.predict(x) == doctest::Approx(stack_oracle(a, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("stack json round trip")
{
    testgen::Gen g(11);
    const Dataset data = testgen::noise_dataset(g, 2, 30);
    const std::vector<BaseModel> bases = fit_bases(data, 3, 1);
    const StackModel c = fit_constant_stack(bases, data);
    const StackModel a = fit_adaptive_stack(bases, data, {.epochs = 10});
    CHECK(stack_from_json(Json::parse(to_json(c).dump())) == c);
    CHECK(stack_from_json(Json::parse(to_json(a).dump())) == a);
}

TEST_CASE("nozaki: single example and uniform firing")
{
    const std::vector<std::vector<MembershipFunction>> grid{uniform_gaussian_partition({0.0, 1.0}, 3),
                                                             uniform_gaussian_partition({0.0, 1.0}, 2)};
    const Dataset one(2, {0.3, 0.9}, {4.25});
    const NozakiResult r = nozaki_fit(one, grid, 2.0);
    CHECK(r.model.size() == 6);
    for (const Rule& rule : r.model.rules())
        CHECK(rule.consequent.constant()->value == 4.25);

    testgen::Gen g(12);
    Dataset same(2);
    double mean = 0.0;
    for (int i = 0; i < 25; ++i) {
        const double y = g.normal();
        mean += y / 25.0;
        same.push_back(std::vector<double>{0.4, 0.6}, y);
    }
    const NozakiResult uniform = nozaki_fit(same, grid);
    for (const Rule& rule : uniform.model.rules())
        CHECK(std::abs(rule.consequent.constant()->value - mean) < 1e-12);
}

TEST_CASE("nozaki matches the weighted average formula and stays bounded")
{
    testgen::Gen g(13);
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset d = testgen::noise_dataset(g, 2, 40, 0.0, 1.0);
        const std::vector<std::vector<MembershipFunction>> grid{uniform_gaussian_partition({0.0, 1.0}, 3),
                                                                 uniform_gaussian_partition({0.0, 1.0}, 4)};
        const double alpha = g.uniform(0.5, 4.0);
        const NozakiResult r = nozaki_fit(d, grid, alpha);
        const std::vector<double> expect = nozaki_oracle(d, grid, alpha);
        const double lo = *std::min_element(d.targets().begin(), d.targets().end());
        const double hi = *std::max_element(d.targets().begin(), d.targets().end());
        REQUIRE(r.model.size() == expect.size());
        CHECK(r.empty_cells.empty());
        for (std::size_t k = 0; k < expect.size(); ++k) {
            const double c = r.model.rule(k).consequent.constant()->value;
            CHECK(c == doctest::Approx(expect[k]).epsilon(1e-10));
            CHECK(c >= lo);
            CHECK(c <= hi);
        }
    }
}

TEST_CASE("nozaki sharpening picks the nearest example")
{
    std::vector<std::vector<MembershipFunction>> grid{
        {Gaussian{0.0, 0.2}, Gaussian{1.0, 0.2}, Gaussian{2.0, 0.2}}};
    const Dataset d(1, {0.02, 0.97, 2.01, 0.5}, {3.0, -1.0, 7.0, 100.0});
    const NozakiResult r = nozaki_fit(d, grid, 10.0);
    CHECK(std::abs(r.model.rule(0).consequent.constant()->value - 3.0) < 1e-3);
    CHECK(std::abs(r.model.rule(1).consequent.constant()->value + 1.0) < 1e-3);
    CHECK(std::abs(r.model.rule(2).consequent.constant()->value - 7.0) < 1e-3);
}

TEST_CASE("nozaki empty cells fall back to the mean and are flagged")
{
    std::vector<std::vector<MembershipFunction>> grid{{Gaussian{0.0, 0.01}, Gaussian{100.0, 0.01}}};
    const Dataset d(1, {0.0, 0.001}, {1.0, 3.0});
    const NozakiResult r = nozaki_fit(d, grid);
    CHECK(r.empty_cells == std::vector<std::size_t>{1});
    CHECK(r.model.rule(1).consequent.constant()->value == 2.0);
    CHECK_THROWS_AS(nozaki_fit(Dataset(1), grid), DataError);
    CHECK_THROWS_AS(nozaki_fit(d, grid, 0.0), InvalidArgument);
}

TEST_CASE("local rules with unit weights are ordinary least squares")
{
    testgen::Gen g(14);
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset d = testgen::noise_dataset(g, 3, 30);
        const TskModel m = local_rule_fit(d, {Antecedent{}});
        const std::vector<double> ols = oracle::weighted_ols(d);
        const Affine& a = *m.rule(0).consequent.affine();
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(std::abs(a.slopes[i] - ols[i]) < 1e-10);
        CHECK(std::abs(a.intercept - ols[3]) < 1e-10);
    }
}

TEST_CASE("local rules match weighted least squares per rule")
{
    testgen::Gen g(15);
    const Dataset d = testgen::noise_dataset(g, 2, 80);
    const TskModel shape = testgen::gaussian_tsk(g, 2, 3);
    std::vector<Antecedent> ants;
    for (const Rule& r : shape.rules())
        ants.push_back(r.antecedent);
    const TskModel m = local_rule_fit(d, ants);
    for (std::size_t k = 0; k < ants.size(); ++k) {
        std::vector<double> w;
        for (std::size_t n = 0; n < d.size(); ++n)
            w.push_back(oracle::firing(shape.rule(k), d.row(n)));
        const std::vector<double> wls = oracle::weighted_ols(d, w);
        const Affine& a = *m.rule(k).consequent.affine();
        CHECK(a.slopes[0] == doctest::Approx(wls[0]).epsilon(1e-8));
        CHECK(a.slopes[1] == doctest::Approx(wls[1]).epsilon(1e-8));
        CHECK(a.intercept == doctest::Approx(wls[2]).epsilon(1e-8));
    }
}

TEST_CASE("local rules recover a global line in every rule")
{
    testgen::Gen g(16);
    const Affine line{{-0.6, 1.3}, 2.0};
    const Dataset d = linear_data(g, line, 200);
    const TskModel shape = testgen::gaussian_tsk(g, 2, 5);
    std::vector<Antecedent> ants;
    for (const Rule& r : shape.rules())
        ants.push_back(r.antecedent);
    const TskModel fit = local_rule_fit(d, ants);
    for (const Rule& r : fit.rules()) {
        const Affine& a = *r.consequent.affine();
        CHECK(std::abs(a.intercept - line.intercept) < 1e-6);
        CHECK(std::abs(a.slopes[0] - line.slopes[0]) < 1e-6);
        CHECK(std::abs(a.slopes[1] - line.slopes[1]) < 1e-6);
    }
}

TEST_CASE("local rules reject degenerate rules by index")
{
    // Rule 1 only sees three collinear points.
    Dataset d(2);
    for (int i = 0; i < 3; ++i)
        d.push_back(std::vector<double>{10.0 + i, 10.0 + i}, static_cast<double>(i));
    testgen::Gen g(17);
    for (int i = 0; i < 30; ++i)
        d.push_back(g.point(2, -1.0, 1.0), g.normal());
    const std::vector<Antecedent> ants{
        Antecedent{},
        Antecedent{{Clause{0, Gaussian{11.0, 3.0}}, Clause{1, Gaussian{11.0, 3.0}}}}};
    CHECK_THROWS_WITH_AS(local_rule_fit(d, ants), doctest::Contains("rule 1"), ModelError);
}
