#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "fb/anfis/anfis.hpp"
#include "fb/cart/cart.hpp"
#include "fb/common/error.hpp"
#include "fb/data/data.hpp"

#include "gen.hpp"
#include "oracles.hpp"

using namespace fb;
using namespace fb::cart;

namespace {

TreeNode split(std::size_t f, double t, std::ptrdiff_t l, std::ptrdiff_t r)
{
    TreeNode n;
    n.feature = f;
    n.threshold = t;
    n.left = l;
    n.right = r;
    return n;
}

TreeNode leaf(double v)
{
    TreeNode n;
    n.leaf = Constant{v};
    return n;
}

// x0 < 5 -> 10; else x1 < 2 -> 20; else 30.
RegressionTree three_leaf_tree()
{
    return RegressionTree(2, {split(0, 5.0, 1, 2), leaf(10.0), split(1, 2.0, 3, 4), leaf(20.0), leaf(30.0)});
}

double distance_to_thresholds(const RegressionTree& t, std::span<const double> x)
{
    double best = 1e300;
    for (const TreeNode& n : t.nodes())
        if (!n.is_leaf())
            best = std::min(best, std::abs(x[n.feature] - n.threshold));
    return best;
}

double support_oracle(const std::vector<SupportPartition>& parts, std::span<const double> x)
{
    double num = 0.0;
    double den = 0.0;
    for (const SupportPartition& p : parts) {
        double f = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            f *= std::exp(-(x[i] - p.means[i]) * (x[i] - p.means[i]) / (p.widths[i] * p.widths[i]));
        num += f * oracle::affine(p.model, x);
        den += f;
    }
    return num / den;
}

}  // namespace

TEST_CASE("fit_tree examples")
{
    const Dataset flat(2, {0, 0, 1, 0, 0, 1, 1, 1}, {4.0, 4.0, 4.0, 4.0});
    const RegressionTree t = fit_tree(flat, 8);
    CHECK(t.leaf_count() == 1);
    CHECK(t.predict(std::vector<double>{0.3, 0.3}) == 4.0);

    testgen::Gen g(1);
    const Dataset d = testgen::noise_dataset(g, 2, 40);
    const RegressionTree stump = fit_tree(d, 1);
    CHECK(stump.leaf_count() == 1);
    CHECK(stump.predict(std::vector<double>{0.0, 0.0}) == doctest::Approx(d.target_mean()).epsilon(1e-14));

    CHECK_THROWS_AS(fit_tree(Dataset(2), 4), DataError);
    CHECK_THROWS_AS(fit_tree(d, 0), InvalidArgument);
}

TEST_CASE("planted step is recovered within one grid step")
{
    data::DataSpec spec{data::Generator::Step, 101, 0.0, 0, {{0.0, 1.0}}, data::Layout::Grid};
    const Dataset d = data::generate(spec);
    const RegressionTree t = fit_tree(d, 2);
    REQUIRE(t.leaf_count() == 2);
    CHECK(t.node(0).feature == 0);
    CHECK(std::abs(t.node(0).threshold - 0.5) <= 0.01);
}

TEST_CASE("root split is exhaustively optimal")
{
    testgen::Gen g(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset d = testgen::noise_dataset(g, 3, 50);
        const RegressionTree t = fit_tree(d, 2);
        const oracle::Split best = oracle::best_split(d);
        const double chosen = oracle::split_reduction(d, t.node(0).feature, t.node(0).threshold);
        CHECK(chosen >= best.reduction - 1e-12 * std::max(1.0, best.reduction));
    }
}

TEST_CASE("ties go to the lowest feature, then the lowest threshold")
{
    // Both features carry the same information.
    const Dataset d(2, {0, 0, 1, 1, 2, 2, 3, 3}, {0.0, 0.0, 1.0, 1.0});
    const RegressionTree t = fit_tree(d, 2);
    CHECK(t.node(0).feature == 0);
    CHECK(t.node(0).threshold == 1.5);
    // y symmetric around 1.5 with equal gains at 0.5 and 2.5.
    const Dataset s(1, {0, 1, 2, 3}, {0.0, 1.0, 1.0, 0.0});
    CHECK(fit_tree(s, 2).node(0).threshold == 0.5);
}

TEST_CASE("leaves hold region means and min_leaf is honoured")
{
    testgen::Gen g(3);
    const Dataset d = testgen::noise_dataset(g, 2, 60);
    const RegressionTree t = fit_tree(d, 6, 5);
    std::vector<double> sum(t.nodes().size(), 0.0);
    std::vector<std::size_t> count(t.nodes().size(), 0);
    for (std::size_t n = 0; n < d.size(); ++n) {
        const std::size_t l = t.leaf_for(d.row(n));
        sum[l] += d.target(n);
        ++count[l];
    }
    for (std::size_t l : t.leaves()) {
        CHECK(count[l] >= 5);
        CHECK(t.node(l).leaf.constant()->value == doctest::Approx(sum[l] / static_cast<double>(count[l])).epsilon(1e-12));
    }
    CHECK(t.leaf_count() <= 6);
}

TEST_CASE("crisp rules: the three-leaf example")
{
    const RegressionTree t = three_leaf_tree();
    const std::vector<CrispRule> rules = extract_crisp_rules(t);
    REQUIRE(rules.size() == 3);
    CHECK(rules[0].tests.size() == 1);
    CHECK(rules[1].tests.size() == 2);
    CHECK(rules[2].tests.size() == 2);
    CHECK(format_rule(rules[0]) == "IF x0 < 5.00 THEN y = 10.00");
    CHECK(format_rule(rules[2]) == "IF x0 >= 5.00 AND x1 >= 2.00 THEN y = 30.00");

    const RegressionTree single(2, {leaf(7.0)});
    const std::vector<CrispRule> one = extract_crisp_rules(single);
    REQUIRE(one.size() == 1);
    CHECK(one[0].tests.empty());
    CHECK(single.predict(std::vector<double>{-100.0, 100.0}) == 7.0);
}

TEST_CASE("property: crisp rules partition the input space")
{
    testgen::Gen g(4);
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset d = testgen::noise_dataset(g, 3, 80);
        const RegressionTree t = fit_tree(d, 2 + g.index(15));
        const std::vector<CrispRule> rules = extract_crisp_rules(t);
        CHECK(rules.size() == t.leaf_count());
        for (int i = 0; i < 1000; ++i) {
            const std::vector<double> x = g.point(3, -3.0, 3.0);
            int matches = 0;
            double value = 0.0;
            for (const CrispRule& r : rules)
                if (r.matches(x)) {
                    ++matches;
                    value = r.value.evaluate(x);
                }
            CHECK(matches == 1);
            CHECK(value == t.predict(x));
        }
    }
}

TEST_CASE("fuzzify examples")
{
    const RegressionTree single(1, {leaf(2.5)});
    const FuzzyRegressionTree fs = fuzzify_tree(single);
    CHECK(fs.predict(std::vector<double>{-3.0}) == 2.5);
    CHECK(fuzzy_tree_to_tsk(fs).size() == 1);
    CHECK(fuzzy_tree_to_tsk(fs).rule(0).antecedent.clauses.empty());

    const RegressionTree two(1, {split(0, 1.0, 1, 2), leaf(2.0), leaf(6.0)});
    const FuzzyRegressionTree ft = fuzzify_tree(two, SteepnessPolicy::fixed(3.0));
    CHECK(ft.predict(std::vector<double>{1.0}) == 4.0);
    const auto grades = ft.leaf_grades(std::vector<double>{1.0});
    REQUIRE(grades.size() == 2);
    CHECK(grades[0].grade == 0.5);
    CHECK(grades[1].grade == 0.5);
}

TEST_CASE("gap-scaled steepness")
{
    // Thresholds 1 and 3 on x0: gap 2, steepness 8 / 2 = 4.
    const RegressionTree t(1, {split(0, 1.0, 1, 2), leaf(0.0), split(0, 3.0, 3, 4), leaf(1.0), leaf(2.0)},
                           {{0.0, 5.0}});
    const FuzzyRegressionTree f = fuzzify_tree(t);
    CHECK(f.steepness(0) == 4.0);
    CHECK(f.steepness(2) == 4.0);
    // A lone threshold falls back to a tenth of the feature range.
    const RegressionTree lone(1, {split(0, 1.0, 1, 2), leaf(0.0), leaf(1.0)}, {{0.0, 5.0}});
    CHECK(fuzzify_tree(lone).steepness(0) == 16.0);
    CHECK(fuzzify_tree(lone, SteepnessPolicy::gap_scaled(2.0)).steepness(0) == 4.0);
}

TEST_CASE("very steep sigmoids reproduce the crisp tree away from thresholds")
{
    testgen::Gen g(5);
    const Dataset d = testgen::noise_dataset(g, 2, 100);
    const RegressionTree t = fit_tree(d, 12);
    const FuzzyRegressionTree f = fuzzify_tree(t, SteepnessPolicy::fixed(1e6));
    int checked = 0;
    for (int i = 0; i < 3000; ++i) {
        const std::vector<double> x = g.point(2);
        if (distance_to_thresholds(t, x) < 0.01)
            continue;
        ++checked;
        CHECK(std::abs(f.predict(x) - t.predict(x)) < 1e-6);
    }
    CHECK(checked > 1000);
}

TEST_CASE("fuzzy trees match leaf enumeration and their TSK form")
{
    testgen::Gen g(6);
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset d = testgen::noise_dataset(g, 3, 120);
        const RegressionTree t = fit_tree(d, 2 + g.index(31));
        const FuzzyRegressionTree f = fuzzify_tree(t, SteepnessPolicy::gap_scaled(g.uniform(1.0, 20.0)));
        const TskModel tsk = fuzzy_tree_to_tsk(f);
        CHECK(tsk.size() == t.leaf_count());
        for (int i = 0; i < 200; ++i) {
            const std::vector<double> x = g.point(3);
            CHECK(std::abs(f.path_grade_sum(x) - 1.0) < 1e-12);
            CHECK(f.predict(x) == doctest::Approx(oracle::fuzzy_tree(f, x)).epsilon(1e-12));
            CHECK(std::abs(tsk.predict(x) - f.predict(x)) < 1e-12);
        }
    }
}

TEST_CASE("three-leaf fuzzy tree and its three rules agree")
{
    const FuzzyRegressionTree f = fuzzify_tree(three_leaf_tree(), SteepnessPolicy::fixed(1.5));
    const TskModel tsk = fuzzy_tree_to_tsk(f);
    REQUIRE(tsk.size() == 3);
    CHECK(tsk.rule(0).antecedent.clauses.size() == 1);
    CHECK(tsk.rule(1).antecedent.clauses.size() == 2);
    testgen::Gen g(7);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> x = g.point(2, 0.0, 10.0);
        worst = std::max(worst, std::abs(tsk.predict(x) - f.predict(x)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("repeated features on a path become separate clauses")
{
    const RegressionTree t(1, {split(0, 8.0, 1, 4), split(0, 3.0, 2, 3), leaf(1.0), leaf(2.0), leaf(3.0)});
    const TskModel tsk = fuzzy_tree_to_tsk(fuzzify_tree(t));
    REQUIRE(tsk.size() == 3);
    CHECK(tsk.rule(0).antecedent.clauses.size() == 2);
    CHECK(tsk.rule(0).antecedent.path);
    CHECK_FALSE(tsk.rule(2).antecedent.path);
}

TEST_CASE("affine upgrade then least squares beats constant leaves")
{
    data::DataSpec spec{data::Generator::PiecewiseLinear, 300, 0.0, 5, {}};
    const Dataset d = data::generate(spec);
    const FuzzyRegressionTree f = fuzzify_tree(fit_tree(d, 4));
    const TskModel constant = fuzzy_tree_to_tsk(f);
    const TskModel upgraded = fuzzy_tree_to_tsk(f, true);
    CHECK(upgraded.rule(0).consequent.affine()->slopes == std::vector<double>{0.0, 0.0});
    const TskModel refined = anfis::lse_consequents(upgraded, d);
    CHECK(model_mse(refined, d) < model_mse(constant, d));
}

TEST_CASE("support: one partition is plain affine regression")
{
    testgen::Gen g(8);
    const Dataset d = testgen::noise_dataset(g, 2, 30);
    const std::vector<SupportPartition> p = fit_support(d, RegressionTree(2, {leaf(0.0)}));
    REQUIRE(p.size() == 1);
    const std::vector<double> ols = oracle::weighted_ols(d);
    CHECK(p[0].model.slopes[0] == doctest::Approx(ols[0]).epsilon(1e-10));
    CHECK(p[0].model.slopes[1] == doctest::Approx(ols[1]).epsilon(1e-10));
    CHECK(p[0].model.intercept == doctest::Approx(ols[2]).epsilon(1e-10));
    const std::vector<double> x{0.1, 0.2};
    CHECK(support_predict(p, x) == doctest::Approx(oracle::affine(p[0].model, x)).epsilon(1e-12));
}

TEST_CASE("support reproduces a global line")
{
    testgen::Gen g(9);
    const Affine line{{1.5, -0.7}, 0.3};
    Dataset d(2);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x = g.point(2);
        d.push_back(x, oracle::affine(line, x));
    }
    const std::vector<SupportPartition> p = fit_support(d, fit_tree(testgen::noise_dataset(g, 2, 100), 4, 20));
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x = g.point(2);
        CHECK(std::abs(support_predict(p, x) - oracle::affine(line, x)) < 1e-8);
    }
}

TEST_CASE("support matches a direct weighted evaluation")
{
    testgen::Gen g(10);
    const Dataset d = testgen::noise_dataset(g, 2, 150);
    const std::vector<SupportPartition> p = fit_support(d, fit_tree(d, 5, 10));
    for (const SupportPartition& part : p)
        for (double w : part.widths)
            CHECK(w > 0.0);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x = g.point(2);
        CHECK(support_predict(p, x) == doctest::Approx(support_oracle(p, x)).epsilon(1e-12));
    }
}

TEST_CASE("support rejects small partitions")
{
    const Dataset d(1, {0.0, 1.0, 2.0, 3.0}, {0.0, 0.0, 1.0, 1.0});
    CHECK_THROWS_AS(fit_support(d, fit_tree(d, 2)), ModelError);
}

TEST_CASE("tree json round trips")
{
    testgen::Gen g(11);
    const Dataset d = testgen::noise_dataset(g, 2, 60);
    const RegressionTree t = fit_tree(d, 7);
    CHECK(tree_from_json(Json::parse(to_json(t).dump())) == t);
    const FuzzyRegressionTree f = fuzzify_tree(t);
    CHECK(fuzzy_tree_from_json(Json::parse(to_json(f).dump())) == f);
}

TEST_CASE("tree validation")
{
    CHECK_THROWS_AS(RegressionTree(1, {split(0, 1.0, 1, 1), leaf(0.0)}), InvalidArgument);
    CHECK_THROWS_AS(RegressionTree(1, {split(3, 1.0, 1, 2), leaf(0.0), leaf(1.0)}), InvalidArgument);
    CHECK_THROWS_AS(FuzzyRegressionTree(three_leaf_tree(), {1.0}), InvalidArgument);
}
