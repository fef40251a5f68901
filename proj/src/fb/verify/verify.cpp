#include "fb/verify/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fb/anfis/anfis.hpp"
#include "fb/common/error.hpp"
#include "fb/verify/fixtures.hpp"

namespace fb::verify {

namespace {

// Largest deviation seen per named check, in first-seen order.
class Tracker {
public:
    explicit Tracker(double tolerance) : tolerance_(tolerance) {}

    void record(const std::string& name, double deviation)
    {
        auto it = std::find_if(checks_.begin(), checks_.end(), [&](const Check& c) { return c.name == name; });
        if (it == checks_.end()) {
            checks_.push_back(Check{name, 0.0, tolerance_, true});
            it = checks_.end() - 1;
        }
        // NaN must stick and fail the check.
        if (!(deviation <= it->max_deviation))
            it->max_deviation = std::isnan(it->max_deviation) ? it->max_deviation : deviation;
        it->passed = it->max_deviation <= tolerance_;
    }

    Report finish(Suite suite, const Options& options) &&
    {
        Report r{suite_name(suite), options.seed, options.trials, tolerance_, std::move(checks_), true};
        for (const Check& c : r.checks)
            r.passed = r.passed && c.passed;
        return r;
    }

    bool empty() const { return checks_.empty(); }

private:
    double tolerance_;
    std::vector<Check> checks_;
};

using Box = std::vector<FeatureRange>;

std::vector<double> sample(Rng& rng, const Box& box)
{
    std::vector<double> x(box.size());
    for (std::size_t i = 0; i < box.size(); ++i)
        x[i] = rng.uniform(box[i].lo, box[i].hi);
    return x;
}

Box uniform_box(std::size_t dim, double lo = kInputLo, double hi = kInputHi) { return Box(dim, FeatureRange{lo, hi}); }

Box data_box(const Dataset& data)
{
    Box box(data.dim(), FeatureRange{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    for (std::size_t n = 0; n < data.size(); ++n)
        for (std::size_t i = 0; i < data.dim(); ++i) {
            box[i].lo = std::min(box[i].lo, data.row(n)[i]);
            box[i].hi = std::max(box[i].hi, data.row(n)[i]);
        }
    for (FeatureRange& r : box)
        if (!(r.lo < r.hi))
            r = data.empty() ? FeatureRange{kInputLo, kInputHi} : FeatureRange{r.lo - 1.0, r.lo + 1.0};
    return box;
}

// Covers every Gaussian to three widths and every sigmoid transition.
Box tsk_box(const TskModel& model)
{
    Box box(model.input_dim(), FeatureRange{std::numeric_limits<double>::infinity(),
                                            -std::numeric_limits<double>::infinity()});
    auto widen = [&](std::size_t i, double lo, double hi) {
        box[i].lo = std::min(box[i].lo, lo);
        box[i].hi = std::max(box[i].hi, hi);
    };
    for (const Rule& r : model.rules())
        for (const Clause& c : r.antecedent.clauses) {
            const MembershipFunction::Shape& s = c.mf.shape();
            if (const auto* g = std::get_if<Gaussian>(&s))
                widen(c.feature, g->center - 3.0 * g->width, g->center + 3.0 * g->width);
            else if (const auto* u = std::get_if<SigmoidUp>(&s))
                widen(c.feature, u->threshold - 6.0 / u->steepness, u->threshold + 6.0 / u->steepness);
            else if (const auto* d = std::get_if<SigmoidDown>(&s))
                widen(c.feature, d->threshold - 6.0 / d->steepness, d->threshold + 6.0 / d->steepness);
        }
    for (FeatureRange& r : box)
        if (!(r.lo < r.hi))
            r = FeatureRange{kInputLo, kInputHi};
    return box;
}

Box tree_box(const cart::RegressionTree& tree)
{
    Box box = tree.feature_ranges();
    if (box.size() == tree.input_dim())
        return box;
    box = uniform_box(tree.input_dim(), std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity());
    for (const cart::TreeNode& n : tree.nodes())
        if (!n.is_leaf()) {
            box[n.feature].lo = std::min(box[n.feature].lo, n.threshold - 1.0);
            box[n.feature].hi = std::max(box[n.feature].hi, n.threshold + 1.0);
        }
    for (FeatureRange& r : box)
        if (!(r.lo < r.hi))
            r = FeatureRange{kInputLo, kInputHi};
    return box;
}

template <class A, class B>
double max_paired_gap(const A& a, const B& b, Rng& rng, const Box& box, std::size_t points)
{
    double gap = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
        const std::vector<double> x = sample(rng, box);
        const double d = std::abs(a.predict(x) - b.predict(x));
        if (!(d <= gap))
            gap = d;
    }
    return gap;
}

double vector_gap(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size())
        return std::numeric_limits<double>::infinity();
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        gap = std::max(gap, std::abs(a[i] - b[i]));
    return gap;
}

// Largest relative parameter difference between two TSK models with the same
// structure; infinity when the structure differs.
double tsk_parameter_gap(const TskModel& a, const TskModel& b)
{
    if (a.size() != b.size() || a.input_dim() != b.input_dim() || a.aggregation() != b.aggregation())
        return std::numeric_limits<double>::infinity();
    double gap = 0.0;
    auto rel = [&](double u, double v) { gap = std::max(gap, std::abs(u - v) / std::max(1.0, std::abs(u))); };
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& ca = a.rule(k).antecedent.clauses;
        const auto& cb = b.rule(k).antecedent.clauses;
        if (ca.size() != cb.size())
            return std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < ca.size(); ++j) {
            if (ca[j].feature != cb[j].feature || !ca[j].mf.is_gaussian() || !cb[j].mf.is_gaussian())
                return std::numeric_limits<double>::infinity();
            rel(ca[j].mf.gaussian()->center, cb[j].mf.gaussian()->center);
            rel(ca[j].mf.gaussian()->width, cb[j].mf.gaussian()->width);
        }
        const Consequent& qa = a.rule(k).consequent;
        const Consequent& qb = b.rule(k).consequent;
        if (qa.is_affine() != qb.is_affine())
            return std::numeric_limits<double>::infinity();
        if (qa.is_affine()) {
            rel(qa.affine()->intercept, qb.affine()->intercept);
            gap = std::max(gap, vector_gap(qa.affine()->slopes, qb.affine()->slopes));
        } else {
            rel(qa.constant()->value, qb.constant()->value);
        }
    }
    return gap;
}

// ---- brute-force re-evaluations straight from the defining formulas ----

double direct_grade(const MembershipFunction& mf, double x)
{
    const MembershipFunction::Shape& s = mf.shape();
    if (const auto* g = std::get_if<Gaussian>(&s))
        return std::exp(-(x - g->center) * (x - g->center) / (2.0 * g->width * g->width));
    if (const auto* u = std::get_if<SigmoidUp>(&s))
        return 1.0 / (1.0 + std::exp(-u->steepness * (x - u->threshold)));
    const auto& d = std::get<SigmoidDown>(s);
    return 1.0 / (1.0 + std::exp(d.steepness * (x - d.threshold)));
}

double direct_tsk(const TskModel& model, std::span<const double> x)
{
    double num = 0.0;
    double den = 0.0;
    for (const Rule& r : model.rules()) {
        double f = 1.0;
        for (const Clause& c : r.antecedent.clauses)
            f *= direct_grade(c.mf, x[c.feature]);
        double y = 0.0;
        if (const Affine* a = r.consequent.affine()) {
            y = a->intercept;
            for (std::size_t i = 0; i < x.size(); ++i)
                y += a->slopes[i] * x[i];
        } else {
            y = r.consequent.constant()->value;
        }
        num += f * y;
        den += f;
    }
    return model.aggregation() == Aggregation::WeightedSum ? num : num / den;
}

double direct_affine(const Affine& a, std::span<const double> x)
{
    double y = a.intercept;
    for (std::size_t i = 0; i < x.size(); ++i)
        y += a.slopes[i] * x[i];
    return y;
}

double direct_output(const Consequent& c, std::span<const double> x)
{
    return c.is_affine() ? direct_affine(*c.affine(), x) : c.constant()->value;
}

double direct_rbfn(const rbfn::RbfnModel& model, std::span<const double> x)
{
    double num = 0.0;
    double den = 0.0;
    for (const rbfn::RbfUnit& u : model.units()) {
        double s = 0.0;
        for (std::size_t j = 0; j < u.features.size(); ++j) {
            const double w = u.width(j);
            s += (x[u.features[j]] - u.centers[j]) * (x[u.features[j]] - u.centers[j]) / (w * w);
        }
        const double f = std::exp(-s);
        num += f * direct_output(u.output, x);
        den += f;
    }
    return model.normalized() ? num / den : num;
}

std::vector<double> direct_gates(const moe::MoeModel& model, std::span<const double> x)
{
    std::vector<double> v;
    for (const moe::GateFunction& g : model.gates()) {
        double value = 0.0;
        if (const auto* q = std::get_if<moe::QuadraticGate>(&g)) {
            for (std::size_t i = 0; i < x.size(); ++i)
                value -= (x[i] - q->centers[i]) * (x[i] - q->centers[i]) / (2.0 * q->widths[i] * q->widths[i]);
        } else {
            const auto& a = std::get<moe::AffineGate>(g);
            value = a.bias;
            for (std::size_t i = 0; i < x.size(); ++i)
                value += a.weights[i] * x[i];
        }
        v.push_back(value);
    }
    const double top = *std::max_element(v.begin(), v.end());
    double total = 0.0;
    for (double& e : v) {
        e = std::exp(e - top);
        total += e;
    }
    for (double& e : v)
        e /= total;
    return v;
}

double direct_moe(const moe::MoeModel& model, std::span<const double> x)
{
    const std::vector<double> g = direct_gates(model, x);
    double y = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        y += g[k] * direct_affine(model.experts()[k], x);
    return y;
}

double direct_fuzzy_tree(const cart::FuzzyRegressionTree& ftree, std::span<const double> x)
{
    const cart::RegressionTree& tree = ftree.tree();
    double num = 0.0;
    double den = 0.0;
    // Every leaf, with its path grade rebuilt by walking up from the root.
    for (std::size_t leaf = 0; leaf < tree.nodes().size(); ++leaf) {
        if (!tree.node(leaf).is_leaf())
            continue;
        double grade = 1.0;
        std::size_t child = leaf;
        bool reachable = child == 0;
        for (bool moved = true; moved && child != 0;) {
            moved = false;
            for (std::size_t p = 0; p < tree.nodes().size(); ++p) {
                const cart::TreeNode& n = tree.node(p);
                if (n.is_leaf())
                    continue;
                const double z = ftree.steepness(p) * (x[n.feature] - n.threshold);
                if (static_cast<std::size_t>(n.left) == child) {
                    grade *= 1.0 / (1.0 + std::exp(z));
                } else if (static_cast<std::size_t>(n.right) == child) {
                    grade *= 1.0 / (1.0 + std::exp(-z));
                } else {
                    continue;
                }
                child = p;
                moved = true;
                reachable = child == 0;
                break;
            }
        }
        if (!reachable)
            continue;
        num += grade * direct_output(tree.node(leaf).leaf, x);
        den += grade;
    }
    return num / den;
}

double direct_stack(const stacking::StackModel& model, std::span<const double> x)
{
    std::vector<double> p;
    for (const stacking::BaseModel& b : model.bases())
        p.push_back(direct_affine(Affine{b.slopes, b.intercept}, x));
    if (const auto* c = std::get_if<stacking::ConstantWeights>(&model.combiner())) {
        double y = c->intercept;
        for (std::size_t k = 0; k < p.size(); ++k)
            y += c->weights[k] * p[k];
        return y;
    }
    return direct_moe(stacking::as_mixture(model), x);
}

template <class Model, class Direct>
double max_oracle_gap(const Model& model, Direct&& direct, Rng& rng, const Box& box, std::size_t points)
{
    double gap = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
        const std::vector<double> x = sample(rng, box);
        const double d = std::abs(model.predict(x) - direct(model, x)) / std::max(1.0, std::abs(direct(model, x)));
        if (!(d <= gap))
            gap = d;
    }
    return gap;
}

// Relative deviation |a - b| / max(1, |b|), for sums that grow with N.
double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

Dataset dataset_in(Rng& rng, const Box& box, std::size_t n)
{
    Dataset data(box.size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> x = sample(rng, box);
        data.push_back(x, rng.normal());
    }
    return data;
}

// ---- per-model check groups ----

bool all_gaussian(const TskModel& model)
{
    for (const Rule& r : model.rules())
        for (const Clause& c : r.antecedent.clauses)
            if (!c.mf.is_gaussian())
                return false;
    return true;
}

void tsk_equivalence(const TskModel& model, Rng& rng, const Box& box, std::size_t points, Tracker& t)
{
    if (rbfn::standard_rbfn_violations(model).empty()) {
        const rbfn::RbfnModel net = rbfn::tsk_to_rbfn(model);
        t.record("tsk_rbfn", max_paired_gap(model, net, rng, box, points));
        t.record("tsk_rbfn_round_trip", tsk_parameter_gap(model, rbfn::rbfn_to_tsk(net)));
    }
    if (all_gaussian(model)) {
        try {
            const rbfn::RbfnModel net = rbfn::generalized_tsk_rbfn(model);
            t.record("tsk_generalized_rbfn", max_paired_gap(model, net, rng, box, points));
            t.record("tsk_generalized_rbfn_round_trip", tsk_parameter_gap(model, rbfn::rbfn_to_tsk(net)));
        } catch (const ModelError&) {
            // repeated features on a path: not a generalized RBFN
        }
        try {
            const moe::MoeModel mix = moe::tsk_to_moe(model);
            t.record("tsk_moe", max_paired_gap(model, mix, rng, box, points));
            t.record("tsk_moe_round_trip", tsk_parameter_gap(model, moe::moe_to_tsk(mix)));
        } catch (const ModelError&) {
            // partial antecedents or constant consequents: no mixture image
        }
    }
}

void softmax_shift(const moe::MoeModel& model, Rng& rng, const Box& box, std::size_t points, Tracker& t)
{
    double gap = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
        const std::vector<double> x = sample(rng, box);
        std::vector<double> v = model.gate_values(x);
        const std::vector<double> w = moe::softmax(v);
        const double shift = rng.uniform(-50.0, 50.0);
        for (double& e : v)
            e += shift;
        gap = std::max(gap, vector_gap(w, moe::softmax(v)));
    }
    t.record("softmax_shift_invariance", gap);
}

void moe_equivalence(const moe::MoeModel& model, Rng& rng, const Box& box, std::size_t points, Tracker& t)
{
    softmax_shift(model, rng, box, points, t);
    bool quadratic = true;
    for (const moe::GateFunction& g : model.gates())
        quadratic = quadratic && std::holds_alternative<moe::QuadraticGate>(g);
    if (quadratic)
        t.record("moe_tsk", max_paired_gap(model, moe::moe_to_tsk(model), rng, box, points));
}

void fuzzy_equivalence(const cart::FuzzyRegressionTree& ftree, Rng& rng, const Box& box, std::size_t points,
                       Tracker& t)
{
    const TskModel rules = cart::fuzzy_tree_to_tsk(ftree);
    t.record("fuzzy_tree_tsk", max_paired_gap(ftree, rules, rng, box, points));
    double gap = 0.0;
    for (std::size_t p = 0; p < points; ++p)
        gap = std::max(gap, std::abs(ftree.path_grade_sum(sample(rng, box)) - 1.0));
    t.record("path_grade_sum", gap);
}

void crisp_rules(const cart::RegressionTree& tree, Rng& rng, const Box& box, std::size_t points, Tracker& t)
{
    const std::vector<cart::CrispRule> rules = cart::extract_crisp_rules(tree);
    double gap = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
        const std::vector<double> x = sample(rng, box);
        std::size_t matches = 0;
        double value = 0.0;
        for (const cart::CrispRule& r : rules)
            if (r.matches(x)) {
                ++matches;
                value = r.value.evaluate(x);
            }
        gap = std::max(gap, matches == 1 ? std::abs(value - tree.predict(x)) : std::numeric_limits<double>::infinity());
    }
    t.record("crisp_rules_partition", gap);
}

void tsk_gradients(const TskModel& model, const Dataset& data, Tracker& t)
{
    const std::vector<double> analytic = anfis::flatten(anfis::antecedent_gradients(model, data));
    const std::vector<double> numeric = central_differences(anfis::antecedent_parameters(model), [&](const std::vector<double>& p) {
        return anfis::squared_error(anfis::with_antecedent_parameters(model, p), data);
    });
    t.record("anfis_antecedent_gradient", gradient_relative_error(analytic, numeric));
}

void moe_gradients(const moe::MoeModel& model, const Dataset& data, double lambda, Tracker& t)
{
    const std::pair<moe::LossKind, const char*> kinds[] = {{moe::LossKind::Competitive, "moe_gradient_competitive"},
                                                           {moe::LossKind::Coupled, "moe_gradient_coupled"},
                                                           {moe::LossKind::Hybrid, "moe_gradient_hybrid"}};
    for (const auto& [kind, name] : kinds) {
        const std::vector<double> analytic = moe::loss_gradient(model, data, kind, lambda);
        const std::vector<double> numeric =
            central_differences(moe::parameters(model), [&, kind = kind](const std::vector<double>& p) {
                return moe::loss(moe::with_parameters(model, p), data, kind, lambda);
            });
        t.record(name, gradient_relative_error(analytic, numeric));
    }
}

void moe_losses(const moe::MoeModel& model, const Dataset& data, double lambda, Tracker& t)
{
    double competitive = 0.0;
    double coupled = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) {
        const std::vector<double> g = direct_gates(model, data.row(n));
        double blend = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double yk = direct_affine(model.experts()[k], data.row(n));
            competitive += g[k] * (data.target(n) - yk) * (data.target(n) - yk);
            blend += g[k] * yk;
        }
        coupled += (data.target(n) - blend) * (data.target(n) - blend);
    }
    t.record("loss_competitive", rel_gap(moe::loss_competitive(model, data), competitive));
    t.record("loss_coupled", rel_gap(moe::loss_coupled(model, data), coupled));
    const double l0 = moe::loss_hybrid(model, data, 0.0);
    const double l1 = moe::loss_hybrid(model, data, lambda);
    t.record("loss_hybrid_affine_in_lambda",
             std::max(rel_gap(l1, l0 + lambda * moe::loss_competitive(model, data)),
                      rel_gap(l0, moe::loss_coupled(model, data))));
}

// min ||[X 1] c - y|| by the normal equations, independent of the QR paths.
Eigen::VectorXd normal_equations(const Dataset& data, const Eigen::VectorXd& w)
{
    const auto n = static_cast<Eigen::Index>(data.size());
    const auto d = static_cast<Eigen::Index>(data.dim());
    Eigen::MatrixXd a(n, d + 1);
    a.leftCols(d) = data.input_matrix();
    a.col(d).setOnes();
    const Eigen::MatrixXd wa = w.asDiagonal() * a;
    return (a.transpose() * wa).ldlt().solve(wa.transpose() * data.target_vector());
}

double affine_gap(const Affine& a, const Eigen::VectorXd& c)
{
    const auto d = static_cast<Eigen::Index>(a.slopes.size());
    double gap = std::abs(a.intercept - c(d));
    for (Eigen::Index i = 0; i < d; ++i)
        gap = std::max(gap, std::abs(a.slopes[static_cast<std::size_t>(i)] - c(i)));
    return gap;
}

void random_oracles(Rng& rng, std::size_t points, Tracker& t)
{
    const std::size_t d = 1 + rng.index(4);
    const Box box = uniform_box(d);
    const TskModel general = random_generalized_tsk(rng, d, 1 + rng.index(8));
    t.record("tsk_predict", max_oracle_gap(general, direct_tsk, rng, box, points));
    const TskModel summed = random_standard_tsk(rng, d, 1 + rng.index(8), Aggregation::WeightedSum);
    t.record("tsk_weighted_sum", max_oracle_gap(summed, direct_tsk, rng, box, points));
    t.record("rbfn_predict", max_oracle_gap(rbfn::generalized_tsk_rbfn(general), direct_rbfn, rng, box, points));

    const moe::MoeModel mix = moe::tsk_to_moe(random_gaussian_tsk(rng, d, 1 + rng.index(6)));
    t.record("moe_predict", max_oracle_gap(mix, direct_moe, rng, box, points));
    moe_losses(mix, dataset_in(rng, box, 40), rng.uniform(0.0, 2.0), t);

    const cart::FuzzyRegressionTree ftree = random_fuzzy_tree(rng, d, 2 + rng.index(15));
    t.record("fuzzy_tree_predict", max_oracle_gap(ftree, direct_fuzzy_tree, rng, tree_box(ftree.tree()), points));

    // Nozaki: a single example, then identical inputs (all firings equal per rule).
    std::vector<std::vector<MembershipFunction>> grid(d);
    for (auto& mfs : grid)
        mfs = uniform_gaussian_partition(FeatureRange{kInputLo, kInputHi}, 1 + rng.index(3));
    const double alpha = rng.uniform(0.5, 4.0);
    Dataset single(d);
    single.push_back(sample(rng, box), rng.normal());
    double gap = 0.0;
    for (const Rule& r : stacking::nozaki_fit(single, grid, alpha).model.rules())
        gap = std::max(gap, std::abs(r.consequent.constant()->value - single.target(0)));
    t.record("nozaki_single_example", gap);
    Dataset same(d);
    const std::vector<double> x0 = sample(rng, box);
    for (int i = 0; i < 25; ++i)
        same.push_back(x0, rng.normal());
    gap = 0.0;
    for (const Rule& r : stacking::nozaki_fit(same, grid, alpha).model.rules())
        gap = std::max(gap, rel_gap(r.consequent.constant()->value, same.target_mean()));
    t.record("nozaki_uniform_firing", gap);

    // Unit weights: local rules and one-rule LSE are ordinary least squares.
    const Dataset data = dataset_in(rng, box, 30);
    const Eigen::VectorXd ols = normal_equations(data, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(data.size())));
    const TskModel local = stacking::local_rule_fit(data, {Antecedent{}});
    t.record("local_rules_unit_weight", affine_gap(*local.rule(0).consequent.affine(), ols));
    const TskModel one(d, {Rule{Antecedent{}, Affine{std::vector<double>(d, 0.0), 0.0}}});
    const TskModel lse = anfis::lse_consequents(one, data, 0.0);
    t.record("lse_single_rule", affine_gap(*lse.rule(0).consequent.affine(), ols));

    const std::size_t k = 1 + rng.index(4);
    stacking::AdaptiveGates gates;
    std::vector<stacking::BaseModel> bases;
    for (std::size_t i = 0; i < k; ++i) {
        Affine a = random_affine(rng, d);
        bases.push_back(stacking::BaseModel{a.slopes, a.intercept, i, 0.0});
        Affine g = random_affine(rng, d);
        gates.gates.push_back(moe::AffineGate{g.slopes, g.intercept});
    }
    t.record("stack_predict",
             max_oracle_gap(stacking::StackModel(d, bases, gates), direct_stack, rng, box, points));
}

Options resolved(Suite suite, Options options)
{
    if (!options.tolerance)
        options.tolerance = default_tolerance(suite);
    if (!(*options.tolerance >= 0.0))
        throw InvalidArgument("verify: tolerance must be >= 0");
    if (options.trials == 0)
        throw InvalidArgument("verify: trials must be >= 1");
    return options;
}

Report no_checks(Suite suite, const char* model)
{
    throw InvalidArgument(fmt::format("verify: the {} suite has no check for a {} model", suite_name(suite), model));
}

}  // namespace

std::string suite_name(Suite s)
{
    switch (s) {
    case Suite::Equivalence: return "equivalence";
    case Suite::Gradients: return "gradients";
    case Suite::Oracles: return "oracles";
    }
    return "?";
}

Suite parse_suite(std::string_view name)
{
    for (Suite s : {Suite::Equivalence, Suite::Gradients, Suite::Oracles})
        if (suite_name(s) == name)
            return s;
    throw InvalidArgument(fmt::format("unknown suite '{}' (expected equivalence, gradients or oracles)", name));
}

double default_tolerance(Suite s) { return s == Suite::Gradients ? 1e-4 : 1e-10; }

double gradient_relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric)
{
    if (analytic.size() != numeric.size())
        return std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (double v : numeric)
        scale = std::max(scale, std::abs(v));
    const double floor = std::max(1e-3 * scale, 1e-8);
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double e =
            std::abs(analytic[i] - numeric[i]) / std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
        if (!(e <= worst))
            worst = e;
    }
    return worst;
}

Report run_suite(Suite suite, const Options& given)
{
    const Options options = resolved(suite, given);
    Tracker t(*options.tolerance);
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
        Rng rng(derive_seed(options.seed, trial));
        switch (suite) {
        case Suite::Equivalence: {
            const std::size_t d = 1 + rng.index(4);
            const Box box = uniform_box(d);
            tsk_equivalence(random_standard_tsk(rng, d, 1 + rng.index(16)), rng, box, options.points, t);
            tsk_equivalence(random_standard_tsk(rng, d, 1 + rng.index(16), Aggregation::WeightedSum), rng, box,
                            options.points, t);
            tsk_equivalence(random_generalized_tsk(rng, d, 1 + rng.index(16)), rng, box, options.points, t);
            tsk_equivalence(random_gaussian_tsk(rng, d, 1 + rng.index(16)), rng, box, options.points, t);
            moe_equivalence(random_affine_gated_moe(rng, d, 1 + rng.index(8)), rng, box, options.points, t);
            const cart::FuzzyRegressionTree ftree = random_fuzzy_tree(rng, d, 2 + rng.index(31));
            fuzzy_equivalence(ftree, rng, tree_box(ftree.tree()), options.points, t);
            crisp_rules(ftree.tree(), rng, tree_box(ftree.tree()), options.points, t);
            break;
        }
        case Suite::Gradients: {
            const std::size_t d = 1 + rng.index(3);
            const Box box = uniform_box(d);
            const Dataset data = dataset_in(rng, box, 12);
            tsk_gradients(random_gaussian_tsk(rng, d, 1 + rng.index(8)), data, t);
            tsk_gradients(random_standard_tsk(rng, d, 1 + rng.index(8), Aggregation::WeightedSum), data, t);
            const double lambda = rng.uniform(0.0, 2.0);
            moe_gradients(moe::tsk_to_moe(random_gaussian_tsk(rng, d, 1 + rng.index(6))), data, lambda, t);
            moe_gradients(random_affine_gated_moe(rng, d, 1 + rng.index(6)), data, lambda, t);
            break;
        }
        case Suite::Oracles:
            random_oracles(rng, options.points, t);
            break;
        }
    }
    return std::move(t).finish(suite, options);
}

Report verify_model(Suite suite, const TskModel& model, const Options& given, const Dataset* data)
{
    const Options options = resolved(suite, given);
    const Box box = data ? data_box(*data) : tsk_box(model);
    Tracker t(*options.tolerance);
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
        Rng rng(derive_seed(options.seed, trial));
        if (suite == Suite::Equivalence) {
            tsk_equivalence(model, rng, box, options.points, t);
        } else if (suite == Suite::Gradients) {
            if (!all_gaussian(model))
                return no_checks(suite, "sigmoid-antecedent tsk");
            tsk_gradients(model, data ? *data : dataset_in(rng, box, 12), t);
        } else {
            t.record("tsk_predict", max_oracle_gap(model, direct_tsk, rng, box, options.points));
        }
    }
    if (t.empty())
        return no_checks(suite, "tsk");
    return std::move(t).finish(suite, options);
}

Report verify_model(Suite suite, const rbfn::RbfnModel& model, const Options& given, const Dataset* data)
{
    const Options options = resolved(suite, given);
    const TskModel rules = rbfn::rbfn_to_tsk(model);
    const Box box = data ? data_box(*data) : tsk_box(rules);
    Tracker t(*options.tolerance);
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
        Rng rng(derive_seed(options.seed, trial));
        if (suite == Suite::Equivalence)
            t.record("rbfn_tsk", max_paired_gap(model, rules, rng, box, options.points));
        else if (suite == Suite::Gradients)
            tsk_gradients(rules, data ? *data : dataset_in(rng, box, 12), t);
        else
            t.record("rbfn_predict", max_oracle_gap(model, direct_rbfn, rng, box, options.points));
    }
    return std::move(t).finish(suite, options);
}

Report verify_model(Suite suite, const moe::MoeModel& model, const Options& given, const Dataset* data)
{
    const Options options = resolved(suite, given);
    Box box = data ? data_box(*data) : uniform_box(model.input_dim());
    if (!data)
        try {
            box = tsk_box(moe::moe_to_tsk(model));
        } catch (const ModelError&) {
            // affine gates: keep the default box
        }
    Tracker t(*options.tolerance);
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
        Rng rng(derive_seed(options.seed, trial));
        const Dataset sample_data = data ? *data : dataset_in(rng, box, 12);
        if (suite == Suite::Equivalence) {
            moe_equivalence(model, rng, box, options.points, t);
        } else if (suite == Suite::Gradients) {
            moe_gradients(model, sample_data, moe::kDefaultLambda, t);
        } else {
            t.record("moe_predict", max_oracle_gap(model, direct_moe, rng, box, options.points));
            moe_losses(model, sample_data, moe::kDefaultLambda, t);
        }
    }
    return std::move(t).finish(suite, options);
}

Report verify_model(Suite suite, const cart::RegressionTree& model, const Options& given, const Dataset* data)
{
    const Options options = resolved(suite, given);
    if (suite == Suite::Gradients)
        return no_checks(suite, "tree");
    const Box box = data ? data_box(*data) : tree_box(model);
    Tracker t(*options.tolerance);
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
        Rng rng(derive_seed(options.seed, trial));
        crisp_rules(model, rng, box, options.points, t);
    }
    return std::move(t).finish(suite, options);
}

Report verify_model(Suite suite, const cart::FuzzyRegressionTree& model, const Options& given, const Dataset* data)
{
    const Options options = resolved(suite, given);
    if (suite == Suite::Gradients)
        return no_checks(suite, "fuzzy tree");
    const Box box = data ? data_box(*data) : tree_box(model.tree());
    Tracker t(*options.tolerance);
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
        Rng rng(derive_seed(options.seed, trial));
        if (suite == Suite::Equivalence)
            fuzzy_equivalence(model, rng, box, options.points, t);
        else
            t.record("fuzzy_tree_predict", max_oracle_gap(model, direct_fuzzy_tree, rng, box, options.points));
    }
    return std::move(t).finish(suite, options);
}

Report verify_model(Suite suite, const stacking::StackModel& model, const Options& given, const Dataset* data)
{
    const Options options = resolved(suite, given);
    const bool adaptive = std::holds_alternative<stacking::AdaptiveGates>(model.combiner());
    if (suite == Suite::Gradients && !adaptive)
        return no_checks(suite, "constant-weight stack");
    const Box box = data ? data_box(*data) : uniform_box(model.input_dim());
    Tracker t(*options.tolerance);
    for (std::size_t trial = 0; trial < options.trials; ++trial) {
        Rng rng(derive_seed(options.seed, trial));
        if (suite == Suite::Equivalence) {
            if (adaptive)
                t.record("stack_mixture", max_paired_gap(model, stacking::as_mixture(model), rng, box, options.points));
            else
                t.record("stack_predict", max_oracle_gap(model, direct_stack, rng, box, options.points));
        } else if (suite == Suite::Gradients) {
            moe_gradients(stacking::as_mixture(model), data ? *data : dataset_in(rng, box, 12), moe::kDefaultLambda, t);
        } else {
            t.record("stack_predict", max_oracle_gap(model, direct_stack, rng, box, options.points));
        }
    }
    return std::move(t).finish(suite, options);
}

Json to_json(const Report& report)
{
    Json j;
    j["suite"] = report.suite;
    j["seed"] = report.seed;
    j["trials"] = report.trials;
    j["tolerance"] = report.tolerance;
    Json checks = Json::array();
    for (const Check& c : report.checks) {
        Json e;
        e["name"] = c.name;
        // JSON has no NaN or infinity.
        if (std::isfinite(c.max_deviation))
            e["max_deviation"] = c.max_deviation;
        else
            e["max_deviation"] = nullptr;
        e["tolerance"] = c.tolerance;
        e["passed"] = c.passed;
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    j["passed"] = report.passed;
    return j;
}

std::string to_text(const Report& report)
{
    std::string out = fmt::format("suite {} (seed {}, {} trials, tolerance {:g})\n", report.suite, report.seed,
                                  report.trials, report.tolerance);
    for (const Check& c : report.checks)
        out += fmt::format("  [{}] {:<34} max deviation {:.3e}\n", c.passed ? "PASS" : "FAIL", c.name, c.max_deviation);
    out += report.passed ? "all checks passed\n" : "some checks FAILED\n";
    return out;
}

}  // namespace fb::verify
