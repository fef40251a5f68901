// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Usage: acceptance --cli PATH --work DIR
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "fb/anfis/anfis.hpp"
#include "fb/cart/cart.hpp"
#include "fb/data/data.hpp"
#include "fb/moe/moe.hpp"
#include "fb/rbfn/rbfn.hpp"
#include "fb/stacking/stacking.hpp"

#include "gen.hpp"
#include "oracles.hpp"

using namespace fb;
namespace fs = std::filesystem;

namespace {

// Tolerances, pinned.
constexpr double kEquivalenceTol = 1e-10;
constexpr double kEquivalenceSeconds = 10.0;
constexpr double kSoftmaxShiftTol = 1e-12;
constexpr double kTreeTol = 1e-12;
constexpr double kCrispLimitTol = 1e-3;
constexpr double kBoundaryMargin = 0.005;
constexpr double kGradientTol = 1e-4;
constexpr double kPerturbation = 1e-3;
constexpr double kSummationSlack = 1e-13;
constexpr double kHybridTol = 1e-12;
constexpr double kRecoveryTol = 0.1;
constexpr double kNozakiMeanTol = 1e-12;
constexpr double kOlsTol = 1e-10;
constexpr double kLineTol = 1e-6;
constexpr double kBootstrapTol = 0.02;
constexpr double kDominanceTol = 1e-9;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& measured)
{
    fmt::print("[{}] AC {:>2}: {} ({})\n", ok ? "PASS" : "FAIL", id, what, measured);
    if (!ok)
        ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_coefficient_error(const Affine& a, const Affine& b)
{
    double e = std::abs(a.intercept - b.intercept);
    for (std::size_t i = 0; i < a.slopes.size(); ++i)
        e = std::max(e, std::abs(a.slopes[i] - b.slopes[i]));
    return e;
}

void ac1_rbfn()
{
    testgen::Gen g(101);
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int m = 0; m < 20; ++m) {
        const std::size_t d = 1 + g.index(4);
        const std::size_t k = 1 + g.index(16);
        const TskModel tsk = testgen::gaussian_tsk(g, d, k, {.shared_width = true, .affine = false});
        const rbfn::RbfnModel net = rbfn::tsk_to_rbfn(tsk);
        for (int i = 0; i < 1000; ++i) {
            const std::vector<double> x = g.point(d);
            worst = std::max(worst, std::abs(tsk.predict(x) - net.predict(x)));
        }
    }
    const double elapsed = seconds_since(t0);
    report(1, worst < kEquivalenceTol && elapsed < kEquivalenceSeconds, "TSK and RBFN agree on 20 conforming models",
           fmt::format("max |diff| {:.3g}, {:.2f} s", worst, elapsed));
}

void ac2_moe()
{
    testgen::Gen g(102);
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int m = 0; m < 20; ++m) {
        const std::size_t d = 1 + g.index(4);
        const std::size_t k = 1 + g.index(16);
        const TskModel tsk = testgen::gaussian_tsk(g, d, k);
        const moe::MoeModel mix = moe::tsk_to_moe(tsk);
        for (int i = 0; i < 1000; ++i) {
            const std::vector<double> x = g.point(d);
            worst = std::max(worst, std::abs(tsk.predict(x) - mix.predict(x)));
        }
    }
    const double elapsed = seconds_since(t0);

    double shift_worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> v(1 + g.index(16));
        for (double& e : v)
            e = 5.0 * g.normal();
        const double shift = g.uniform(-500.0, 500.0);
        std::vector<double> s = v;
        for (double& e : s)
            e += shift;
        const std::vector<double> a = moe::softmax(v);
        const std::vector<double> b = moe::softmax(s);
        for (std::size_t i = 0; i < v.size(); ++i)
            shift_worst = std::max(shift_worst, std::abs(a[i] - b[i]));
    }
    report(2, worst < kEquivalenceTol && elapsed < kEquivalenceSeconds && shift_worst < kSoftmaxShiftTol,
           "TSK and MoE agree on 20 models; softmax is shift invariant",
           fmt::format("max |diff| {:.3g}, {:.2f} s, shift {:.3g}", worst, elapsed, shift_worst));
}

void ac3_fuzzy_tree()
{
    testgen::Gen g(103);
    double worst = 0.0;
    double sum_worst = 0.0;
    std::size_t largest = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset d = testgen::noise_dataset(g, 3, 200);
        const cart::RegressionTree t = cart::fit_tree(d, 2 + g.index(31));
        largest = std::max(largest, t.leaf_count());
        const cart::FuzzyRegressionTree f =
            cart::fuzzify_tree(t, cart::SteepnessPolicy::gap_scaled(g.uniform(1.0, 20.0)));
        const TskModel tsk = cart::fuzzy_tree_to_tsk(f);
        for (int i = 0; i < 1000; ++i) {
            const std::vector<double> x = g.point(3);
            worst = std::max(worst, std::abs(tsk.predict(x) - f.predict(x)));
            sum_worst = std::max(sum_worst, std::abs(f.path_grade_sum(x) - 1.0));
        }
    }
    report(3, worst < kTreeTol && sum_worst < kTreeTol && largest <= 32,
           "fuzzy trees agree with their TSK form; path grades sum to one",
           fmt::format("max |diff| {:.3g}, max |sum - 1| {:.3g}, up to {} leaves", worst, sum_worst, largest));
}

void ac4_crisp_limit()
{
    testgen::Gen g(104);
    const Dataset d = testgen::noise_dataset(g, 2, 300);
    const cart::RegressionTree t = cart::fit_tree(d, 16);
    const double range = 4.0;
    std::vector<std::vector<double>> points;
    while (points.size() < 5000) {
        std::vector<double> x = g.point(2);
        bool near = false;
        for (const cart::TreeNode& n : t.nodes())
            if (!n.is_leaf() && std::abs(x[n.feature] - n.threshold) < kBoundaryMargin * range)
                near = true;
        if (!near)
            points.push_back(std::move(x));
    }
    std::vector<double> deviation;
    for (double alpha : {1.0, 10.0, 100.0, 1e4}) {
        const cart::FuzzyRegressionTree f = cart::fuzzify_tree(t, cart::SteepnessPolicy::fixed(alpha));
        double worst = 0.0;
        for (const auto& x : points)
            worst = std::max(worst, std::abs(f.predict(x) - t.predict(x)));
        deviation.push_back(worst);
    }
    const bool monotone = std::is_sorted(deviation.rbegin(), deviation.rend());
    report(4, t.leaf_count() == 16 && monotone && deviation.back() < kCrispLimitTol,
           "fuzzy tree approaches the crisp tree as steepness grows",
           fmt::format("{} leaves, deviations {:.3g} {:.3g} {:.3g} {:.3g}", t.leaf_count(), deviation[0], deviation[1],
                       deviation[2], deviation[3]));
}

double oracle_sse(const TskModel& m, const Dataset& d)
{
    double s = 0.0;
    for (std::size_t n = 0; n < d.size(); ++n) {
        const double e = d.target(n) - oracle::tsk(m, d.row(n));
        s += e * e;
    }
    return s;
}

void ac5_anfis()
{
    testgen::Gen g(105);
    double grad_worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 1 + g.index(3);
        const TskModel m = testgen::gaussian_tsk(g, d, 2 + g.index(5));
        const Dataset data = testgen::noise_dataset(g, d, 25);
        const std::vector<double> analytic = anfis::flatten(anfis::antecedent_gradients(m, data));
        const std::vector<double> numeric =
            oracle::central_difference(anfis::antecedent_parameters(m), [&](const std::vector<double>& p) {
                return oracle_sse(anfis::with_antecedent_parameters(m, p), data);
            });
        grad_worst = std::max(grad_worst, oracle::relative_error(analytic, numeric));
    }

    const TskModel start = testgen::gaussian_tsk(g, 2, 4);
    const Dataset noise = testgen::noise_dataset(g, 2, 100);
    const TskModel fit = anfis::lse_consequents(start, noise, 0.0);
    const double best = model_mse(fit, noise);
    int improved = 0;
    for (int p = 0; p < 100; ++p) {
        std::vector<Rule> rules = fit.rules();
        const std::size_t k = g.index(rules.size());
        Affine a = *rules[k].consequent.affine();
        const double delta = g.uniform() < 0.5 ? -kPerturbation : kPerturbation;
        const std::size_t c = g.index(3);
        if (c < 2)
            a.slopes[c] += delta;
        else
            a.intercept += delta;
        rules[k].consequent = a;
        if (model_mse(TskModel(2, rules), noise) < best * (1.0 - kSummationSlack))
            ++improved;
    }

    const Dataset sinc = data::generate({data::Generator::Sinc2d, 289, 0.0, 0, {}, data::Layout::Grid});
    const std::vector<FeatureRange> box{{-10.0, 10.0}, {-10.0, 10.0}};
    const TskModel init = anfis::grid_init(2, 4, box, &sinc);
    const double baseline = model_mse(anfis::lse_consequents(init, sinc), sinc);
    const anfis::TrainResult r = anfis::hybrid_train(init, sinc, {.epochs = 100, .learning_rate = 10.0});
    const double trained = model_mse(r.model, sinc);

    report(5, grad_worst < kGradientTol && improved == 0 && init.size() == 16 && trained < baseline,
           "ANFIS gradients, LSE optimality and hybrid training on sinc2d",
           fmt::format("grad rel err {:.3g}, {} of 100 perturbations improved, mse {:.4g} vs LSE-only {:.4g}",
                       grad_worst, improved, trained, baseline));
}

moe::MoeModel random_moe(testgen::Gen& g, std::size_t d, std::size_t k)
{
    std::vector<Affine> experts;
    std::vector<moe::GateFunction> gates;
    for (std::size_t i = 0; i < k; ++i) {
        experts.push_back(testgen::affine(g, d));
        moe::QuadraticGate q;
        for (std::size_t j = 0; j < d; ++j) {
            q.centers.push_back(g.uniform(-1, 1));
            q.widths.push_back(g.uniform(0.4, 1.5));
        }
        gates.push_back(q);
    }
    return moe::MoeModel(d, experts, gates);
}

void ac6_moe_losses()
{
    testgen::Gen g(106);
    double affine_worst = 0.0;
    bool coupled_exact = true;
    for (int trial = 0; trial < 50; ++trial) {
        const moe::MoeModel m = random_moe(g, 2, 3);
        const Dataset d = testgen::noise_dataset(g, 2, 60);
        const double coup = moe::loss_coupled(m, d);
        const double comp = moe::loss_competitive(m, d);
        coupled_exact = coupled_exact && moe::loss_hybrid(m, d, 0.0) == coup;
        const double lambda = g.uniform(0.0, 5.0);
        const double scale = std::max({1.0, coup, comp});
        affine_worst = std::max(affine_worst, std::abs(moe::loss_hybrid(m, d, lambda) - (coup + lambda * comp)) / scale);
    }

    // Gates sharpen in proportion to input spread, so x0 spans ten units
    // around the regime boundary.
    const Dataset d = data::generate({data::Generator::PiecewiseLinear, 400, 0.0, 3, {{-4.5, 5.5}, {0.0, 1.0}}});
    moe::MoeModel start = moe::tsk_to_moe(anfis::lse_consequents(anfis::cluster_init(d, 2, 1), d));
    start = moe::MoeModel(2, start.experts(), {moe::AffineGate{{0.0, 0.0}, 0.0}, moe::AffineGate{{0.0, 0.0}, 0.0}});
    const moe::TrainResult r =
        moe::train_moe(start, d, moe::LossKind::Competitive, 0.0, {.epochs = 10000, .learning_rate = 0.1});
    const auto [left, right] = data::piecewise_regimes(2);
    double recovery = 0.0;
    for (const Affine& truth : {left, right}) {
        double best = 1e300;
        for (const Affine& e : r.model.experts())
            best = std::min(best, max_coefficient_error(truth, e));
        recovery = std::max(recovery, best);
    }
    report(6, affine_worst < kHybridTol && coupled_exact && recovery < kRecoveryTol,
           "hybrid loss is affine in lambda; competitive training recovers both regimes",
           fmt::format("affine rel gap {:.3g}, lambda=0 exact {}, coefficient error {:.3g}", affine_worst,
                       coupled_exact ? "yes" : "no", recovery));
}

void ac7_nozaki()
{
    const std::vector<std::vector<MembershipFunction>> grid{uniform_gaussian_partition({0.0, 1.0}, 3),
                                                             uniform_gaussian_partition({0.0, 1.0}, 4)};
    const Dataset one(2, {0.3, 0.9}, {4.25});
    bool single = true;
    for (const Rule& rule : stacking::nozaki_fit(one, grid, 2.0).model.rules())
        single = single && rule.consequent.constant()->value == 4.25;

    testgen::Gen g(107);
    Dataset same(2);
    double sum = 0.0;
    for (int i = 0; i < 40; ++i) {
        const double y = g.normal();
        sum += y;
        same.push_back(std::vector<double>{0.4, 0.6}, y);
    }
    const double mean = sum / 40.0;
    double mean_worst = 0.0;
    for (const Rule& rule : stacking::nozaki_fit(same, grid).model.rules())
        mean_worst = std::max(mean_worst, std::abs(rule.consequent.constant()->value - mean));

    bool bounded = true;
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset d = testgen::noise_dataset(g, 2, 50, 0.0, 1.0);
        const double lo = *std::min_element(d.targets().begin(), d.targets().end());
        const double hi = *std::max_element(d.targets().begin(), d.targets().end());
        for (const Rule& rule : stacking::nozaki_fit(d, grid, g.uniform(0.5, 4.0)).model.rules()) {
            const double c = rule.consequent.constant()->value;
            bounded = bounded && c >= lo && c <= hi;
        }
    }
    report(7, single && mean_worst < kNozakiMeanTol && bounded, "Nozaki consequents: one example, uniform firing, bounds",
           fmt::format("N=1 exact {}, uniform gap {:.3g}, bounded {}", single ? "yes" : "no", mean_worst,
                       bounded ? "yes" : "no"));
}

void ac8_local_rules()
{
    testgen::Gen g(108);
    double ols_worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset d = testgen::noise_dataset(g, 3, 40);
        const TskModel m = stacking::local_rule_fit(d, {Antecedent{}});
        const std::vector<double> ols = oracle::weighted_ols(d);
        const Affine a = *m.rule(0).consequent.affine();
        for (std::size_t i = 0; i < 3; ++i)
            ols_worst = std::max(ols_worst, std::abs(a.slopes[i] - ols[i]));
        ols_worst = std::max(ols_worst, std::abs(a.intercept - ols[3]));
    }

    const Affine line{{-0.6, 1.3}, 2.0};
    Dataset d(2);
    for (int i = 0; i < 300; ++i) {
        const std::vector<double> x = g.point(2);
        d.push_back(x, oracle::affine(line, x));
    }
    const TskModel shape = testgen::gaussian_tsk(g, 2, 8);
    std::vector<Antecedent> ants;
    for (const Rule& r : shape.rules())
        ants.push_back(r.antecedent);
    const TskModel fit = stacking::local_rule_fit(d, ants);
    double line_worst = 0.0;
    for (const Rule& r : fit.rules())
        line_worst = std::max(line_worst, max_coefficient_error(*r.consequent.affine(), line));
    report(8, ols_worst < kOlsTol && line_worst < kLineTol, "local rules match OLS and recover a global line",
           fmt::format("OLS gap {:.3g}, line error {:.3g} over {} rules", ols_worst, line_worst, fit.size()));
}

void ac9_stacking()
{
    const std::vector<std::size_t> idx = stacking::bootstrap_indices(10000, 1);
    const double unique = static_cast<double>(std::set<std::size_t>(idx.begin(), idx.end()).size()) / 10000.0;

    testgen::Gen g(109);
    double dominance = -1e300;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t dim = 1 + g.index(3);
        const Dataset data = testgen::noise_dataset(g, dim, 60);
        const std::vector<stacking::BaseModel> bases = stacking::fit_bases(data, 1 + g.index(8), trial);
        const stacking::StackModel s = stacking::fit_constant_stack(bases, data);
        double best = 1e300;
        for (const stacking::BaseModel& b : bases)
            best = std::min(best, model_mse(b, data));
        dominance = std::max(dominance, model_mse(s, data) - best);
    }

    data::DataSpec spec{data::Generator::PiecewiseLinear, 400, 0.0, 7, {{-4.5, 5.5}, {0.0, 1.0}}};
    const Dataset train = data::generate(spec);
    spec.seed = 8;
    const Dataset test = data::generate(spec);
    const auto [left, right] = data::piecewise_regimes(2);
    const std::vector<stacking::BaseModel> bases{{left.slopes, left.intercept, 0, 0.0},
                                                 {right.slopes, right.intercept, 0, 0.0}};
    const double constant = model_mse(stacking::fit_constant_stack(bases, train), test);
    const double adaptive = model_mse(stacking::fit_adaptive_stack(bases, train, {}), test);

    report(9, std::abs(unique - 0.632) < kBootstrapTol && dominance <= kDominanceTol && adaptive < constant,
           "bootstrap coverage, constant-stack dominance, adaptive beats constant",
           fmt::format("unique {:.4f}, worst excess {:.3g}, test mse adaptive {:.4g} vs constant {:.4g}", unique,
                       dominance, adaptive, constant));
}

void ac10_cart()
{
    const Dataset step = data::generate({data::Generator::Step, 101, 0.0, 0, {{0.0, 1.0}}, data::Layout::Grid});
    const cart::RegressionTree t = cart::fit_tree(step, 2);
    const double grid_step = 0.01;
    const double threshold_error = std::abs(t.node(0).threshold - 0.5);

    testgen::Gen g(110);
    double shortfall = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const Dataset d = testgen::noise_dataset(g, 3, 50);
        const cart::RegressionTree root = cart::fit_tree(d, 2);
        const oracle::Split best = oracle::best_split(d);
        const double chosen = oracle::split_reduction(d, root.node(0).feature, root.node(0).threshold);
        shortfall = std::max(shortfall, (best.reduction - chosen) / std::max(1.0, best.reduction));
    }
    report(10, t.leaf_count() == 2 && threshold_error <= grid_step && shortfall <= 1e-12,
           "step threshold recovered; root split exhaustively optimal",
           fmt::format("threshold {:.4f}, worst relative shortfall {:.3g}", t.node(0).threshold, shortfall));
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs one CLI pipeline inside `dir`; false if any step exits nonzero.
bool pipeline(const std::string& cli, const fs::path& dir)
{
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string c = quote(cli);
    const std::string at = quote(dir.string()) + "/";
    const std::vector<std::string> steps{
        c + " gen --generator sinc2d --n 150 --noise-sd 0.05 --seed 11 --out " + at + "data.csv",
        c + " train --method anfis --data " + at + "data.csv --mfs 3 --epochs 10 --seed 11 --test-fraction 0.2 --out " +
            at + "anfis.json --metrics " + at + "anfis_metrics.json --history " + at + "anfis_history.jsonl",
        c + " train --method moe --data " + at + "data.csv --experts 3 --epochs 50 --loss hybrid --seed 11 --out " + at +
            "moe.json --metrics " + at + "moe_metrics.json",
        c + " train --method fuzzy-cart --data " + at + "data.csv --max-leaves 8 --seed 11 --out " + at +
            "fcart.json --metrics " + at + "fcart_metrics.json",
        c + " train --method stack --data " + at + "data.csv --bases 4 --combiner adaptive --seed 11 --out " + at +
            "stack.json --metrics " + at + "stack_metrics.json",
        c + " predict --model " + at + "anfis.json --data " + at + "data.csv --out " + at + "pred.txt",
        c + " convert --model " + at + "anfis.json --to moe --out " + at + "converted.json",
        c + " verify --suite equivalence --trials 3 --points 200 --seed 11 --format json --out " + at + "verify.json",
        c + " inspect --model " + at + "fcart.json --out " + at + "rules.txt",
    };
    for (const std::string& s : steps)
        if (std::system((s + " > /dev/null 2>&1").c_str()) != 0) {
            fmt::print("  step failed: {}\n", s);
            return false;
        }
    return true;
}

void ac11_determinism(const std::string& cli, const fs::path& work)
{
    if (cli.empty()) {
        report(11, false, "CLI pipelines are byte-reproducible", "no --cli given");
        return;
    }
    const fs::path a = work / "run1";
    const fs::path b = work / "run2";
    const bool ran = pipeline(cli, a) && pipeline(cli, b);
    std::size_t files = 0;
    std::size_t differing = 0;
    if (ran)
        for (const auto& entry : fs::directory_iterator(a)) {
            ++files;
            if (slurp(entry.path()) != slurp(b / entry.path().filename()))
                ++differing;
        }
    report(11, ran && files > 0 && differing == 0, "CLI pipelines are byte-reproducible",
           fmt::format("{} files compared, {} differ", files, differing));
}

}  // namespace

int main(int argc, char** argv)
{
    std::string cli;
    fs::path work = fs::temp_directory_path() / "fuzzybridge_acceptance";
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--cli")
            cli = argv[i + 1];
        else if (flag == "--work")
            work = argv[i + 1];
        else {
            std::fprintf(stderr, "usage: acceptance --cli PATH --work DIR\n");
            return 2;
        }
    }

    ac1_rbfn();
    ac2_moe();
    ac3_fuzzy_tree();
    ac4_crisp_limit();
    ac5_anfis();
    ac6_moe_losses();
    ac7_nozaki();
    ac8_local_rules();
    ac9_stacking();
    ac10_cart();
    ac11_determinism(cli, work);

    fmt::print("{} of 11 criteria passed\n", 11 - failures);
    return failures == 0 ? 0 : 1;
}
