#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "fb/anfis/anfis.hpp"
#include "fb/app/app.hpp"
#include "fb/common/error.hpp"

namespace fb::app {

namespace {

// Typed access to the options object; every key read is remembered so that
// finish() can reject the rest as unknown.
class OptionReader {
public:
    OptionReader(const Json& options, std::string_view method) : options_(options), method_(method)
    {
        if (!options_.is_null() && !options_.is_object())
            throw InvalidArgument("train options must be a JSON object");
    }

    const Json* find(const char* key)
    {
        used_.insert(key);
        if (options_.is_null() || !options_.contains(key) || options_[key].is_null())
            return nullptr;
        return &options_[key];
    }

    double number(const char* key, double fallback)
    {
        const Json* v = find(key);
        if (!v)
            return fallback;
        if (!v->is_number() || !std::isfinite(v->get<double>()))
            throw InvalidArgument(std::string("option '") + key + "' must be a finite number");
        return v->get<double>();
    }

    std::size_t count(const char* key, std::size_t fallback)
    {
        const Json* v = find(key);
        if (!v)
            return fallback;
        if (!v->is_number_unsigned())
            throw InvalidArgument(std::string("option '") + key + "' must be a non-negative integer");
        return v->get<std::size_t>();
    }

    std::uint64_t seed()
    {
        const Json* v = find("seed");
        if (!v)
            return 0;
        if (!v->is_number_unsigned())
            throw InvalidArgument("option 'seed' must be a non-negative integer");
        return v->get<std::uint64_t>();
    }

    bool flag(const char* key, bool fallback)
    {
        const Json* v = find(key);
        if (!v)
            return fallback;
        if (!v->is_boolean())
            throw InvalidArgument(std::string("option '") + key + "' must be true or false");
        return v->get<bool>();
    }

    std::string choice(const char* key, std::string fallback, std::initializer_list<const char*> allowed)
    {
        const Json* v = find(key);
        if (!v)
            return fallback;
        if (v->is_string())
            for (const char* a : allowed)
                if (v->get<std::string>() == a)
                    return a;
        std::string names;
        for (const char* a : allowed)
            names += (names.empty() ? "" : ", ") + std::string(a);
        throw InvalidArgument(std::string("option '") + key + "' must be one of: " + names);
    }

    std::vector<double> numbers(const char* key)
    {
        const Json* v = find(key);
        if (!v)
            return {};
        if (!v->is_array())
            throw InvalidArgument(std::string("option '") + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const Json& e : *v) {
            if (!e.is_number())
                throw InvalidArgument(std::string("option '") + key + "' must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    void finish() const
    {
        if (options_.is_null())
            return;
        for (const auto& item : options_.items())
            if (!used_.count(item.key()))
                throw InvalidArgument("option '" + item.key() + "' is not recognised by method " + std::string(method_));
    }

private:
    const Json& options_;
    std::string_view method_;
    std::set<std::string> used_;
};

Json optional_number(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> test_mse(const AnyModel& model, const Dataset& test)
{
    if (test.empty())
        return std::nullopt;
    return mse(predict(model, test), test.targets());
}

std::vector<FeatureRange> observed_ranges(const Dataset& data)
{
    std::vector<FeatureRange> r(data.dim(), FeatureRange{std::numeric_limits<double>::infinity(),
                                                         -std::numeric_limits<double>::infinity()});
    for (std::size_t n = 0; n < data.size(); ++n)
        for (std::size_t i = 0; i < data.dim(); ++i) {
            r[i].lo = std::min(r[i].lo, data.row(n)[i]);
            r[i].hi = std::max(r[i].hi, data.row(n)[i]);
        }
    for (FeatureRange& f : r)
        if (!(f.lo < f.hi))
            f = FeatureRange{f.lo - 0.5, f.lo + 0.5};
    return r;
}

std::vector<Antecedent> antecedents_of(const TskModel& m)
{
    std::vector<Antecedent> out;
    for (const Rule& r : m.rules())
        out.push_back(r.antecedent);
    return out;
}

TskModel initial_tsk(OptionReader& opt, const Dataset& train, std::uint64_t seed, std::size_t default_mfs)
{
    const std::string init = opt.choice("init", "grid", {"grid", "cluster"});
    const std::size_t mfs = opt.count("mfs", default_mfs);
    const std::size_t rules = opt.count("rules", 8);
    const std::size_t cap = opt.count("rule_cap", anfis::kDefaultRuleCap);
    if (init == "cluster")
        return anfis::cluster_init(train, rules, seed);
    const std::vector<FeatureRange> ranges = observed_ranges(train);
    return anfis::grid_init(train.dim(), mfs, ranges, &train, cap);
}

TrainOutcome finish(AnyModel model, Json extra, TrainHistory history, std::string_view method, std::uint64_t seed,
                    const Dataset& train, const Dataset& test)
{
    Json m;
    m["method"] = method;
    m["seed"] = seed;
    m["input_dim"] = train.dim();
    m["n_train"] = train.size();
    m["n_test"] = test.size();
    m["model_type"] = model_kind(model);
    m["train_mse"] = mse(predict(model, train), train.targets());
    m["test_mse"] = optional_number(test_mse(model, test));
    for (auto& item : extra.items())
        m[item.key()] = item.value();
    return TrainOutcome{std::move(model), std::move(m), std::move(history)};
}

TrainOutcome train_anfis(OptionReader& opt, const Dataset& train, const Dataset& test, std::uint64_t seed)
{
    const TskModel start = initial_tsk(opt, train, seed, 3);
    anfis::TrainConfig config;
    config.epochs = opt.count("epochs", config.epochs);
    config.learning_rate = opt.number("learning_rate", config.learning_rate);
    config.ridge_jitter = opt.number("ridge_jitter", config.ridge_jitter);
    config.seed = seed;
    opt.finish();
    anfis::TrainResult r = anfis::hybrid_train(start, train, config, test.empty() ? nullptr : &test);
    Json extra;
    extra["rules"] = r.model.size();
    extra["epochs"] = config.epochs;
    extra["learning_rate"] = config.learning_rate;
    return finish(std::move(r.model), std::move(extra), std::move(r.history), "anfis", seed, train, test);
}

moe::LossKind loss_kind(const std::string& name)
{
    if (name == "competitive")
        return moe::LossKind::Competitive;
    if (name == "coupled")
        return moe::LossKind::Coupled;
    return moe::LossKind::Hybrid;
}

TrainOutcome train_moe(OptionReader& opt, const Dataset& train, const Dataset& test, std::uint64_t seed)
{
    const std::size_t experts = opt.count("experts", 4);
    const std::string loss = opt.choice("loss", "hybrid", {"competitive", "coupled", "hybrid"});
    const double lambda = opt.number("lambda", moe::kDefaultLambda);
    const std::vector<double> sweep = opt.numbers("lambda_sweep");
    const std::string gates = opt.choice("gates", "quadratic", {"quadratic", "affine"});
    moe::TrainConfig config;
    config.epochs = opt.count("epochs", config.epochs);
    config.learning_rate = opt.number("learning_rate", config.learning_rate);
    config.seed = seed;
    opt.finish();
    if (lambda < 0.0)
        throw InvalidArgument("lambda must be >= 0");
    for (double l : sweep)
        if (!(l >= 0.0))
            throw InvalidArgument("every lambda in the sweep must be >= 0");

    // Quadratic gates start from k-means rules with least-squares experts;
    // affine gates start flat over the same experts.
    moe::MoeModel start = moe::tsk_to_moe(anfis::lse_consequents(anfis::cluster_init(train, experts, seed), train));
    if (gates == "affine") {
        std::vector<moe::GateFunction> flat(start.size(), moe::AffineGate{std::vector<double>(train.dim(), 0.0), 0.0});
        start = moe::MoeModel(train.dim(), start.experts(), std::move(flat));
    }
    const Dataset* validation = test.empty() ? nullptr : &test;
    const moe::LossKind kind = loss_kind(loss);

    Json sweep_json = Json::array();
    for (double l : sweep) {
        const moe::TrainResult r = moe::train_moe(start, train, kind, l, config, validation);
        Json e;
        e["lambda"] = l;
        e["final_train_mse"] = model_mse(r.model, train);
        e["final_test_mse"] = test.empty() ? Json(nullptr) : Json(model_mse(r.model, test));
        e["expert_usage_entropy"] = moe::expert_usage_entropy(r.model, train);
        sweep_json.push_back(std::move(e));
    }
    moe::TrainResult r = moe::train_moe(start, train, kind, lambda, config, validation);
    Json extra;
    extra["experts"] = experts;
    extra["gates"] = gates;
    extra["loss"] = loss;
    extra["lambda"] = lambda;
    extra["epochs"] = config.epochs;
    extra["learning_rate"] = config.learning_rate;
    extra["expert_usage_entropy"] = moe::expert_usage_entropy(r.model, train);
    if (!sweep.empty())
        extra["lambda_sweep"] = std::move(sweep_json);
    return finish(std::move(r.model), std::move(extra), std::move(r.history), "moe", seed, train, test);
}

TrainOutcome train_cart(OptionReader& opt, const Dataset& train, const Dataset& test, std::uint64_t seed, bool fuzzy)
{
    const std::size_t max_leaves = opt.count("max_leaves", 8);
    const std::size_t min_leaf = opt.count("min_leaf", 1);
    if (!fuzzy) {
        opt.finish();
        cart::RegressionTree tree = cart::fit_tree(train, max_leaves, min_leaf);
        Json extra;
        extra["leaves"] = tree.leaf_count();
        return finish(std::move(tree), std::move(extra), {}, "cart", seed, train, test);
    }
    const double factor = opt.number("steepness_factor", 8.0);
    const double fixed = opt.number("steepness", 0.0);
    const bool affine = opt.flag("affine", false);
    const double jitter = opt.number("ridge_jitter", anfis::kDefaultRidgeJitter);
    opt.finish();
    if (fixed < 0.0)
        throw InvalidArgument("option 'steepness' must be > 0");
    const cart::SteepnessPolicy policy =
        fixed > 0.0 ? cart::SteepnessPolicy::fixed(fixed) : cart::SteepnessPolicy::gap_scaled(factor);
    cart::FuzzyRegressionTree ftree = cart::fuzzify_tree(cart::fit_tree(train, max_leaves, min_leaf), policy);
    Json extra;
    extra["leaves"] = ftree.tree().leaf_count();
    extra["affine"] = affine;
    if (affine) {
        TskModel refined = anfis::lse_consequents(cart::fuzzy_tree_to_tsk(ftree, true), train, jitter);
        return finish(std::move(refined), std::move(extra), {}, "fuzzy-cart", seed, train, test);
    }
    return finish(std::move(ftree), std::move(extra), {}, "fuzzy-cart", seed, train, test);
}

TrainOutcome train_stack(OptionReader& opt, const Dataset& train, const Dataset& test, std::uint64_t seed)
{
    const std::size_t count = opt.count("bases", 10);
    const double ridge = opt.number("ridge", stacking::kDefaultRidge);
    const std::string combiner = opt.choice("combiner", "constant", {"constant", "adaptive"});
    stacking::AdaptiveConfig config;
    config.epochs = opt.count("epochs", config.epochs);
    config.learning_rate = opt.number("learning_rate", config.learning_rate);
    config.seed = seed;
    opt.finish();

    std::vector<stacking::BaseModel> bases = stacking::fit_bases(train, count, seed, ridge);
    Json bases_json = Json::array();
    for (const stacking::BaseModel& b : bases) {
        std::vector<double> coeffs = b.slopes;
        coeffs.push_back(b.intercept);
        bases_json.push_back(Json{{"seed", b.seed},
                                  {"coeffs", coeffs},
                                  {"train_mse", model_mse(b, train)}});
    }
    TrainHistory history;
    stacking::StackModel model = combiner == "adaptive"
                                     ? stacking::fit_adaptive_stack(std::move(bases), train, config, &history)
                                     : stacking::fit_constant_stack(std::move(bases), train, ridge);
    Json extra;
    extra["bases"] = std::move(bases_json);
    extra["combiner"] = combiner;
    extra["stack_train_mse"] = model_mse(model, train);
    extra["stack_test_mse"] = optional_number(test.empty() ? std::nullopt : std::optional(model_mse(model, test)));
    return finish(std::move(model), std::move(extra), std::move(history), "stack", seed, train, test);
}

TrainOutcome train_nozaki(OptionReader& opt, const Dataset& train, const Dataset& test, std::uint64_t seed)
{
    const std::size_t mfs = opt.count("mfs", 3);
    const double alpha = opt.number("alpha", 1.0);
    opt.finish();
    if (mfs == 0)
        throw InvalidArgument("option 'mfs' must be >= 1");
    std::vector<std::vector<MembershipFunction>> grid;
    for (const FeatureRange& r : observed_ranges(train))
        grid.push_back(uniform_gaussian_partition(r, mfs));
    stacking::NozakiResult r = stacking::nozaki_fit(train, grid, alpha);
    Json extra;
    extra["rules"] = r.model.size();
    extra["alpha"] = alpha;
    extra["empty_cells"] = r.empty_cells;
    if (!r.empty_cells.empty())
        extra["warning"] = std::to_string(r.empty_cells.size()) +
                           " grid cells received no firing weight; their consequent is the global target mean";
    return finish(std::move(r.model), std::move(extra), {}, "nozaki", seed, train, test);
}

TrainOutcome train_local(OptionReader& opt, const Dataset& train, const Dataset& test, std::uint64_t seed)
{
    const TskModel start = initial_tsk(opt, train, seed, 2);
    opt.finish();
    TskModel model = stacking::local_rule_fit(train, antecedents_of(start));
    Json extra;
    extra["rules"] = model.size();
    return finish(std::move(model), std::move(extra), {}, "local-rules", seed, train, test);
}

}  // namespace

TrainOutcome train(std::string_view method, const Dataset& train, const Dataset& test, const Json& options)
{
    if (train.empty())
        throw DataError("training set is empty");
    if (!test.empty() && test.dim() != train.dim())
        throw DataError("test set dimension differs from the training set");
    OptionReader opt(options, method);
    const std::uint64_t seed = opt.seed();
    if (method == "anfis")
        return train_anfis(opt, train, test, seed);
    if (method == "moe")
        return train_moe(opt, train, test, seed);
    if (method == "cart")
        return train_cart(opt, train, test, seed, false);
    if (method == "fuzzy-cart")
        return train_cart(opt, train, test, seed, true);
    if (method == "stack")
        return train_stack(opt, train, test, seed);
    if (method == "nozaki")
        return train_nozaki(opt, train, test, seed);
    if (method == "local-rules")
        return train_local(opt, train, test, seed);
    throw InvalidArgument("unknown method '" + std::string(method) +
                          "' (expected anfis, moe, cart, fuzzy-cart, stack, nozaki or local-rules)");
}

}  // namespace fb::app
