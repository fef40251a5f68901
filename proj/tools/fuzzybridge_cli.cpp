// fuzzybridge: generate data, train, convert, verify and inspect models.
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fuzzybridge/fuzzybridge.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitUsage = FB_ERR_INVALID_ARGUMENT;
constexpr int kExitData = FB_ERR_DATA;
constexpr int kExitModel = FB_ERR_MODEL;

// Carries an exit code up to main().
struct Failure {
    int code;
    std::string message;
};

void check(fb_status s)
{
    if (s != FB_OK)
        throw Failure{static_cast<int>(s), fb_last_error()};
}

struct DatasetFree {
    void operator()(fb_dataset* d) const { fb_dataset_free(d); }
};
struct ModelFree {
    void operator()(fb_model* m) const { fb_model_free(m); }
};
struct StringFree {
    void operator()(char* s) const { fb_string_free(s); }
};
using DatasetPtr = std::unique_ptr<fb_dataset, DatasetFree>;
using ModelPtr = std::unique_ptr<fb_model, ModelFree>;
using StringPtr = std::unique_ptr<char, StringFree>;

DatasetPtr load_dataset(const std::string& path)
{
    fb_dataset* d = nullptr;
    check(fb_dataset_load_csv(path.c_str(), &d));
    return DatasetPtr(d);
}

ModelPtr load_model(const std::string& path)
{
    fb_model* m = nullptr;
    check(fb_model_load(path.c_str(), &m));
    return ModelPtr(m);
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
        throw Failure{kExitData, "cannot write '" + path + "'"};
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Failure{kExitData, "cannot open '" + path + "'"};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

// --config FILE: each key=value line becomes --key=value placed before the
// user's own flags, so the command line wins under the take-last policy.
std::vector<std::string> expand_config(std::vector<std::string> args)
{
    std::vector<std::string> injected;
    for (std::size_t i = 0; i < args.size();) {
        std::string path;
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw Failure{kExitUsage, "--config needs a file argument"};
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
            continue;
        }
        std::istringstream lines(read_text(path));
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(lines, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
                throw Failure{kExitUsage, path + ":" + std::to_string(line_no) + ": expected key=value"};
            std::string key = trim(line.substr(0, eq));
            std::replace(key.begin(), key.end(), '_', '-');
            injected.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
        }
    }
    if (!injected.empty()) {
        // Right after the subcommand name.
        const auto at = args.empty() ? args.end() : args.begin() + 1;
        args.insert(at, injected.begin(), injected.end());
    }
    return args;
}

std::uint64_t default_seed()
{
    const char* env = std::getenv("FUZZY_BRIDGE_SEED");
    if (!env || !*env)
        return 0;
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc() || ptr != end)
        throw Failure{kExitUsage, std::string("FUZZY_BRIDGE_SEED is not a non-negative integer: '") + env + "'"};
    return v;
}

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    std::string model;
    std::string data;
    std::string format = "text";
};

void add_format(CLI::App* cmd, Common& c)
{
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "text"}));
}

void add_seed(CLI::App* cmd, Common& c)
{
    cmd->add_option("--seed", c.seed, "Random seed (default: $FUZZY_BRIDGE_SEED or 0)");
}

// ---- gen ----

struct GenArgs {
    std::string generator = "sinc2d";
    std::size_t n = 100;
    double noise_sd = 0.0;
    std::string layout = "random";
    std::string ranges;
};

int run_gen(const Common& c, const GenArgs& g)
{
    std::string spec = "generator=" + g.generator + "\nn=" + std::to_string(g.n) + "\nseed=" + std::to_string(c.seed) +
                       "\nlayout=" + g.layout + "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", g.noise_sd);
    spec += std::string("noise_sd=") + buf + "\n";
    if (!g.ranges.empty())
        spec += "ranges=" + g.ranges + "\n";
    fb_dataset* raw = nullptr;
    check(fb_dataset_generate(spec.c_str(), &raw));
    const DatasetPtr data(raw);
    if (c.out.empty() || c.out == "-") {
        char* csv = nullptr;
        check(fb_dataset_to_csv(data.get(), &csv));
        const StringPtr owned(csv);
        std::cout << csv;
        return 0;
    }
    check(fb_dataset_save_csv(data.get(), c.out.c_str()));
    if (c.format == "json")
        std::cout << Json{{"out", c.out}, {"n", fb_dataset_size(data.get())}, {"dim", fb_dataset_dim(data.get())}}.dump(2)
                  << "\n";
    else
        std::cout << "wrote " << fb_dataset_size(data.get()) << " rows (" << fb_dataset_dim(data.get())
                  << " features) to " << c.out << "\n";
    return 0;
}

// ---- train ----

struct TrainArgs {
    std::string method;
    std::string test;
    double test_fraction = 0.0;
    std::string metrics;
    std::string history;
    Json options = Json::object();
};

// Method settings only enter the options object when given, so a method can
// reject settings that do not apply to it.
void add_train_options(CLI::App* cmd, TrainArgs& t, std::vector<std::function<void()>>& collect)
{
    auto num = [&](const char* flag, const char* key, const char* help) {
        auto value = std::make_shared<double>(0.0);
        CLI::Option* o = cmd->add_option(flag, *value, help);
        collect.push_back([o, value, key, &t] {
            if (o->count())
                t.options[key] = *value;
        });
    };
    auto count = [&](const char* flag, const char* key, const char* help) {
        auto value = std::make_shared<std::size_t>(0);
        CLI::Option* o = cmd->add_option(flag, *value, help);
        collect.push_back([o, value, key, &t] {
            if (o->count())
                t.options[key] = *value;
        });
    };
    auto text = [&](const char* flag, const char* key, const char* help, std::vector<std::string> allowed) {
        auto value = std::make_shared<std::string>();
        CLI::Option* o = cmd->add_option(flag, *value, help)->check(CLI::IsMember(allowed));
        collect.push_back([o, value, key, &t] {
            if (o->count())
                t.options[key] = *value;
        });
    };
    auto flag = [&](const char* name, const char* key, const char* help) {
        auto value = std::make_shared<bool>(false);
        CLI::Option* o = cmd->add_flag(name, *value, help);
        collect.push_back([o, value, key, &t] {
            if (o->count())
                t.options[key] = *value;
        });
    };
    count("--epochs", "epochs", "Training epochs (anfis, moe, adaptive stack)");
    num("--learning-rate", "learning_rate", "Gradient step size");
    num("--ridge-jitter", "ridge_jitter", "Diagonal jitter for rank-deficient least squares");
    text("--init", "init", "Rule initialisation (anfis, local-rules)", {"grid", "cluster"});
    count("--mfs", "mfs", "Membership functions per input for grid partitions");
    count("--rules", "rules", "Rules for cluster initialisation");
    count("--rule-cap", "rule_cap", "Largest grid rule base accepted");
    count("--experts", "experts", "Number of experts (moe)");
    text("--loss", "loss", "Mixture loss (moe)", {"competitive", "coupled", "hybrid"});
    num("--lambda", "lambda", "Weight of the competitive term in the hybrid loss");
    text("--gates", "gates", "Gate family (moe)", {"quadratic", "affine"});
    count("--max-leaves", "max_leaves", "Leaf budget (cart, fuzzy-cart)");
    count("--min-leaf", "min_leaf", "Smallest leaf (cart, fuzzy-cart)");
    num("--steepness", "steepness", "Fixed sigmoid steepness (fuzzy-cart)");
    num("--steepness-factor", "steepness_factor", "Steepness = factor / threshold gap (fuzzy-cart)");
    flag("--affine", "affine", "Refit fuzzy-cart leaves as affine consequents");
    count("--bases", "bases", "Number of bootstrap base models (stack)");
    num("--ridge", "ridge", "Ridge penalty of the base fits (stack)");
    text("--combiner", "combiner", "Stack combiner", {"constant", "adaptive"});
    num("--alpha", "alpha", "Nozaki sharpening exponent");

    auto sweep = std::make_shared<std::string>();
    CLI::Option* so = cmd->add_option("--lambda-sweep", *sweep, "Comma-separated lambda values to sweep (moe)");
    collect.push_back([so, sweep, &t] {
        if (!so->count())
            return;
        Json values = Json::array();
        std::stringstream ss(*sweep);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
            if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
                throw Failure{kExitUsage, "--lambda-sweep: not a number: '" + item + "'"};
            values.push_back(v);
        }
        t.options["lambda_sweep"] = std::move(values);
    });
}

int run_train(const Common& c, TrainArgs& t)
{
    const DatasetPtr all = load_dataset(c.data);
    DatasetPtr train_set;
    DatasetPtr test_set;
    if (!t.test.empty()) {
        if (t.test_fraction > 0.0)
            throw Failure{kExitUsage, "--test and --test-fraction are mutually exclusive"};
        test_set = load_dataset(t.test);
    } else if (t.test_fraction > 0.0) {
        fb_dataset* tr = nullptr;
        fb_dataset* te = nullptr;
        check(fb_dataset_split(all.get(), t.test_fraction, c.seed, &tr, &te));
        train_set.reset(tr);
        test_set.reset(te);
    }
    const fb_dataset* train = train_set ? train_set.get() : all.get();

    t.options["seed"] = c.seed;
    const std::string options = t.options.dump();
    fb_model* raw = nullptr;
    char* metrics_raw = nullptr;
    char* history_raw = nullptr;
    check(fb_train(t.method.c_str(), train, test_set.get(), options.c_str(), &raw, &metrics_raw, &history_raw));
    const ModelPtr model(raw);
    const StringPtr metrics(metrics_raw);
    const StringPtr history(history_raw);

    check(fb_model_save(model.get(), c.out.c_str()));
    if (!t.history.empty())
        write_text(t.history, history.get());
    if (!t.metrics.empty())
        write_text(t.metrics, metrics.get());
    if (c.format == "json") {
        if (t.metrics.empty())
            std::cout << metrics.get();
        return 0;
    }
    const Json m = Json::parse(metrics.get());
    std::cout << "method " << t.method << ": " << m["model_type"].get<std::string>() << " model written to " << c.out
              << "\n";
    std::cout << "train_mse " << number(m["train_mse"].get<double>()) << " on " << m["n_train"].get<std::size_t>()
              << " examples\n";
    if (!m["test_mse"].is_null())
        std::cout << "test_mse  " << number(m["test_mse"].get<double>()) << " on " << m["n_test"].get<std::size_t>()
                  << " examples\n";
    return 0;
}

// ---- predict / eval ----

int run_predict(const Common& c)
{
    const ModelPtr model = load_model(c.model);
    const DatasetPtr data = load_dataset(c.data);
    std::vector<double> y(fb_dataset_size(data.get()));
    check(fb_model_predict_dataset(model.get(), data.get(), y.data()));
    std::string text;
    if (c.format == "json") {
        text = Json{{"predictions", y}}.dump(2) + "\n";
    } else {
        text = "prediction\n";
        char buf[32];
        for (double v : y) {
            std::snprintf(buf, sizeof buf, "%.17g\n", v);
            text += buf;
        }
    }
    write_text(c.out, text);
    return 0;
}

int run_eval(const Common& c)
{
    const ModelPtr model = load_model(c.model);
    const DatasetPtr data = load_dataset(c.data);
    double mse = 0.0;
    check(fb_model_mse(model.get(), data.get(), &mse));
    std::string text;
    if (c.format == "json")
        text = Json{{"model_type", fb_model_kind(model.get())}, {"n", fb_dataset_size(data.get())}, {"mse", mse}}.dump(2) +
               "\n";
    else
        text = "mse " + number(mse) + " on " + std::to_string(fb_dataset_size(data.get())) + " examples\n";
    write_text(c.out, text);
    return 0;
}

// ---- convert ----

struct ConvertArgs {
    std::string from;
    std::string to;
    bool generalized = false;
};

int run_convert(const Common& c, const ConvertArgs& a)
{
    const ModelPtr model = load_model(c.model);
    const std::string kind = fb_model_kind(model.get());
    if (!a.from.empty() && a.from != (kind == "fuzzy_tree" ? "fuzzy-cart" : kind))
        throw Failure{kExitUsage, "--from " + a.from + " does not match the model file, which holds a " + kind + " model"};
    if (a.generalized && a.to != "rbfn")
        throw Failure{kExitUsage, "--generalized only applies to --to rbfn"};
    const std::string target = a.generalized ? "generalized-rbfn" : a.to;
    fb_model* raw = nullptr;
    check(fb_model_convert(model.get(), target.c_str(), &raw));
    const ModelPtr converted(raw);
    char* json = nullptr;
    check(fb_model_to_json(converted.get(), &json));
    const StringPtr owned(json);
    write_text(c.out, json);
    return 0;
}

// ---- verify ----

struct VerifyArgs {
    std::string suite;
    std::size_t trials = 20;
    std::optional<double> tol;
    std::size_t points = 1000;
};

int run_verify(const Common& c, const VerifyArgs& v)
{
    ModelPtr model;
    DatasetPtr data;
    if (!c.model.empty())
        model = load_model(c.model);
    if (!c.data.empty())
        data = load_dataset(c.data);
    Json options{{"trials", v.trials}, {"seed", c.seed}, {"points", v.points}};
    if (v.tol)
        options["tol"] = *v.tol;
    char* json = nullptr;
    char* text = nullptr;
    int passed = 0;
    check(fb_verify(v.suite.c_str(), options.dump().c_str(), model.get(), data.get(), &json, &text, &passed));
    const StringPtr json_owned(json);
    const StringPtr text_owned(text);
    write_text(c.out, c.format == "json" ? json : text);
    if (!passed)
        std::cerr << "verify: at least one check exceeded its tolerance\n";
    return passed ? 0 : kExitModel;
}

// ---- inspect ----

int run_inspect(const Common& c)
{
    const ModelPtr model = load_model(c.model);
    char* raw = nullptr;
    check(fb_model_describe(model.get(), &raw));
    const StringPtr lines(raw);
    if (c.format != "json") {
        write_text(c.out, lines.get());
        return 0;
    }
    Json rules = Json::array();
    std::istringstream in(lines.get());
    std::string line;
    while (std::getline(in, line))
        rules.push_back(line);
    write_text(c.out, Json{{"type", fb_model_kind(model.get())}, {"rules", rules}}.dump(2) + "\n");
    return 0;
}

int run(std::vector<std::string> args)
{
    args = expand_config(std::move(args));

    CLI::App app{"fuzzybridge: TSK fuzzy systems and their RBFN, mixture-of-experts, tree and stacking equivalents"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", fb_version());
    app.footer("Every subcommand also accepts --config FILE with key=value lines (flags on the command line win).\n"
               "Exit codes: 0 ok, 2 invalid arguments, 3 data error, 4 constraint or numerical failure.");

    Common common;
    common.seed = default_seed();

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset as CSV");
    gen_cmd->add_option("--generator", gen.generator, "Generator")
        ->check(CLI::IsMember({"sinc2d", "friedman1", "piecewise_linear", "step"}));
    gen_cmd->add_option("--n", gen.n, "Number of examples");
    gen_cmd->add_option("--noise-sd", gen.noise_sd, "Standard deviation of additive Gaussian noise");
    gen_cmd->add_option("--layout", gen.layout, "Input layout")->check(CLI::IsMember({"random", "grid"}));
    gen_cmd->add_option("--ranges", gen.ranges, "Input box as lo:hi,lo:hi,...");
    gen_cmd->add_option("--out", common.out, "Output CSV (default: stdout)");
    add_seed(gen_cmd, common);
    add_format(gen_cmd, common);

    TrainArgs train;
    std::vector<std::function<void()>> collect;
    CLI::App* train_cmd = app.add_subcommand("train", "Train a model");
    train_cmd->add_option("--method", train.method, "Training method")
        ->required()
        ->check(CLI::IsMember({"anfis", "moe", "cart", "fuzzy-cart", "stack", "nozaki", "local-rules"}));
    train_cmd->add_option("--data", common.data, "Training CSV")->required();
    train_cmd->add_option("--test", train.test, "Held-out CSV");
    train_cmd->add_option("--test-fraction", train.test_fraction, "Hold out this fraction of --data (seeded)")
        ->check(CLI::Range(0.0, 0.999999));
    train_cmd->add_option("--out", common.out, "Model JSON to write")->required();
    train_cmd->add_option("--metrics", train.metrics, "Metrics JSON to write (default: summary on stdout)");
    train_cmd->add_option("--history", train.history, "Per-epoch history as JSON lines");
    add_train_options(train_cmd, train, collect);
    add_seed(train_cmd, common);
    add_format(train_cmd, common);

    CLI::App* predict_cmd = app.add_subcommand("predict", "Predict every row of a CSV (its target column is ignored)");
    predict_cmd->add_option("--model", common.model, "Model JSON")->required();
    predict_cmd->add_option("--data", common.data, "Input CSV")->required();
    predict_cmd->add_option("--out", common.out, "Output file (default: stdout)");
    add_format(predict_cmd, common);

    CLI::App* eval_cmd = app.add_subcommand("eval", "Mean squared error of a model on a CSV");
    eval_cmd->add_option("--model", common.model, "Model JSON")->required();
    eval_cmd->add_option("--data", common.data, "Evaluation CSV")->required();
    eval_cmd->add_option("--out", common.out, "Output file (default: stdout)");
    add_format(eval_cmd, common);

    ConvertArgs conv;
    CLI::App* convert_cmd = app.add_subcommand("convert", "Convert between equivalent model forms");
    convert_cmd->add_option("--model", common.model, "Model JSON")->required();
    convert_cmd->add_option("--from", conv.from, "Expected source form")
        ->check(CLI::IsMember({"tsk", "rbfn", "moe", "fuzzy-cart"}));
    convert_cmd->add_option("--to", conv.to, "Target form")->required()->check(CLI::IsMember({"tsk", "rbfn", "moe"}));
    convert_cmd->add_flag("--generalized", conv.generalized, "Use the generalized RBFN (per-feature widths, partial rules)");
    convert_cmd->add_option("--out", common.out, "Output model JSON (default: stdout)");

    VerifyArgs ver;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Run a randomized verification suite");
    verify_cmd->add_option("--suite", ver.suite, "Suite")
        ->required()
        ->check(CLI::IsMember({"equivalence", "gradients", "oracles"}));
    verify_cmd->add_option("--trials", ver.trials, "Random trials")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--tol", ver.tol, "Tolerance (default: 1e-10, gradients 1e-4)");
    verify_cmd->add_option("--points", ver.points, "Random inputs per paired evaluation")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--model", common.model, "Check this model instead of random fixtures");
    verify_cmd->add_option("--data", common.data, "Draw inputs from this CSV's bounding box");
    verify_cmd->add_option("--out", common.out, "Report file (default: stdout)");
    add_seed(verify_cmd, common);
    add_format(verify_cmd, common);

    CLI::App* inspect_cmd = app.add_subcommand("inspect", "List the rules of a model");
    inspect_cmd->add_option("--model", common.model, "Model JSON")->required();
    inspect_cmd->add_option("--out", common.out, "Output file (default: stdout)");
    add_format(inspect_cmd, common);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    if (gen_cmd->parsed())
        return run_gen(common, gen);
    if (train_cmd->parsed()) {
        for (auto& f : collect)
            f();
        return run_train(common, train);
    }
    if (predict_cmd->parsed())
        return run_predict(common);
    if (eval_cmd->parsed())
        return run_eval(common);
    if (convert_cmd->parsed())
        return run_convert(common, conv);
    if (verify_cmd->parsed())
        return run_verify(common, ver);
    return run_inspect(common);
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        return run(std::vector<std::string>(argv + 1, argv + argc));
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return FB_ERR_INTERNAL;
    }
}
