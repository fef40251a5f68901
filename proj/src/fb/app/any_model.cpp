#include <fstream>
#include <sstream>

#include "fb/app/app.hpp"
#include "fb/common/error.hpp"

namespace fb::app {

namespace {

template <class... F>
struct Overload : F... {
    using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

}  // namespace

std::string model_kind(const AnyModel& model)
{
    return std::visit(Overload{[](const TskModel&) { return "tsk"; }, [](const rbfn::RbfnModel&) { return "rbfn"; },
                               [](const moe::MoeModel&) { return "moe"; },
                               [](const cart::RegressionTree&) { return "tree"; },
                               [](const cart::FuzzyRegressionTree&) { return "fuzzy_tree"; },
                               [](const stacking::StackModel&) { return "stack"; }},
                      model);
}

std::size_t input_dim(const AnyModel& model)
{
    return std::visit(Overload{[](const cart::FuzzyRegressionTree& m) { return m.tree().input_dim(); },
                               [](const auto& m) { return m.input_dim(); }},
                      model);
}

Json model_to_json(const AnyModel& model)
{
    return std::visit(Overload{[](const TskModel& m) { return fb::to_json(m); },
                               [](const rbfn::RbfnModel& m) { return rbfn::to_json(m); },
                               [](const moe::MoeModel& m) { return moe::to_json(m); },
                               [](const cart::RegressionTree& m) { return cart::to_json(m); },
                               [](const cart::FuzzyRegressionTree& m) { return cart::to_json(m); },
                               [](const stacking::StackModel& m) { return stacking::to_json(m); }},
                      model);
}

AnyModel model_from_json(const Json& j)
{
    if (!j.is_object())
        throw DataError("model file: expected a JSON object");
    const Json& type = require_field(j, "type");
    if (type == "tsk")
        return tsk_from_json(j);
    if (type == "rbfn")
        return rbfn::rbfn_from_json(j);
    if (type == "moe")
        return moe::moe_from_json(j);
    if (type == "tree")
        return cart::tree_from_json(j);
    if (type == "fuzzy_tree")
        return cart::fuzzy_tree_from_json(j);
    if (type == "stack")
        return stacking::stack_from_json(j);
    throw DataError("model file: unknown model type " + type.dump());
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(std::string_view text, std::string_view source)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw DataError(std::string(source) + ": invalid JSON: " + e.what());
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write '" + path + "'");
    out << contents;
    if (!out)
        throw DataError("failed writing '" + path + "'");
}

AnyModel load_model(const std::string& path)
{
    try {
        return model_from_json(parse_json(read_file(path), path));
    } catch (const Json::exception& e) {
        throw DataError(path + ": malformed model: " + e.what());
    }
}

void save_model(const std::string& path, const AnyModel& model) { write_file(path, dump_json(model_to_json(model))); }

double predict(const AnyModel& model, std::span<const double> x)
{
    return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

std::vector<double> predict(const AnyModel& model, const Dataset& data)
{
    if (data.dim() != input_dim(model))
        throw DataError("dataset has " + std::to_string(data.dim()) + " features, model expects " +
                        std::to_string(input_dim(model)));
    return std::visit([&](const auto& m) { return batch_predict(m, data); }, model);
}

namespace {

TskModel as_tsk(const AnyModel& model)
{
    if (const auto* m = std::get_if<TskModel>(&model))
        return *m;
    if (const auto* m = std::get_if<rbfn::RbfnModel>(&model))
        return rbfn::rbfn_to_tsk(*m);
    if (const auto* m = std::get_if<moe::MoeModel>(&model))
        return moe::moe_to_tsk(*m);
    if (const auto* m = std::get_if<cart::FuzzyRegressionTree>(&model))
        return cart::fuzzy_tree_to_tsk(*m);
    throw InvalidArgument("a " + model_kind(model) + " model has no exact tsk form" +
                          (std::holds_alternative<cart::RegressionTree>(model) ? " (fuzzify the tree first)" : ""));
}

}  // namespace

AnyModel convert(const AnyModel& model, std::string_view target)
{
    if (target == "tsk")
        return as_tsk(model);
    if (target == "rbfn") {
        if (std::holds_alternative<rbfn::RbfnModel>(model))
            return model;
        return rbfn::tsk_to_rbfn(as_tsk(model));
    }
    if (target == "generalized-rbfn")
        return rbfn::generalized_tsk_rbfn(as_tsk(model));
    if (target == "moe") {
        if (std::holds_alternative<moe::MoeModel>(model))
            return model;
        if (const auto* s = std::get_if<stacking::StackModel>(&model))
            return stacking::as_mixture(*s);
        return moe::tsk_to_moe(as_tsk(model));
    }
    throw InvalidArgument("unknown conversion target '" + std::string(target) +
                          "' (expected tsk, rbfn, generalized-rbfn or moe)");
}

}  // namespace fb::app
