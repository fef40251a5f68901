#include "fb/core/io.hpp"

#include <cmath>
#include <string>

#include "fb/common/error.hpp"

namespace fb {

const Json& require_field(const Json& j, const char* name)
{
    if (!j.is_object() || !j.contains(name))
        throw DataError(std::string("model json: missing field '") + name + "'");
    return j.at(name);
}

double require_number(const Json& j, const char* name)
{
    const Json& v = require_field(j, name);
    if (!v.is_number())
        throw DataError(std::string("model json: field '") + name + "' must be a number");
    return v.get<double>();
}

std::size_t require_index(const Json& j, const char* name)
{
    const Json& v = require_field(j, name);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw DataError(std::string("model json: field '") + name + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

std::vector<double> number_array(const Json& j, const char* what)
{
    if (!j.is_array())
        throw DataError(std::string("model json: '") + what + "' must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const Json& v : j) {
        if (!v.is_number())
            throw DataError(std::string("model json: '") + what + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Json mf_to_json(const MembershipFunction& mf)
{
    struct Visitor {
        Json operator()(const Gaussian& g) const { return Json{{"kind", "gaussian"}, {"params", {g.center, g.width}}}; }
        Json operator()(const SigmoidUp& s) const
        {
            return Json{{"kind", "sigmoid_up"}, {"params", {s.steepness, s.threshold}}};
        }
        Json operator()(const SigmoidDown& s) const
        {
            return Json{{"kind", "sigmoid_down"}, {"params", {s.steepness, s.threshold}}};
        }
    };
    return std::visit(Visitor{}, mf.shape());
}

MembershipFunction mf_from_json(const Json& j)
{
    const Json& kind_field = require_field(j, "kind");
    if (!kind_field.is_string())
        throw DataError("model json: membership 'kind' must be a string");
    const std::string kind = kind_field.get<std::string>();
    const std::vector<double> p = number_array(require_field(j, "params"), "params");
    if (p.size() != 2)
        throw DataError("model json: membership function '" + kind + "' takes 2 params");
    try {
        if (kind == "gaussian")
            return Gaussian{p[0], p[1]};
        if (kind == "sigmoid_up")
            return SigmoidUp{p[0], p[1]};
        if (kind == "sigmoid_down")
            return SigmoidDown{p[0], p[1]};
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("model json: ") + e.what());
    }
    throw DataError("model json: unknown membership kind '" + kind + "'");
}

Json consequent_to_json(const Consequent& c)
{
    if (const auto* k = c.constant())
        return Json{{"kind", "constant"}, {"params", {k->value}}};
    const Affine& a = *c.affine();
    Json params = Json::array();
    for (double s : a.slopes)
        params.push_back(s);
    params.push_back(a.intercept);
    return Json{{"kind", "affine"}, {"params", params}};
}

Consequent consequent_from_json(const Json& j, std::size_t input_dim)
{
    const Json& kind_field = require_field(j, "kind");
    if (!kind_field.is_string())
        throw DataError("model json: consequent 'kind' must be a string");
    const std::string kind = kind_field.get<std::string>();
    std::vector<double> p = number_array(require_field(j, "params"), "params");
    if (kind == "constant") {
        if (p.size() != 1)
            throw DataError("model json: constant consequent takes 1 param");
        return Constant{p[0]};
    }
    if (kind == "affine") {
        if (p.size() != input_dim + 1)
            throw DataError("model json: affine consequent takes " + std::to_string(input_dim + 1) + " params");
        const double intercept = p.back();
        p.pop_back();
        return Affine{std::move(p), intercept};
    }
    throw DataError("model json: unknown consequent kind '" + kind + "'");
}

Json to_json(const TskModel& model)
{
    Json rules = Json::array();
    for (const Rule& r : model.rules()) {
        Json clauses = Json::array();
        for (const Clause& c : r.antecedent.clauses) {
            Json mf = mf_to_json(c.mf);
            clauses.push_back(Json{{"feature", c.feature}, {"kind", mf["kind"]}, {"params", mf["params"]}});
        }
        Json rule{{"clauses", clauses}};
        if (r.antecedent.path)
            rule["path"] = true;
        rule["consequent"] = consequent_to_json(r.consequent);
        rules.push_back(std::move(rule));
    }
    return Json{{"type", "tsk"},
                {"input_dim", model.input_dim()},
                {"aggregation", model.aggregation() == Aggregation::WeightedAverage ? "weighted_average" : "weighted_sum"},
                {"rules", rules}};
}

TskModel tsk_from_json(const Json& j)
{
    if (j.contains("type") && j["type"] != "tsk")
        throw DataError("model json: expected a tsk model");
    const std::size_t d = require_index(j, "input_dim");
    Aggregation agg = Aggregation::WeightedAverage;
    if (j.contains("aggregation")) {
        const Json& a = j["aggregation"];
        if (a == "weighted_average")
            agg = Aggregation::WeightedAverage;
        else if (a == "weighted_sum")
            agg = Aggregation::WeightedSum;
        else
            throw DataError("model json: aggregation must be weighted_average or weighted_sum");
    }
    const Json& rules_json = require_field(j, "rules");
    if (!rules_json.is_array())
        throw DataError("model json: 'rules' must be an array");
    std::vector<Rule> rules;
    for (const Json& rj : rules_json) {
        Antecedent ante;
        const Json& clauses = require_field(rj, "clauses");
        if (!clauses.is_array())
            throw DataError("model json: 'clauses' must be an array");
        for (const Json& cj : clauses)
            ante.clauses.push_back(Clause{require_index(cj, "feature"), mf_from_json(cj)});
        if (rj.contains("path"))
            ante.path = rj["path"].is_boolean() && rj["path"].get<bool>();
        rules.push_back(Rule{std::move(ante), consequent_from_json(require_field(rj, "consequent"), d)});
    }
    try {
        return TskModel(d, std::move(rules), agg);
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("model json: ") + e.what());
    }
}

}  // namespace fb
