#include <cmath>
#include <numbers>
#include <string>

#include "fb/common/error.hpp"
#include "fb/rbfn/rbfn.hpp"

namespace fb::rbfn {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

std::string join(const std::vector<std::string>& parts)
{
    std::string out;
    for (const std::string& p : parts) {
        if (!out.empty())
            out += "; ";
        out += p;
    }
    return out;
}

std::vector<std::string> generalized_violations(const TskModel& model)
{
    std::vector<std::string> out;
    for (std::size_t k = 0; k < model.size(); ++k) {
        const Antecedent& a = model.rule(k).antecedent;
        for (const Clause& c : a.clauses)
            if (!c.mf.is_gaussian()) {
                out.push_back("constraint (2) violated: rule " + std::to_string(k) +
                              ": non-Gaussian membership function on x" + std::to_string(c.feature));
                break;
            }
        if (a.path) {
            std::vector<bool> seen(model.input_dim(), false);
            for (const Clause& c : a.clauses) {
                if (seen[c.feature]) {
                    out.push_back("constraint (2) violated: rule " + std::to_string(k) + ": feature x" +
                                  std::to_string(c.feature) + " carries more than one membership function");
                    break;
                }
                seen[c.feature] = true;
            }
        }
    }
    return out;
}

RbfUnit unit_from_rule(const Rule& rule, bool shared)
{
    RbfUnit u{{}, {}, 0.0, rule.consequent};
    std::vector<double> widths;
    for (const Clause& c : rule.antecedent.clauses) {
        const Gaussian& g = *c.mf.gaussian();
        u.features.push_back(c.feature);
        u.centers.push_back(g.center);
        widths.push_back(g.width * kSqrt2);
    }
    if (shared && !widths.empty())
        u.widths = widths.front();
    else
        u.widths = std::move(widths);
    return u;
}

}  // namespace

std::vector<std::string> standard_rbfn_violations(const TskModel& model)
{
    std::vector<std::string> out;
    const std::size_t d = model.input_dim();
    for (std::size_t k = 0; k < model.size(); ++k) {
        const Rule& r = model.rule(k);
        const std::string rule = "rule " + std::to_string(k);
        if (!r.consequent.constant())
            out.push_back("constraint (2) violated: " + rule + ": consequent is a function of the inputs, not a constant");

        const auto& clauses = r.antecedent.clauses;
        bool gaussian = true;
        for (const Clause& c : clauses)
            if (!c.mf.is_gaussian()) {
                out.push_back("constraint (3) violated: " + rule + ": non-Gaussian membership function on x" +
                              std::to_string(c.feature));
                gaussian = false;
                break;
            }
        if (!r.antecedent.covers_all_features(d) || clauses.size() != d)
            out.push_back("constraint (3) violated: " + rule +
                          ": antecedent does not hold exactly one Gaussian for every input");
        if (gaussian && !clauses.empty()) {
            const double w = clauses.front().mf.gaussian()->width;
            for (const Clause& c : clauses)
                if (c.mf.gaussian()->width != w) {
                    out.push_back("constraint (3) violated: " + rule + ": widths differ across features");
                    break;
                }
        }
    }
    return out;
}

RbfnModel tsk_to_rbfn(const TskModel& model)
{
    const std::vector<std::string> problems = standard_rbfn_violations(model);
    if (!problems.empty())
        throw ModelError("tsk -> rbfn: " + join(problems));
    std::vector<RbfUnit> units;
    for (const Rule& r : model.rules())
        units.push_back(unit_from_rule(r, true));
    return RbfnModel(model.input_dim(), std::move(units), model.aggregation() == Aggregation::WeightedAverage);
}

RbfnModel generalized_tsk_rbfn(const TskModel& model)
{
    const std::vector<std::string> problems = generalized_violations(model);
    if (!problems.empty())
        throw ModelError("tsk -> generalized rbfn: " + join(problems));
    std::vector<RbfUnit> units;
    for (const Rule& r : model.rules())
        units.push_back(unit_from_rule(r, false));
    return RbfnModel(model.input_dim(), std::move(units), model.aggregation() == Aggregation::WeightedAverage);
}

TskModel rbfn_to_tsk(const RbfnModel& model)
{
    std::vector<Rule> rules;
    for (const RbfUnit& u : model.units()) {
        Antecedent a;
        for (std::size_t j = 0; j < u.features.size(); ++j)
            a.clauses.push_back(Clause{u.features[j], Gaussian{u.centers[j], u.width(j) / kSqrt2}});
        rules.push_back(Rule{std::move(a), u.output});
    }
    return TskModel(model.input_dim(), std::move(rules),
                    model.normalized() ? Aggregation::WeightedAverage : Aggregation::WeightedSum);
}

}  // namespace fb::rbfn
