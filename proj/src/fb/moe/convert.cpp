#include <string>

#include "fb/common/error.hpp"
#include "fb/moe/moe.hpp"

namespace fb::moe {

MoeModel tsk_to_moe(const TskModel& model)
{
    const std::size_t d = model.input_dim();
    if (model.aggregation() != Aggregation::WeightedAverage)
        throw ModelError("tsk -> moe: the fuzzy system must use weighted-average aggregation");
    std::vector<Affine> experts;
    std::vector<GateFunction> gates;
    for (std::size_t k = 0; k < model.size(); ++k) {
        const Rule& r = model.rule(k);
        const std::string rule = "tsk -> moe: rule " + std::to_string(k);
        const Affine* a = r.consequent.affine();
        if (!a)
            throw ModelError(rule + " has a constant consequent; experts must be affine");
        QuadraticGate gate{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
        std::vector<bool> seen(d, false);
        for (const Clause& c : r.antecedent.clauses) {
            const Gaussian* g = c.mf.gaussian();
            if (!g)
                throw ModelError(rule + " uses a non-Gaussian membership function on x" + std::to_string(c.feature) +
                                 " (equivalence needs Gaussian MFs and the product t-norm)");
            if (seen[c.feature])
                throw ModelError(rule + " tests x" + std::to_string(c.feature) + " more than once");
            seen[c.feature] = true;
            gate.centers[c.feature] = g->center;
            gate.widths[c.feature] = g->width;
        }
        for (std::size_t i = 0; i < d; ++i)
            if (!seen[i])
                throw ModelError(rule + " has no membership function on x" + std::to_string(i) +
                                 " (a full antecedent is required)");
        experts.push_back(*a);
        gates.emplace_back(std::move(gate));
    }
    return MoeModel(d, std::move(experts), std::move(gates));
}

TskModel moe_to_tsk(const MoeModel& model)
{
    std::vector<Rule> rules;
    for (std::size_t k = 0; k < model.size(); ++k) {
        const auto* q = std::get_if<QuadraticGate>(&model.gates()[k]);
        if (!q)
            throw ModelError("moe -> tsk: gate " + std::to_string(k) +
                             " is affine; only quadratic (Gaussian) gates have a fuzzy-rule image");
        Antecedent a;
        for (std::size_t i = 0; i < model.input_dim(); ++i)
            a.clauses.push_back(Clause{i, Gaussian{q->centers[i], q->widths[i]}});
        rules.push_back(Rule{std::move(a), model.experts()[k]});
    }
    return TskModel(model.input_dim(), std::move(rules), Aggregation::WeightedAverage);
}

}  // namespace fb::moe
