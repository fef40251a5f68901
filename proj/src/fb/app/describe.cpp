#include <fmt/format.h>

#include "fb/app/app.hpp"

namespace fb::app {

namespace {

std::string num(double v) { return fmt::format("{:.4g}", v); }

std::string mf_text(const MembershipFunction& mf)
{
    const MembershipFunction::Shape& s = mf.shape();
    if (const auto* g = std::get_if<Gaussian>(&s))
        return fmt::format("gaussian(c={}, sigma={})", num(g->center), num(g->width));
    if (const auto* u = std::get_if<SigmoidUp>(&s))
        return fmt::format("sigmoid_up(alpha={}, t={})", num(u->steepness), num(u->threshold));
    const auto& d = std::get<SigmoidDown>(s);
    return fmt::format("sigmoid_down(alpha={}, t={})", num(d.steepness), num(d.threshold));
}

// "3", "0.5*x0 - 2*x1 + 3"
std::string affine_text(const std::vector<double>& slopes, double intercept)
{
    std::string out;
    for (std::size_t i = 0; i < slopes.size(); ++i) {
        if (slopes[i] == 0.0)
            continue;
        if (out.empty())
            out = fmt::format("{}*x{}", num(slopes[i]), i);
        else
            out += fmt::format(" {} {}*x{}", slopes[i] < 0 ? '-' : '+', num(std::abs(slopes[i])), i);
    }
    if (out.empty())
        return num(intercept);
    if (intercept != 0.0)
        out += fmt::format(" {} {}", intercept < 0 ? '-' : '+', num(std::abs(intercept)));
    return out;
}

std::string consequent_text(const Consequent& c)
{
    if (const Affine* a = c.affine())
        return affine_text(a->slopes, a->intercept);
    return num(c.constant()->value);
}

std::string antecedent_text(const Antecedent& a)
{
    if (a.clauses.empty())
        return "TRUE";
    std::string out;
    for (const Clause& c : a.clauses) {
        if (!out.empty())
            out += " AND ";
        out += fmt::format("x{} is {}", c.feature, mf_text(c.mf));
    }
    return out;
}

std::vector<std::string> tsk_lines(const TskModel& m)
{
    std::vector<std::string> out;
    for (std::size_t k = 0; k < m.size(); ++k)
        out.push_back(fmt::format("R{}: IF {} THEN y = {}", k + 1, antecedent_text(m.rule(k).antecedent),
                                  consequent_text(m.rule(k).consequent)));
    return out;
}

std::string list(const std::vector<double>& v)
{
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? ", " : "") + num(v[i]);
    return out + "]";
}

std::vector<std::string> rbfn_lines(const rbfn::RbfnModel& m)
{
    std::vector<std::string> out;
    for (std::size_t k = 0; k < m.units().size(); ++k) {
        const rbfn::RbfUnit& u = m.units()[k];
        std::string field;
        for (std::size_t j = 0; j < u.features.size(); ++j)
            field += fmt::format("{}x{}: c={} w={}", j ? ", " : "", u.features[j], num(u.centers[j]), num(u.width(j)));
        out.push_back(fmt::format("U{}: {{{}}} -> y = {}", k + 1, field.empty() ? "constant" : field,
                                  consequent_text(u.output)));
    }
    return out;
}

std::vector<std::string> moe_lines(const moe::MoeModel& m)
{
    std::vector<std::string> out;
    for (std::size_t k = 0; k < m.size(); ++k) {
        std::string gate;
        if (const auto* q = std::get_if<moe::QuadraticGate>(&m.gates()[k]))
            gate = fmt::format("quadratic(c={}, sigma={})", list(q->centers), list(q->widths));
        else {
            const auto& a = std::get<moe::AffineGate>(m.gates()[k]);
            gate = fmt::format("affine({})", affine_text(a.weights, a.bias));
        }
        out.push_back(fmt::format("E{}: gate {} THEN y = {}", k + 1, gate,
                                  affine_text(m.experts()[k].slopes, m.experts()[k].intercept)));
    }
    return out;
}

std::vector<std::string> tree_lines(const cart::RegressionTree& t)
{
    std::vector<std::string> out;
    std::size_t k = 0;
    for (const cart::CrispRule& r : cart::extract_crisp_rules(t)) {
        std::string tests;
        for (const cart::SplitTest& s : r.tests)
            tests += fmt::format("{}x{} {} {}", tests.empty() ? "" : " AND ", s.feature, s.below ? "<" : ">=",
                                 num(s.threshold));
        out.push_back(fmt::format("R{}: IF {} THEN y = {}", ++k, tests.empty() ? "TRUE" : tests,
                                  consequent_text(r.value)));
    }
    return out;
}

std::vector<std::string> stack_lines(const stacking::StackModel& m)
{
    std::vector<std::string> out;
    for (std::size_t k = 0; k < m.bases().size(); ++k) {
        const stacking::BaseModel& b = m.bases()[k];
        std::string weight;
        if (const auto* c = std::get_if<stacking::ConstantWeights>(&m.combiner()))
            weight = "weight " + num(c->weights[k]);
        else {
            const auto& g = std::get<stacking::AdaptiveGates>(m.combiner()).gates[k];
            weight = "gate affine(" + affine_text(g.weights, g.bias) + ")";
        }
        out.push_back(fmt::format("B{}: {} THEN y = {}", k + 1, weight, affine_text(b.slopes, b.intercept)));
    }
    if (const auto* c = std::get_if<stacking::ConstantWeights>(&m.combiner()))
        out.push_back("intercept " + num(c->intercept));
    return out;
}

}  // namespace

std::vector<std::string> describe(const AnyModel& model)
{
    if (const auto* m = std::get_if<TskModel>(&model))
        return tsk_lines(*m);
    if (const auto* m = std::get_if<rbfn::RbfnModel>(&model))
        return rbfn_lines(*m);
    if (const auto* m = std::get_if<moe::MoeModel>(&model))
        return moe_lines(*m);
    if (const auto* m = std::get_if<cart::RegressionTree>(&model))
        return tree_lines(*m);
    if (const auto* m = std::get_if<cart::FuzzyRegressionTree>(&model))
        return tsk_lines(cart::fuzzy_tree_to_tsk(*m));
    return stack_lines(std::get<stacking::StackModel>(model));
}

}  // namespace fb::app
