#include "fb/core/tsk.hpp"

#include <cmath>
#include <string>

#include "fb/common/error.hpp"

namespace fb {

double Consequent::evaluate(std::span<const double> x) const
{
    if (const auto* c = constant())
        return c->value;
    const Affine& a = *affine();
    if (a.slopes.size() != x.size())
        throw DataError("consequent: input has " + std::to_string(x.size()) + " features, slopes expect " +
                        std::to_string(a.slopes.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        sum += a.slopes[i] * x[i];
    return sum + a.intercept;
}

double Antecedent::log_firing(std::span<const double> x) const
{
    double sum = 0.0;
    for (const Clause& c : clauses) {
        if (c.feature >= x.size())
            throw DataError("antecedent: clause on feature " + std::to_string(c.feature) + " but input has " +
                            std::to_string(x.size()) + " features");
        sum += c.mf.log_grade(x[c.feature]);
    }
    return sum;
}

double Antecedent::firing(std::span<const double> x) const { return std::exp(log_firing(x)); }

bool Antecedent::covers_all_features(std::size_t dim) const
{
    std::vector<bool> seen(dim, false);
    for (const Clause& c : clauses)
        if (c.feature < dim)
            seen[c.feature] = true;
    for (bool s : seen)
        if (!s)
            return false;
    return true;
}

double firing_level(const Rule& rule, std::span<const double> x) { return rule.antecedent.firing(x); }

TskModel::TskModel(std::size_t input_dim, std::vector<Rule> rules, Aggregation aggregation)
    : input_dim_(input_dim), rules_(std::move(rules)), aggregation_(aggregation)
{
    if (input_dim_ == 0)
        throw InvalidArgument("tsk model: input dimension must be >= 1");
    if (rules_.empty())
        throw InvalidArgument("tsk model: needs at least one rule");
    for (std::size_t k = 0; k < rules_.size(); ++k) {
        const Rule& r = rules_[k];
        std::vector<bool> used(input_dim_, false);
        for (const Clause& c : r.antecedent.clauses) {
            if (c.feature >= input_dim_)
                throw InvalidArgument("tsk model: rule " + std::to_string(k) + " tests feature " +
                                      std::to_string(c.feature) + " >= input dimension " + std::to_string(input_dim_));
            if (used[c.feature] && !r.antecedent.path)
                throw InvalidArgument("tsk model: rule " + std::to_string(k) + " tests feature " +
                                      std::to_string(c.feature) + " more than once");
            used[c.feature] = true;
        }
        if (const auto* a = r.consequent.affine(); a && a->slopes.size() != input_dim_)
            throw InvalidArgument("tsk model: rule " + std::to_string(k) + " has " + std::to_string(a->slopes.size()) +
                                  " slopes for " + std::to_string(input_dim_) + " inputs");
    }
}

void TskModel::check_input(std::span<const double> x) const
{
    if (x.size() != input_dim_)
        throw DataError("tsk model: input has " + std::to_string(x.size()) + " features, model expects " +
                        std::to_string(input_dim_));
    for (double v : x)
        if (!std::isfinite(v))
            throw DataError("tsk model: non-finite input");
}

std::vector<double> TskModel::firings(std::span<const double> x) const
{
    check_input(x);
    std::vector<double> f;
    f.reserve(rules_.size());
    for (const Rule& r : rules_)
        f.push_back(r.antecedent.firing(x));
    return f;
}

std::vector<double> normalize_firings(std::vector<double> raw)
{
    double total = 0.0;
    for (double f : raw)
        total += f;
    const double k = static_cast<double>(raw.size());
    if (!(total >= kFiringEpsilon)) {
        for (double& f : raw)
            f = 1.0 / k;
        return raw;
    }
    for (double& f : raw)
        f /= total;
    return raw;
}

std::vector<double> TskModel::normalized_firings(std::span<const double> x) const { return normalize_firings(firings(x)); }

double TskModel::predict(std::span<const double> x) const
{
    const std::vector<double> weights =
        aggregation_ == Aggregation::WeightedAverage ? normalized_firings(x) : firings(x);
    double y = 0.0;
    for (std::size_t k = 0; k < rules_.size(); ++k)
        y += weights[k] * rules_[k].consequent.evaluate(x);
    return y;
}

std::vector<Antecedent> grid_antecedents(const std::vector<std::vector<MembershipFunction>>& per_feature,
                                         std::size_t rule_cap)
{
    if (per_feature.empty())
        throw InvalidArgument("grid: no features");
    std::size_t total = 1;
    for (const auto& mfs : per_feature) {
        if (mfs.empty())
            throw InvalidArgument("grid: feature with no membership functions");
        if (mfs.size() > rule_cap / total)
            throw InvalidArgument("grid: the full grid would exceed the rule cap of " + std::to_string(rule_cap) +
                                  " rules (rule count grows as p^d; use clustering or a tree to initialize instead)");
        total *= mfs.size();
    }
    std::vector<Antecedent> out;
    out.reserve(total);
    std::vector<std::size_t> digit(per_feature.size(), 0);
    for (std::size_t r = 0; r < total; ++r) {
        Antecedent a;
        for (std::size_t i = 0; i < per_feature.size(); ++i)
            a.clauses.push_back(Clause{i, per_feature[i][digit[i]]});
        out.push_back(std::move(a));
        for (std::size_t i = per_feature.size(); i-- > 0;) {
            if (++digit[i] < per_feature[i].size())
                break;
            digit[i] = 0;
        }
    }
    return out;
}

}  // namespace fb
