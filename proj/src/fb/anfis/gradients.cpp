#include <cmath>
#include <string>

#include "fb/anfis/anfis.hpp"
#include "fb/common/error.hpp"

namespace fb::anfis {
namespace {

void require_gaussian(const TskModel& model)
{
    for (std::size_t k = 0; k < model.size(); ++k)
        for (const Clause& c : model.rule(k).antecedent.clauses)
            if (!c.mf.is_gaussian())
                throw ModelError("antecedent gradients: rule " + std::to_string(k) +
                                 " has a non-Gaussian membership function (unsupported MF)");
}

}  // namespace

double squared_error(const TskModel& model, const Dataset& data)
{
    double sum = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) {
        const double r = data.target(n) - model.predict(data.row(n));
        sum += r * r;
    }
    return sum;
}

AntecedentGradient antecedent_gradients(const TskModel& model, const Dataset& data)
{
    require_gaussian(model);
    if (data.dim() != model.input_dim())
        throw DataError("antecedent gradients: dataset dimension does not match the model");

    const std::size_t rules = model.size();
    AntecedentGradient grad(rules);
    for (std::size_t k = 0; k < rules; ++k)
        grad[k].assign(model.rule(k).antecedent.clauses.size(), ClauseGradient{});

    std::vector<double> firing(rules);
    std::vector<double> local(rules);
    std::vector<double> sensitivity(rules);  // d y / d log f_k
    for (std::size_t n = 0; n < data.size(); ++n) {
        const auto x = data.row(n);
        double total = 0.0;
        for (std::size_t k = 0; k < rules; ++k) {
            firing[k] = model.rule(k).antecedent.firing(x);
            local[k] = model.rule(k).consequent.evaluate(x);
            total += firing[k];
        }

        double y_hat = 0.0;
        if (model.aggregation() == Aggregation::WeightedAverage) {
            if (!(total >= kFiringEpsilon))
                continue;  // uniform fallback is locally constant
            for (std::size_t k = 0; k < rules; ++k)
                y_hat += firing[k] / total * local[k];
            for (std::size_t k = 0; k < rules; ++k)
                sensitivity[k] = firing[k] / total * (local[k] - y_hat);
        } else {
            for (std::size_t k = 0; k < rules; ++k)
                y_hat += firing[k] * local[k];
            for (std::size_t k = 0; k < rules; ++k)
                sensitivity[k] = firing[k] * local[k];
        }

        const double scale = -2.0 * (data.target(n) - y_hat);
        for (std::size_t k = 0; k < rules; ++k) {
            const double upstream = scale * sensitivity[k];
            if (upstream == 0.0)
                continue;
            const auto& clauses = model.rule(k).antecedent.clauses;
            for (std::size_t j = 0; j < clauses.size(); ++j) {
                const Gaussian& g = *clauses[j].mf.gaussian();
                const double u = x[clauses[j].feature] - g.center;
                const double s2 = g.width * g.width;
                grad[k][j].center += upstream * u / s2;
                grad[k][j].width += upstream * u * u / (s2 * g.width);
            }
        }
    }
    return grad;
}

std::vector<double> antecedent_parameters(const TskModel& model)
{
    require_gaussian(model);
    std::vector<double> out;
    for (const Rule& r : model.rules())
        for (const Clause& c : r.antecedent.clauses) {
            out.push_back(c.mf.gaussian()->center);
            out.push_back(c.mf.gaussian()->width);
        }
    return out;
}

TskModel with_antecedent_parameters(const TskModel& model, std::span<const double> params)
{
    require_gaussian(model);
    std::vector<Rule> rules = model.rules();
    std::size_t p = 0;
    for (Rule& r : rules)
        for (Clause& c : r.antecedent.clauses) {
            if (p + 2 > params.size())
                throw InvalidArgument("with_antecedent_parameters: too few parameters");
            c.mf = Gaussian{params[p], params[p + 1]};
            p += 2;
        }
    if (p != params.size())
        throw InvalidArgument("with_antecedent_parameters: too many parameters");
    return TskModel(model.input_dim(), std::move(rules), model.aggregation());
}

std::vector<double> flatten(const AntecedentGradient& gradient)
{
    std::vector<double> out;
    for (const auto& rule : gradient)
        for (const ClauseGradient& g : rule) {
            out.push_back(g.center);
            out.push_back(g.width);
        }
    return out;
}

}  // namespace fb::anfis
