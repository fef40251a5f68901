#include "fb/moe/moe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fb/common/error.hpp"

namespace fb::moe {

double gate_value(const GateFunction& gate, std::span<const double> x)
{
    if (const auto* q = std::get_if<QuadraticGate>(&gate)) {
        double v = 0.0;
        for (std::size_t i = 0; i < q->centers.size(); ++i) {
            const double u = x[i] - q->centers[i];
            v -= u * u / (2.0 * q->widths[i] * q->widths[i]);
        }
        return v;
    }
    const auto& a = std::get<AffineGate>(gate);
    double v = 0.0;
    for (std::size_t i = 0; i < a.weights.size(); ++i)
        v += a.weights[i] * x[i];
    return v + a.bias;
}

std::vector<double> softmax(std::span<const double> values)
{
    if (values.empty())
        return {};
    const double top = *std::max_element(values.begin(), values.end());
    std::vector<double> out(values.size());
    double total = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        out[k] = std::exp(values[k] - top);
        total += out[k];
    }
    for (double& w : out)
        w /= total;
    return out;
}

MoeModel::MoeModel(std::size_t input_dim, std::vector<Affine> experts, std::vector<GateFunction> gates)
    : input_dim_(input_dim), experts_(std::move(experts)), gates_(std::move(gates))
{
    if (input_dim_ == 0)
        throw InvalidArgument("moe: input dimension must be >= 1");
    if (experts_.empty())
        throw InvalidArgument("moe: needs at least one expert");
    if (experts_.size() != gates_.size())
        throw InvalidArgument("moe: " + std::to_string(experts_.size()) + " experts but " +
                              std::to_string(gates_.size()) + " gates");
    for (std::size_t k = 0; k < experts_.size(); ++k) {
        const std::string where = "moe: expert " + std::to_string(k);
        if (experts_[k].slopes.size() != input_dim_)
            throw InvalidArgument(where + " has the wrong number of slopes");
        for (double s : experts_[k].slopes)
            if (!std::isfinite(s))
                throw InvalidArgument(where + " has a non-finite coefficient");
        if (!std::isfinite(experts_[k].intercept))
            throw InvalidArgument(where + " has a non-finite coefficient");
        if (const auto* q = std::get_if<QuadraticGate>(&gates_[k])) {
            if (q->centers.size() != input_dim_ || q->widths.size() != input_dim_)
                throw InvalidArgument("moe: gate " + std::to_string(k) + " has the wrong dimension");
            for (std::size_t i = 0; i < input_dim_; ++i)
                if (!std::isfinite(q->centers[i]) || !(q->widths[i] > 0.0) || !std::isfinite(q->widths[i]))
                    throw InvalidArgument("moe: gate " + std::to_string(k) + " needs finite centers and widths > 0");
        } else {
            const auto& a = std::get<AffineGate>(gates_[k]);
            if (a.weights.size() != input_dim_)
                throw InvalidArgument("moe: gate " + std::to_string(k) + " has the wrong dimension");
            for (double w : a.weights)
                if (!std::isfinite(w))
                    throw InvalidArgument("moe: gate " + std::to_string(k) + " has a non-finite weight");
            if (!std::isfinite(a.bias))
                throw InvalidArgument("moe: gate " + std::to_string(k) + " has a non-finite bias");
        }
    }
}

void MoeModel::check_input(std::span<const double> x) const
{
    if (x.size() != input_dim_)
        throw DataError("moe: input has " + std::to_string(x.size()) + " features, model expects " +
                        std::to_string(input_dim_));
    for (double v : x)
        if (!std::isfinite(v))
            throw DataError("moe: non-finite input");
}

std::vector<double> MoeModel::gate_values(std::span<const double> x) const
{
    check_input(x);
    std::vector<double> v;
    v.reserve(gates_.size());
    for (const GateFunction& g : gates_)
        v.push_back(gate_value(g, x));
    return v;
}

std::vector<double> MoeModel::gate_weights(std::span<const double> x) const { return softmax(gate_values(x)); }

double MoeModel::expert_output(std::size_t k, std::span<const double> x) const
{
    const Affine& e = experts_[k];
    double y = 0.0;
    for (std::size_t i = 0; i < input_dim_; ++i)
        y += e.slopes[i] * x[i];
    return y + e.intercept;
}

double MoeModel::predict(std::span<const double> x) const
{
    const std::vector<double> g = gate_weights(x);
    double y = 0.0;
    for (std::size_t k = 0; k < experts_.size(); ++k)
        y += g[k] * expert_output(k, x);
    return y;
}

double loss_competitive(const MoeModel& model, const Dataset& data)
{
    double sum = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) {
        const auto x = data.row(n);
        const std::vector<double> g = model.gate_weights(x);
        for (std::size_t k = 0; k < model.size(); ++k) {
            const double e = data.target(n) - model.expert_output(k, x);
            sum += g[k] * e * e;
        }
    }
    return sum;
}

double loss_coupled(const MoeModel& model, const Dataset& data)
{
    double sum = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) {
        const double r = data.target(n) - model.predict(data.row(n));
        sum += r * r;
    }
    return sum;
}

double loss_hybrid(const MoeModel& model, const Dataset& data, double lambda)
{
    if (!(lambda >= 0.0))
        throw InvalidArgument("hybrid loss: lambda must be >= 0");
    return loss_coupled(model, data) + lambda * loss_competitive(model, data);
}

double loss(const MoeModel& model, const Dataset& data, LossKind kind, double lambda)
{
    switch (kind) {
    case LossKind::Competitive:
        return loss_competitive(model, data);
    case LossKind::Coupled:
        return loss_coupled(model, data);
    case LossKind::Hybrid:
        return loss_hybrid(model, data, lambda);
    }
    return 0.0;
}

double expert_usage_entropy(const MoeModel& model, const Dataset& data)
{
    if (data.empty())
        throw DataError("expert usage entropy: empty dataset");
    std::vector<double> usage(model.size(), 0.0);
    for (std::size_t n = 0; n < data.size(); ++n) {
        const std::vector<double> g = model.gate_weights(data.row(n));
        for (std::size_t k = 0; k < g.size(); ++k)
            usage[k] += g[k];
    }
    double h = 0.0;
    for (double u : usage) {
        const double p = u / static_cast<double>(data.size());
        if (p > 0.0)
            h -= p * std::log(p);
    }
    return h;
}

}  // namespace fb::moe
