#include <cmath>
#include <string>

#include "fb/common/error.hpp"
#include "fb/moe/moe.hpp"

namespace fb::moe {
namespace {

std::size_t gate_parameter_count(const GateFunction& g)
{
    if (const auto* q = std::get_if<QuadraticGate>(&g))
        return 2 * q->centers.size();
    return std::get<AffineGate>(g).weights.size() + 1;
}

}  // namespace

std::size_t expert_parameter_count(const MoeModel& model) { return model.size() * (model.input_dim() + 1); }

std::vector<double> parameters(const MoeModel& model)
{
    std::vector<double> p;
    for (const Affine& e : model.experts()) {
        p.insert(p.end(), e.slopes.begin(), e.slopes.end());
        p.push_back(e.intercept);
    }
    for (const GateFunction& g : model.gates()) {
        if (const auto* q = std::get_if<QuadraticGate>(&g)) {
            p.insert(p.end(), q->centers.begin(), q->centers.end());
            p.insert(p.end(), q->widths.begin(), q->widths.end());
        } else {
            const auto& a = std::get<AffineGate>(g);
            p.insert(p.end(), a.weights.begin(), a.weights.end());
            p.push_back(a.bias);
        }
    }
    return p;
}

MoeModel with_parameters(const MoeModel& model, std::span<const double> params)
{
    const std::size_t d = model.input_dim();
    std::size_t expected = expert_parameter_count(model);
    for (const GateFunction& g : model.gates())
        expected += gate_parameter_count(g);
    if (params.size() != expected)
        throw InvalidArgument("moe: expected " + std::to_string(expected) + " parameters, got " +
                              std::to_string(params.size()));

    std::size_t p = 0;
    auto take = [&](std::size_t count) {
        std::vector<double> v(params.begin() + static_cast<std::ptrdiff_t>(p),
                              params.begin() + static_cast<std::ptrdiff_t>(p + count));
        p += count;
        return v;
    };
    std::vector<Affine> experts;
    for (std::size_t k = 0; k < model.size(); ++k) {
        Affine e{take(d), 0.0};
        e.intercept = params[p++];
        experts.push_back(std::move(e));
    }
    std::vector<GateFunction> gates;
    for (const GateFunction& g : model.gates()) {
        if (std::holds_alternative<QuadraticGate>(g)) {
            QuadraticGate q;
            q.centers = take(d);
            q.widths = take(d);
            gates.emplace_back(std::move(q));
        } else {
            AffineGate a{take(d), 0.0};
            a.bias = params[p++];
            gates.emplace_back(std::move(a));
        }
    }
    return MoeModel(d, std::move(experts), std::move(gates));
}

std::vector<double> loss_gradient(const MoeModel& model, const Dataset& data, LossKind kind, double lambda)
{
    if (kind == LossKind::Hybrid && !(lambda >= 0.0))
        throw InvalidArgument("hybrid loss: lambda must be >= 0");
    if (data.dim() != model.input_dim())
        throw DataError("moe gradient: dataset dimension does not match the model");

    const std::size_t d = model.input_dim();
    const std::size_t experts = model.size();
    const double coupled_weight = kind == LossKind::Competitive ? 0.0 : 1.0;
    const double competitive_weight = kind == LossKind::Coupled ? 0.0 : (kind == LossKind::Hybrid ? lambda : 1.0);

    std::vector<double> grad(parameters(model).size(), 0.0);
    std::vector<std::size_t> gate_offset(experts);
    {
        std::size_t offset = expert_parameter_count(model);
        for (std::size_t k = 0; k < experts; ++k) {
            gate_offset[k] = offset;
            offset += gate_parameter_count(model.gates()[k]);
        }
    }

    std::vector<double> local(experts);
    std::vector<double> d_expert(experts);
    std::vector<double> d_gate(experts);
    for (std::size_t n = 0; n < data.size(); ++n) {
        const auto x = data.row(n);
        const double y = data.target(n);
        const std::vector<double> g = model.gate_weights(x);
        double y_hat = 0.0;
        double mean_sq = 0.0;
        for (std::size_t k = 0; k < experts; ++k) {
            local[k] = model.expert_output(k, x);
            y_hat += g[k] * local[k];
            const double e = y - local[k];
            mean_sq += g[k] * e * e;
        }
        const double r = y - y_hat;
        for (std::size_t k = 0; k < experts; ++k) {
            const double e = y - local[k];
            d_expert[k] = coupled_weight * (-2.0 * r * g[k]) + competitive_weight * (-2.0 * g[k] * e);
            d_gate[k] = coupled_weight * (-2.0 * r * g[k] * (local[k] - y_hat)) +
                        competitive_weight * (g[k] * (e * e - mean_sq));
        }

        for (std::size_t k = 0; k < experts; ++k) {
            const std::size_t base = k * (d + 1);
            for (std::size_t i = 0; i < d; ++i)
                grad[base + i] += d_expert[k] * x[i];
            grad[base + d] += d_expert[k];

            const std::size_t off = gate_offset[k];
            if (const auto* q = std::get_if<QuadraticGate>(&model.gates()[k])) {
                for (std::size_t i = 0; i < d; ++i) {
                    const double u = x[i] - q->centers[i];
                    const double s2 = q->widths[i] * q->widths[i];
                    grad[off + i] += d_gate[k] * u / s2;
                    grad[off + d + i] += d_gate[k] * u * u / (s2 * q->widths[i]);
                }
            } else {
                for (std::size_t i = 0; i < d; ++i)
                    grad[off + i] += d_gate[k] * x[i];
                grad[off + d] += d_gate[k];
            }
        }
    }
    return grad;
}

TrainResult train_moe(const MoeModel& initial, const Dataset& train, LossKind kind, double lambda,
                      const TrainConfig& config, const Dataset* validation)
{
    if (kind == LossKind::Hybrid && !(lambda >= 0.0))
        throw InvalidArgument("train_moe: lambda must be >= 0");
    if (!(config.learning_rate >= 0.0))
        throw InvalidArgument("train_moe: learning rate must be >= 0");
    if (train.empty())
        throw DataError("train_moe: empty training set");

    // Which flat parameters are widths (clamped) and which are frozen.
    std::vector<bool> is_width(parameters(initial).size(), false);
    std::vector<bool> frozen(is_width.size(), false);
    const std::size_t expert_count = expert_parameter_count(initial);
    for (std::size_t p = 0; p < expert_count; ++p)
        frozen[p] = !config.train_experts;
    {
        std::size_t off = expert_count;
        const std::size_t d = initial.input_dim();
        for (const GateFunction& g : initial.gates()) {
            const std::size_t count = gate_parameter_count(g);
            for (std::size_t p = 0; p < count; ++p) {
                frozen[off + p] = !config.train_gates;
                is_width[off + p] = std::holds_alternative<QuadraticGate>(g) && p >= d;
            }
            off += count;
        }
    }

    TrainResult result{initial, {}};
    const double inv_n = 1.0 / static_cast<double>(train.size());
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.learning_rate > 0.0) {
            std::vector<double> params = parameters(result.model);
            const std::vector<double> grad = loss_gradient(result.model, train, kind, lambda);
            for (std::size_t p = 0; p < params.size(); ++p) {
                if (frozen[p])
                    continue;
                params[p] -= config.learning_rate * inv_n * grad[p];
                if (!std::isfinite(params[p]))
                    throw ModelError("train_moe: parameter update diverged at epoch " + std::to_string(epoch) +
                                     "; lower the learning rate");
                if (is_width[p])
                    params[p] = clamp_width(params[p]);
            }
            result.model = with_parameters(result.model, params);
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_mse = model_mse(result.model, train);
        if (validation && !validation->empty())
            rec.val_mse = model_mse(result.model, *validation);
        result.history.push_back(rec);
    }
    return result;
}

}  // namespace fb::moe
