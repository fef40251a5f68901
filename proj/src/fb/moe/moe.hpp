#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fb/core/dataset.hpp"
#include "fb/core/history.hpp"
#include "fb/core/io.hpp"
#include "fb/core/tsk.hpp"

namespace fb::moe {

// v(x) = -sum_i (x_i - c_i)^2 / (2 sigma_i^2)
struct QuadraticGate {
    std::vector<double> centers;
    std::vector<double> widths;
    friend bool operator==(const QuadraticGate&, const QuadraticGate&) = default;
};

// v(x) = w . x + b
struct AffineGate {
    std::vector<double> weights;
    double bias = 0.0;
    friend bool operator==(const AffineGate&, const AffineGate&) = default;
};

using GateFunction = std::variant<QuadraticGate, AffineGate>;

double gate_value(const GateFunction& gate, std::span<const double> x);

// Softmax with the maximum subtracted first.
std::vector<double> softmax(std::span<const double> values);

class MoeModel {
public:
    MoeModel(std::size_t input_dim, std::vector<Affine> experts, std::vector<GateFunction> gates);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t size() const { return experts_.size(); }
    const std::vector<Affine>& experts() const { return experts_; }
    const std::vector<GateFunction>& gates() const { return gates_; }

    std::vector<double> gate_values(std::span<const double> x) const;
    std::vector<double> gate_weights(std::span<const double> x) const;
    double expert_output(std::size_t k, std::span<const double> x) const;
    double predict(std::span<const double> x) const;

    friend bool operator==(const MoeModel&, const MoeModel&) = default;

private:
    void check_input(std::span<const double> x) const;

    std::size_t input_dim_;
    std::vector<Affine> experts_;
    std::vector<GateFunction> gates_;
};

inline double moe_predict(const MoeModel& model, std::span<const double> x) { return model.predict(x); }

enum class LossKind { Competitive, Coupled, Hybrid };

inline constexpr double kDefaultLambda = 0.5;

// sum_n sum_k g_k(x_n) (y_n - y_k(x_n))^2
double loss_competitive(const MoeModel& model, const Dataset& data);
// sum_n (y_n - y(x_n))^2
double loss_coupled(const MoeModel& model, const Dataset& data);
// loss_coupled + lambda * loss_competitive
double loss_hybrid(const MoeModel& model, const Dataset& data, double lambda);
double loss(const MoeModel& model, const Dataset& data, LossKind kind, double lambda);

// Flat parameter vector: every expert (slopes..., intercept), then every gate
// (quadratic: centers..., widths...; affine: weights..., bias).
std::vector<double> parameters(const MoeModel& model);
MoeModel with_parameters(const MoeModel& model, std::span<const double> params);
std::size_t expert_parameter_count(const MoeModel& model);

// Analytic gradient of loss() with respect to parameters(). The competitive
// term differentiates through the gate weights as well as the experts.
std::vector<double> loss_gradient(const MoeModel& model, const Dataset& data, LossKind kind, double lambda);

struct TrainConfig {
    std::size_t epochs = 200;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;
    bool train_experts = true;
    bool train_gates = true;
};

struct TrainResult {
    MoeModel model;
    TrainHistory history;
};

// Full-batch gradient descent on loss / N; experts and gates move together.
TrainResult train_moe(const MoeModel& initial, const Dataset& train, LossKind kind, double lambda,
                      const TrainConfig& config, const Dataset* validation = nullptr);

// Entropy (nats) of the mean gate-weight distribution over `data`.
double expert_usage_entropy(const MoeModel& model, const Dataset& data);

// Exact conversions between full-antecedent Gaussian TSK models with affine
// consequents and weighted-average aggregation, and quadratic-gated mixtures.
MoeModel tsk_to_moe(const TskModel& model);
TskModel moe_to_tsk(const MoeModel& model);

Json to_json(const MoeModel& model);
MoeModel moe_from_json(const Json& j);

}  // namespace fb::moe
