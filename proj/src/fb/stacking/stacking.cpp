#include "fb/stacking/stacking.hpp"

#include <cmath>
#include <string>

#include "fb/common/error.hpp"
#include "fb/common/linalg.hpp"
#include "fb/common/rng.hpp"

namespace fb::stacking {

double BaseModel::predict(std::span<const double> x) const
{
    if (x.size() != slopes.size())
        throw DataError("base model: input has " + std::to_string(x.size()) + " features, expected " +
                        std::to_string(slopes.size()));
    double y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        y += slopes[i] * x[i];
    return y + intercept;
}

StackModel::StackModel(std::size_t input_dim, std::vector<BaseModel> bases, Combiner combiner)
    : input_dim_(input_dim), bases_(std::move(bases)), combiner_(std::move(combiner))
{
    if (input_dim_ == 0)
        throw InvalidArgument("stack: input dimension must be >= 1");
    if (bases_.empty())
        throw InvalidArgument("stack: needs at least one base model");
    for (std::size_t k = 0; k < bases_.size(); ++k)
        if (bases_[k].slopes.size() != input_dim_)
            throw InvalidArgument("stack: base " + std::to_string(k) + " has the wrong number of coefficients");
    if (const auto* c = std::get_if<ConstantWeights>(&combiner_)) {
        if (c->weights.size() != bases_.size())
            throw InvalidArgument("stack: combiner arity does not match the base count");
    } else {
        const auto& a = std::get<AdaptiveGates>(combiner_);
        if (a.gates.size() != bases_.size())
            throw InvalidArgument("stack: combiner arity does not match the base count");
        for (const moe::AffineGate& g : a.gates)
            if (g.weights.size() != input_dim_)
                throw InvalidArgument("stack: gate has the wrong dimension");
    }
}

std::vector<double> StackModel::base_predictions(std::span<const double> x) const
{
    if (x.size() != input_dim_)
        throw DataError("stack: input has " + std::to_string(x.size()) + " features, model expects " +
                        std::to_string(input_dim_));
    std::vector<double> p;
    p.reserve(bases_.size());
    for (const BaseModel& b : bases_)
        p.push_back(b.predict(x));
    return p;
}

double StackModel::predict(std::span<const double> x) const
{
    const std::vector<double> p = base_predictions(x);
    if (const auto* c = std::get_if<ConstantWeights>(&combiner_)) {
        double y = c->intercept;
        for (std::size_t k = 0; k < p.size(); ++k)
            y += c->weights[k] * p[k];
        return y;
    }
    const auto& gates = std::get<AdaptiveGates>(combiner_).gates;
    std::vector<double> v;
    v.reserve(gates.size());
    for (const moe::AffineGate& g : gates)
        v.push_back(moe::gate_value(g, x));
    const std::vector<double> w = moe::softmax(v);
    double y = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
        y += w[k] * p[k];
    return y;
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed)
{
    if (n == 0)
        throw InvalidArgument("bootstrap: empty sample");
    Rng rng(seed);
    std::vector<std::size_t> out(n);
    for (std::size_t& i : out)
        i = rng.index(n);
    return out;
}

std::vector<BaseModel> fit_bases(const Dataset& data, std::size_t count, std::uint64_t seed, double ridge)
{
    if (count == 0)
        throw InvalidArgument("fit_bases: need at least one base model");
    if (data.size() < 2)
        throw DataError("fit_bases: need at least two examples");
    if (!(ridge >= 0.0))
        throw InvalidArgument("fit_bases: ridge must be >= 0");
    std::vector<BaseModel> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::uint64_t base_seed = derive_seed(seed, k);
        const std::vector<std::size_t> idx = bootstrap_indices(data.size(), base_seed);
        const Dataset sample = data.subset(idx);
        const AffineSolution fit = fit_affine(sample.input_matrix(), sample.target_vector(), Eigen::VectorXd(), ridge);
        out.push_back(BaseModel{std::vector<double>(fit.slopes.data(), fit.slopes.data() + fit.slopes.size()),
                                fit.intercept, base_seed, ridge});
    }
    return out;
}

StackModel fit_constant_stack(std::vector<BaseModel> bases, const Dataset& data, double ridge)
{
    if (bases.empty())
        throw InvalidArgument("constant stack: no base models");
    if (data.empty())
        throw DataError("constant stack: empty dataset");
    const std::size_t k_count = bases.size();
    Eigen::MatrixXd columns(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(k_count));
    for (std::size_t n = 0; n < data.size(); ++n)
        for (std::size_t k = 0; k < k_count; ++k)
            columns(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = bases[k].predict(data.row(n));
    const AffineSolution fit = fit_affine(columns, data.target_vector(), Eigen::VectorXd(), ridge);
    ConstantWeights w{std::vector<double>(fit.slopes.data(), fit.slopes.data() + fit.slopes.size()), fit.intercept};
    const std::size_t d = data.dim();
    return StackModel(d, std::move(bases), std::move(w));
}

moe::MoeModel as_mixture(const StackModel& model)
{
    const auto* adaptive = std::get_if<AdaptiveGates>(&model.combiner());
    if (!adaptive)
        throw InvalidArgument("as_mixture: stack has constant weights");
    std::vector<Affine> experts;
    std::vector<moe::GateFunction> gates;
    for (std::size_t k = 0; k < model.bases().size(); ++k) {
        experts.push_back(Affine{model.bases()[k].slopes, model.bases()[k].intercept});
        gates.emplace_back(adaptive->gates[k]);
    }
    return moe::MoeModel(model.input_dim(), std::move(experts), std::move(gates));
}

StackModel fit_adaptive_stack(std::vector<BaseModel> bases, const Dataset& data, const AdaptiveConfig& config,
                              TrainHistory* history)
{
    if (bases.empty())
        throw InvalidArgument("adaptive stack: no base models");
    if (data.empty())
        throw DataError("adaptive stack: empty dataset");
    const std::size_t d = data.dim();
    AdaptiveGates equal;
    equal.gates.assign(bases.size(), moe::AffineGate{std::vector<double>(d, 0.0), 0.0});
    const StackModel start(d, bases, equal);

    moe::TrainConfig tc;
    tc.epochs = config.epochs;
    tc.learning_rate = config.learning_rate;
    tc.seed = config.seed;
    tc.train_experts = false;
    moe::TrainResult trained = moe::train_moe(as_mixture(start), data, moe::LossKind::Coupled, 0.0, tc);
    if (history)
        *history = std::move(trained.history);

    AdaptiveGates gates;
    for (const moe::GateFunction& g : trained.model.gates())
        gates.gates.push_back(std::get<moe::AffineGate>(g));
    return StackModel(d, std::move(bases), std::move(gates));
}

}  // namespace fb::stacking
