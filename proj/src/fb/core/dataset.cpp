#include "fb/core/dataset.hpp"

#include <cmath>
#include <string>

#include "fb/common/error.hpp"

namespace fb {

Dataset::Dataset(std::size_t dim) : dim_(dim)
{
    if (dim == 0)
        throw InvalidArgument("dataset: input dimension must be >= 1");
}

Dataset::Dataset(std::size_t dim, std::vector<double> inputs, std::vector<double> targets)
    : dim_(dim), inputs_(std::move(inputs)), targets_(std::move(targets))
{
    if (dim == 0)
        throw InvalidArgument("dataset: input dimension must be >= 1");
    if (inputs_.size() != targets_.size() * dim_)
        throw DataError("dataset: input matrix has " + std::to_string(inputs_.size()) + " entries, expected " +
                        std::to_string(targets_.size() * dim_));
    for (std::size_t i = 0; i < inputs_.size(); ++i)
        if (!std::isfinite(inputs_[i]))
            throw DataError("dataset: non-finite input at row " + std::to_string(i / dim_) + ", column " +
                            std::to_string(i % dim_));
    for (std::size_t n = 0; n < targets_.size(); ++n)
        if (!std::isfinite(targets_[n]))
            throw DataError("dataset: non-finite target at row " + std::to_string(n));
}

void Dataset::push_back(std::span<const double> x, double y)
{
    if (x.size() != dim_)
        throw DataError("dataset: row has " + std::to_string(x.size()) + " features, expected " + std::to_string(dim_));
    for (double v : x)
        if (!std::isfinite(v))
            throw DataError("dataset: non-finite input");
    if (!std::isfinite(y))
        throw DataError("dataset: non-finite target");
    inputs_.insert(inputs_.end(), x.begin(), x.end());
    targets_.push_back(y);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const
{
    Dataset out(dim_);
    out.inputs_.reserve(indices.size() * dim_);
    out.targets_.reserve(indices.size());
    for (std::size_t idx : indices) {
        if (idx >= size())
            throw InvalidArgument("dataset: subset index out of range");
        const auto x = row(idx);
        out.inputs_.insert(out.inputs_.end(), x.begin(), x.end());
        out.targets_.push_back(targets_[idx]);
    }
    return out;
}

double Dataset::target_mean() const
{
    if (empty())
        throw DataError("dataset: mean of empty target vector");
    double sum = 0.0;
    for (double y : targets_)
        sum += y;
    return sum / static_cast<double>(targets_.size());
}

Eigen::MatrixXd Dataset::input_matrix() const
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dim_));
    for (std::size_t n = 0; n < size(); ++n)
        for (std::size_t i = 0; i < dim_; ++i)
            m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) = inputs_[n * dim_ + i];
    return m;
}

Eigen::VectorXd Dataset::target_vector() const
{
    return Eigen::Map<const Eigen::VectorXd>(targets_.data(), static_cast<Eigen::Index>(targets_.size()));
}

double mse(std::span<const double> predictions, std::span<const double> targets)
{
    if (predictions.size() != targets.size())
        throw DataError("mse: " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(targets.size()) + " targets");
    if (predictions.empty())
        throw DataError("mse: empty input");
    double sum = 0.0;
    for (std::size_t n = 0; n < predictions.size(); ++n) {
        const double r = predictions[n] - targets[n];
        sum += r * r;
    }
    return sum / static_cast<double>(predictions.size());
}

}  // namespace fb
