#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fb {

// N x d inputs (row-major) with N targets. Every entry is finite. An empty
// dataset is representable (e.g. the test side of a zero-fraction split);
// operations that need data check for it.
class Dataset {
public:
    explicit Dataset(std::size_t dim);
    Dataset(std::size_t dim, std::vector<double> inputs, std::vector<double> targets);

    std::size_t size() const { return targets_.size(); }
    std::size_t dim() const { return dim_; }
    bool empty() const { return targets_.empty(); }

    std::span<const double> row(std::size_t n) const { return {inputs_.data() + n * dim_, dim_}; }
    double target(std::size_t n) const { return targets_[n]; }
    const std::vector<double>& inputs() const { return inputs_; }
    const std::vector<double>& targets() const { return targets_; }

    void push_back(std::span<const double> x, double y);
    Dataset subset(std::span<const std::size_t> indices) const;

    double target_mean() const;
    Eigen::MatrixXd input_matrix() const;
    Eigen::VectorXd target_vector() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::size_t dim_;
    std::vector<double> inputs_;
    std::vector<double> targets_;
};

double mse(std::span<const double> predictions, std::span<const double> targets);

template <class Model>
std::vector<double> batch_predict(const Model& model, const Dataset& data)
{
    std::vector<double> out;
    out.reserve(data.size());
    for (std::size_t n = 0; n < data.size(); ++n)
        out.push_back(model.predict(data.row(n)));
    return out;
}

template <class Model>
double model_mse(const Model& model, const Dataset& data)
{
    return mse(batch_predict(model, data), data.targets());
}

}  // namespace fb
