#include <cmath>
#include <string>

#include "fb/anfis/anfis.hpp"
#include "fb/common/error.hpp"

namespace fb::anfis {

TrainResult hybrid_train(const TskModel& initial, const Dataset& train, const TrainConfig& config,
                         const Dataset* validation)
{
    if (!(config.learning_rate >= 0.0))
        throw InvalidArgument("hybrid_train: learning rate must be >= 0");
    if (train.empty())
        throw DataError("hybrid_train: empty training set");

    TrainResult result{initial, {}};
    const double inv_n = 1.0 / static_cast<double>(train.size());
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        // Forward pass: consequents by least squares, antecedents fixed.
        result.model = lse_consequents(result.model, train, config.ridge_jitter);

        // Backward pass: consequents fixed, one gradient step on the antecedents.
        if (config.learning_rate > 0.0) {
            std::vector<double> params = antecedent_parameters(result.model);
            const std::vector<double> grad = flatten(antecedent_gradients(result.model, train));
            for (std::size_t p = 0; p < params.size(); ++p) {
                params[p] -= config.learning_rate * inv_n * grad[p];
                if (!std::isfinite(params[p]))
                    throw ModelError("hybrid_train: antecedent update diverged at epoch " + std::to_string(epoch) +
                                     "; lower the learning rate");
                if (p % 2 == 1)
                    params[p] = clamp_width(params[p]);
            }
            result.model = with_antecedent_parameters(result.model, params);
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

}  // namespace fb::anfis
