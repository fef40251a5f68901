#pragma once

#include <Eigen/Dense>

namespace fb {

struct LeastSquaresSolution {
    Eigen::VectorXd coefficients;
    Eigen::Index rank = 0;
    bool regularized = false;  // true when the ridge fallback was used
};

// min ||A c - b||. Column-pivoted QR when A has full column rank; otherwise
// the normal equations with `ridge_jitter` added to the diagonal (or the
// minimum-norm solution when the jitter is zero).
LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                         double ridge_jitter);

// min ||A c - b||^2 + sum_j penalty_j c_j^2, solved as an augmented QR system.
Eigen::VectorXd solve_ridge(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                            const Eigen::VectorXd& penalty);

struct AffineSolution {
    Eigen::VectorXd slopes;
    double intercept = 0.0;
    Eigen::Index rank = 0;  // rank of the weighted [X 1] design
};

// Weighted affine regression y ~ X a + b with an L2 penalty on the slopes only.
// `weights` may be empty (unit weights). With ridge == 0 and a rank-deficient
// design the returned rank tells the caller; the coefficients are then the
// minimum-norm solution.
AffineSolution fit_affine(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                          const Eigen::VectorXd& weights, double ridge);

}  // namespace fb
