#include "fb/common/linalg.hpp"

#include <cmath>

#include "fb/common/error.hpp"

namespace fb {

LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                         double ridge_jitter)
{
    if (design.rows() != target.size())
        throw InvalidArgument("least squares: row count mismatch");
    LeastSquaresSolution out;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    out.rank = qr.rank();
    if (out.rank == design.cols()) {
        out.coefficients = qr.solve(target);
        return out;
    }
    out.regularized = true;
    if (ridge_jitter > 0.0) {
        Eigen::MatrixXd normal = design.transpose() * design;
        normal.diagonal().array() += ridge_jitter;
        out.coefficients = normal.ldlt().solve(design.transpose() * target);
    } else {
        out.coefficients = design.completeOrthogonalDecomposition().solve(target);
    }
    return out;
}

Eigen::VectorXd solve_ridge(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                            const Eigen::VectorXd& penalty)
{
    const Eigen::Index rows = design.rows();
    const Eigen::Index cols = design.cols();
    if (penalty.size() != cols || target.size() != rows)
        throw InvalidArgument("ridge: dimension mismatch");
    Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(rows + cols, cols);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows + cols);
    augmented.topRows(rows) = design;
    rhs.head(rows) = target;
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (penalty[j] < 0.0)
            throw InvalidArgument("ridge: negative penalty");
        augmented(rows + j, j) = std::sqrt(penalty[j]);
    }
    return augmented.colPivHouseholderQr().solve(rhs);
}

AffineSolution fit_affine(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                          const Eigen::VectorXd& weights, double ridge)
{
    const Eigen::Index n = inputs.rows();
    const Eigen::Index d = inputs.cols();
    if (targets.size() != n || (weights.size() != 0 && weights.size() != n))
        throw InvalidArgument("affine fit: dimension mismatch");
    if (ridge < 0.0)
        throw InvalidArgument("affine fit: ridge must be >= 0");

    Eigen::MatrixXd design(n, d + 1);
    design.leftCols(d) = inputs;
    design.col(d).setOnes();
    Eigen::VectorXd rhs = targets;
    if (weights.size() != 0) {
        const Eigen::VectorXd root = weights.array().sqrt();
        design = root.asDiagonal() * design;
        rhs = root.asDiagonal() * rhs;
    }

    AffineSolution out;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    out.rank = qr.rank();
    Eigen::VectorXd coef;
    if (ridge > 0.0) {
        Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, ridge);
        penalty[d] = 0.0;
        coef = solve_ridge(design, rhs, penalty);
    } else if (out.rank == d + 1) {
        coef = qr.solve(rhs);
    } else {
        coef = design.completeOrthogonalDecomposition().solve(rhs);
    }
    out.slopes = coef.head(d);
    out.intercept = coef[d];
    return out;
}

}  // namespace fb
