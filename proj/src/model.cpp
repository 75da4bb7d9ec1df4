#include "cfunhddc/model.hpp"

#include <Eigen/Eigenvalues>
#include <string>

#include "cfunhddc/errors.hpp"

namespace cfunhddc {

GramMetric GramMetric::from_gram(const Eigen::MatrixXd& gram) {
    if (gram.rows() != gram.cols()) {
        throw NumericError("Gram matrix is not square");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
        throw NumericError("Gram matrix eigendecomposition failed");
    }
    const Eigen::VectorXd values = solver.eigenvalues();
    if (!(values.minCoeff() > 0.0)) {
        throw NumericError("Gram matrix is not positive definite "
                           "(min eigenvalue " +
                           std::to_string(values.minCoeff()) + ")");
    }
    GramMetric metric;
    metric.size = static_cast<int>(gram.rows());
    metric.sqrt = solver.eigenvectors() * values.cwiseSqrt().asDiagonal() *
                  solver.eigenvectors().transpose();
    metric.inv_sqrt = solver.eigenvectors() *
                      values.cwiseSqrt().cwiseInverse().asDiagonal() *
                      solver.eigenvectors().transpose();
    metric.log_det = values.array().log().sum();
    return metric;
}

GramMetric GramMetric::from_basis(const BasisSystem& basis) {
    return from_gram(basis.gram);
}

GramMetric GramMetric::identity(int size) {
    GramMetric metric;
    metric.size = size;
    metric.sqrt = Eigen::MatrixXd::Identity(size, size);
    metric.inv_sqrt = Eigen::MatrixXd::Identity(size, size);
    metric.log_det = 0.0;
    return metric;
}

} // namespace cfunhddc
