#include "cfunhddc/basis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "cfunhddc/errors.hpp"

namespace cfunhddc {

namespace {

// Knot span index mu with knots[mu] <= t < knots[mu+1], restricted to
// the non-empty spans [degree, n_basis - 1]. t at the right end of the
// domain maps to the last span so the basis stays a partition of unity on
// the closed interval.
int find_span(const std::vector<double>& knots, int n_basis, int degree,
              double t) {
    if (t >= knots[static_cast<std::size_t>(n_basis)]) {
        return n_basis - 1;
    }
    if (t <= knots[static_cast<std::size_t>(degree)]) {
        return degree;
    }
    int lo = degree;
    int hi = n_basis;
    int mid = (lo + hi) / 2;
    while (t < knots[static_cast<std::size_t>(mid)] ||
           t >= knots[static_cast<std::size_t>(mid + 1)]) {
        if (t < knots[static_cast<std::size_t>(mid)]) {
            hi = mid;
        } else {
            lo = mid;
        }
        mid = (lo + hi) / 2;
    }
    return mid;
}

// Values of the degree+1 basis functions that are non-zero on the span
// (indices span-degree .. span). Standard triangular recurrence.
void basis_funs(const std::vector<double>& knots, int span, int degree,
                double t, double* out) {
    std::vector<double> left(static_cast<std::size_t>(degree) + 1);
    std::vector<double> right(static_cast<std::size_t>(degree) + 1);
    out[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[static_cast<std::size_t>(j)] =
            t - knots[static_cast<std::size_t>(span + 1 - j)];
        right[static_cast<std::size_t>(j)] =
            knots[static_cast<std::size_t>(span + j)] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[static_cast<std::size_t>(r + 1)] +
                                 left[static_cast<std::size_t>(j - r)];
            const double temp = out[r] / denom;
            out[r] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        out[j] = saved;
    }
}

std::vector<double> clamped_uniform_knots(int n_basis, int degree,
                                          Interval domain) {
    const int segments = n_basis - degree;
    std::vector<double> knots(static_cast<std::size_t>(n_basis + degree + 1));
    for (int i = 0; i <= degree; ++i) {
        knots[static_cast<std::size_t>(i)] = domain.lo;
        knots[static_cast<std::size_t>(n_basis + i)] = domain.hi;
    }
    for (int i = 1; i < segments; ++i) {
        knots[static_cast<std::size_t>(degree + i)] =
            domain.lo + domain.length() * i / segments;
    }
    return knots;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// Legendre polynomial; n stays small (degree + 1) so this is exact enough
// at double precision and avoids a quadrature dependency.
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                break;
            }
        }
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
}

} // namespace

int BasisSystem::component_offset(int comp) const {
    int offset = 0;
    for (int j = 0; j < comp; ++j) {
        offset += sizes[static_cast<std::size_t>(j)];
    }
    return offset;
}

Eigen::VectorXd BasisSystem::evaluate(int comp, double t) const {
    const int n_basis = sizes[static_cast<std::size_t>(comp)];
    const auto& kn = knots[static_cast<std::size_t>(comp)];
    Eigen::VectorXd values = Eigen::VectorXd::Zero(n_basis);
    const double tc = std::clamp(t, domain.lo, domain.hi);
    const int span = find_span(kn, n_basis, degree, tc);
    std::vector<double> local(static_cast<std::size_t>(degree) + 1);
    basis_funs(kn, span, degree, tc, local.data());
    for (int j = 0; j <= degree; ++j) {
        values[span - degree + j] = local[static_cast<std::size_t>(j)];
    }
    return values;
}

BasisSystem build_bspline_basis(const std::vector<int>& sizes, int degree,
                                Interval domain) {
    if (sizes.empty()) {
        throw ConfigError("basis needs at least one component");
    }
    if (degree < 1) {
        throw ConfigError("spline degree must be positive");
    }
    if (!(domain.hi > domain.lo) || !std::isfinite(domain.lo) ||
        !std::isfinite(domain.hi)) {
        throw ConfigError("invalid basis domain [" +
                          std::to_string(domain.lo) + ", " +
                          std::to_string(domain.hi) + "]");
    }
    BasisSystem basis;
    basis.sizes = sizes;
    basis.degree = degree;
    basis.domain = domain;
    basis.total_size = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        const int b = sizes[j];
        if (b < degree + 1) {
            throw ConfigError("component " + std::to_string(j + 1) + ": " +
                              std::to_string(b) +
                              " basis functions < degree + 1 = " +
                              std::to_string(degree + 1));
        }
        basis.knots.push_back(clamped_uniform_knots(b, degree, domain));
        basis.total_size += b;
    }
    basis.gram = gram_matrix(basis);
    basis.gram_sqrt = matrix_sqrt(basis.gram);
    return basis;
}

Eigen::MatrixXd gram_matrix(const BasisSystem& basis) {
    const int total = basis.total_size;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(total, total);
    std::vector<double> nodes;
    std::vector<double> weights;
    gauss_legendre(basis.degree + 1, nodes, weights);

    int offset = 0;
    for (std::size_t j = 0; j < basis.sizes.size(); ++j) {
        const int n_basis = basis.sizes[j];
        const auto& kn = basis.knots[j];
        std::vector<double> local(static_cast<std::size_t>(basis.degree) + 1);
        for (int span = basis.degree; span < n_basis; ++span) {
            const double a = kn[static_cast<std::size_t>(span)];
            const double b = kn[static_cast<std::size_t>(span + 1)];
            if (!(b > a)) {
                continue;
            }
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                const double t = 0.5 * (a + b) + 0.5 * (b - a) * nodes[q];
                const double w = 0.5 * (b - a) * weights[q];
                basis_funs(kn, span, basis.degree, t, local.data());
                for (int r = 0; r <= basis.degree; ++r) {
                    for (int c = 0; c <= basis.degree; ++c) {
                        gram(offset + span - basis.degree + r,
                             offset + span - basis.degree + c) +=
                            w * local[static_cast<std::size_t>(r)] *
                            local[static_cast<std::size_t>(c)];
                    }
                }
            }
        }
        offset += n_basis;
    }
    if (!gram.allFinite()) {
        throw NumericError("Gram matrix quadrature produced non-finite values");
    }
    // Symmetrize away quadrature rounding.
    gram = 0.5 * (gram + gram.transpose()).eval();
    return gram;
}

Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw NumericError("matrix_sqrt: matrix is not square");
    }
    const double asym = (m - m.transpose()).norm();
    if (asym > 1e-10 * std::max(1.0, m.norm())) {
        throw NumericError("matrix_sqrt: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw NumericError("matrix_sqrt: eigendecomposition failed");
    }
    const double min_eig = solver.eigenvalues().minCoeff();
    if (!(min_eig > 0.0)) {
        throw NumericError("matrix_sqrt: matrix is not positive definite "
                           "(min eigenvalue " +
                           std::to_string(min_eig) + ")");
    }
    return solver.eigenvectors() *
           solver.eigenvalues().cwiseSqrt().asDiagonal() *
           solver.eigenvectors().transpose();
}

Eigen::MatrixXd design_matrix(const BasisSystem& basis, int comp,
                              const std::vector<double>& times) {
    const int n_basis = basis.sizes[static_cast<std::size_t>(comp)];
    Eigen::MatrixXd design(static_cast<Eigen::Index>(times.size()), n_basis);
    for (std::size_t r = 0; r < times.size(); ++r) {
        design.row(static_cast<Eigen::Index>(r)) =
            basis.evaluate(comp, times[r]).transpose();
    }
    return design;
}

CoefficientMatrix smooth_curves(const CurveSet& curves,
                                const BasisSystem& basis) {
    curves.validate();
    if (curves.components() != basis.component_count()) {
        throw ConfigError("curve set has " +
                          std::to_string(curves.components()) +
                          " components but the basis has " +
                          std::to_string(basis.component_count()));
    }
    const int n = curves.size();
    CoefficientMatrix coeffs(n, basis.total_size);

    for (int j = 0; j < basis.component_count(); ++j) {
        const int n_basis = basis.sizes[static_cast<std::size_t>(j)];
        const int offset = basis.component_offset(j);

        // Curves sharing a time grid share one QR factorization.
        std::map<std::vector<double>, std::vector<int>> groups;
        for (int i = 0; i < n; ++i) {
            const auto& comp = curves.curves[static_cast<std::size_t>(i)]
                                   .components[static_cast<std::size_t>(j)];
            if (static_cast<int>(comp.times.size()) < n_basis) {
                throw SmoothingError(
                    "curve '" + curves.curves[static_cast<std::size_t>(i)].id +
                    "', component " + std::to_string(j + 1) + ": " +
                    std::to_string(comp.times.size()) +
                    " observation points < " + std::to_string(n_basis) +
                    " basis functions");
            }
            groups[comp.times].push_back(i);
        }

        for (const auto& [times, members] : groups) {
            const Eigen::MatrixXd design = design_matrix(basis, j, times);
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
            if (qr.rank() < n_basis) {
                throw SmoothingError(
                    "curve '" +
                    curves.curves[static_cast<std::size_t>(members[0])].id +
                    "', component " + std::to_string(j + 1) +
                    ": design matrix rank " + std::to_string(qr.rank()) +
                    " < " + std::to_string(n_basis) +
                    " (too few distinct time points)");
            }
            Eigen::VectorXd values(static_cast<Eigen::Index>(times.size()));
            for (int i : members) {
                const auto& comp = curves.curves[static_cast<std::size_t>(i)]
                                       .components[static_cast<std::size_t>(j)];
                for (std::size_t r = 0; r < comp.values.size(); ++r) {
                    values[static_cast<Eigen::Index>(r)] = comp.values[r];
                }
                coeffs.block(i, offset, 1, n_basis) =
                    qr.solve(values).transpose();
            }
        }
    }
    if (!coeffs.allFinite()) {
        throw NumericError("smoothing produced non-finite coefficients");
    }
    return coeffs;
}

double evaluate_curve(const Eigen::RowVectorXd& coeff_row,
                      const BasisSystem& basis, int comp, double t) {
    const int offset = basis.component_offset(comp);
    const int n_basis = basis.sizes[static_cast<std::size_t>(comp)];
    return coeff_row.segment(offset, n_basis) * basis.evaluate(comp, t);
}

} // namespace cfunhddc
