// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written from the textbook definitions and
// shares no code path with the implementation under test.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "cfunhddc/rng.hpp"

namespace oracle {

// Cox-de Boor recursion straight from the definition. Half-open basis
// intervals, with the right domain endpoint assigned to the last non-empty
// span.
inline double deboor_basis(const std::vector<double>& knots, int i, int degree,
                           double t) {
    if (degree == 0) {
        const double lo = knots[static_cast<std::size_t>(i)];
        const double hi = knots[static_cast<std::size_t>(i + 1)];
        if (t >= lo && t < hi) {
            return 1.0;
        }
        // close the final non-empty interval on the right
        if (t == hi && hi == knots.back() && lo < hi) {
            return 1.0;
        }
        return 0.0;
    }
    double left = 0.0;
    double right = 0.0;
    const double denom_l = knots[static_cast<std::size_t>(i + degree)] -
                           knots[static_cast<std::size_t>(i)];
    if (denom_l > 0.0) {
        left = (t - knots[static_cast<std::size_t>(i)]) / denom_l *
               deboor_basis(knots, i, degree - 1, t);
    }
    const double denom_r = knots[static_cast<std::size_t>(i + degree + 1)] -
                           knots[static_cast<std::size_t>(i + 1)];
    if (denom_r > 0.0) {
        right = (knots[static_cast<std::size_t>(i + degree + 1)] - t) /
                denom_r * deboor_basis(knots, i + 1, degree - 1, t);
    }
    return left + right;
}

// Textbook multivariate normal log density from a dense covariance.
inline double dense_gaussian_log_density(const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& mean,
                                         const Eigen::MatrixXd& cov) {
    const Eigen::Index dim = x.size();
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    const Eigen::VectorXd diff = x - mean;
    const Eigen::VectorXd solved = llt.solve(diff);
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        log_det += 2.0 * std::log(llt.matrixL()(i, i));
    }
    return -0.5 * (dim * std::log(2.0 * M_PI) + log_det + diff.dot(solved));
}

// Cyclic Jacobi eigendecomposition for symmetric matrices, eigenvalues
// descending. Used where the implementation's eigensolver must not be
// trusted as its own oracle.
inline void jacobi_eigh(Eigen::MatrixXd a, Eigen::VectorXd& values,
                        Eigen::MatrixXd& vectors) {
    const Eigen::Index n = a.rows();
    vectors = Eigen::MatrixXd::Identity(n, n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                off += a(p, q) * a(p, q);
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double t =
                    sign / (std::abs(theta) +
                            std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(n, n);
                rot(p, p) = c;
                rot(q, q) = c;
                rot(p, q) = s;
                rot(q, p) = -s;
                a = rot.transpose() * a * rot;
                vectors = vectors * rot;
            }
        }
    }
    values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        values[i] = a(i, i);
    }
    // descending order
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index best = i;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (values[j] > values[best]) {
                best = j;
            }
        }
        if (best != i) {
            std::swap(values[i], values[best]);
            vectors.col(i).swap(vectors.col(best));
        }
    }
}

// Adjusted Rand Index by explicit enumeration of all point pairs.
inline double pair_count_ari(const std::vector<int>& a,
                             const std::vector<int>& b) {
    long long both_same = 0;
    long long a_same_only = 0;
    long long b_same_only = 0;
    long long both_diff = 0;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool sa = a[i] == a[j];
            const bool sb = b[i] == b[j];
            if (sa && sb) {
                ++both_same;
            } else if (sa && !sb) {
                ++a_same_only;
            } else if (!sa && sb) {
                ++b_same_only;
            } else {
                ++both_diff;
            }
        }
    }
    const double numerator =
        2.0 * (static_cast<double>(both_same) * both_diff -
               static_cast<double>(a_same_only) * b_same_only);
    const double denominator =
        static_cast<double>(both_same + a_same_only) *
            (a_same_only + both_diff) +
        static_cast<double>(both_same + b_same_only) *
            (b_same_only + both_diff);
    if (denominator == 0.0) {
        return 1.0;
    }
    return numerator / denominator;
}

inline Eigen::MatrixXd random_orthogonal(int size, cfunhddc::Rng& rng) {
    Eigen::MatrixXd raw(size, size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            raw(r, c) = rng.normal();
        }
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    return qr.householderQ();
}

inline Eigen::MatrixXd random_spd(int size, cfunhddc::Rng& rng) {
    Eigen::MatrixXd raw(size, size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            raw(r, c) = rng.normal();
        }
    }
    return raw * raw.transpose() +
           static_cast<double>(size) * Eigen::MatrixXd::Identity(size, size);
}

} // namespace oracle
