#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfunhddc/curves.hpp"

namespace cfunhddc {

// n x B matrix of basis-expansion coefficients; row i concatenates the
// per-component coefficient vectors of curve i.
using CoefficientMatrix = Eigen::MatrixXd;

// Per-component clamped B-spline bases together with the Gram matrix W of
// basis inner products and its symmetric square root. W is block-diagonal
// with one block per component since components use disjoint basis sets.
struct BasisSystem {
    std::vector<int> sizes;                 // B_j per component
    int degree = 3;
    Interval domain{0.0, 1.0};
    std::vector<std::vector<double>> knots; // clamped knot vector per component
    int total_size = 0;                     // B = sum of B_j
    Eigen::MatrixXd gram;                   // W, symmetric positive definite
    Eigen::MatrixXd gram_sqrt;              // symmetric S with S*S = W

    int component_count() const { return static_cast<int>(sizes.size()); }
    int component_offset(int comp) const;

    // Values of all B_j basis functions of component `comp` at t.
    Eigen::VectorXd evaluate(int comp, double t) const;
};

// Equally spaced clamped knots; basis functions form a partition of unity on
// the domain. Requires sizes[j] >= degree + 1 and a non-degenerate domain.
BasisSystem build_bspline_basis(const std::vector<int>& sizes, int degree,
                                Interval domain);

// W_{bl} = integral of phi_b * phi_l over the domain, by Gauss-Legendre
// quadrature with (degree + 1) nodes per knot span (exact for products of
// piecewise polynomials of the basis degree).
Eigen::MatrixXd gram_matrix(const BasisSystem& basis);

// Symmetric square root of a symmetric positive definite matrix via
// eigendecomposition. Throws NumericError when the input is not SPD.
Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& m);

// Rows evaluate the component basis at the given times (T x B_j).
Eigen::MatrixXd design_matrix(const BasisSystem& basis, int comp,
                              const std::vector<double>& times);

// Per curve and component, ordinary least squares of the observed values on
// the basis evaluated at that curve's time points.
CoefficientMatrix smooth_curves(const CurveSet& curves, const BasisSystem& basis);

// Reconstructed value of component `comp` of a smoothed curve at time t.
double evaluate_curve(const Eigen::RowVectorXd& coeff_row,
                      const BasisSystem& basis, int comp, double t);

} // namespace cfunhddc
