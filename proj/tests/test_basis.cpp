#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "cfunhddc/basis.hpp"
#include "cfunhddc/errors.hpp"
#include "cfunhddc/rng.hpp"
#include "support/oracles.hpp"

using namespace cfunhddc;

namespace {

CurveSet sample_curves(int n, int points, Interval domain,
                       const std::function<double(int, int, double)>& f,
                       int components = 1) {
    CurveSet set;
    set.domain = domain;
    for (int i = 0; i < n; ++i) {
        Curve curve;
        curve.id = "c" + std::to_string(i);
        for (int j = 0; j < components; ++j) {
            ComponentSamples samples;
            for (int r = 0; r < points; ++r) {
                const double t =
                    domain.lo + domain.length() * r / (points - 1);
                samples.times.push_back(t);
                samples.values.push_back(f(i, j, t));
            }
            curve.components.push_back(std::move(samples));
        }
        set.curves.push_back(std::move(curve));
    }
    return set;
}

} // namespace

TEST_CASE("single-segment cubic basis is a partition of unity") {
    const auto basis = build_bspline_basis({4}, 3, {0.0, 1.0});
    for (int g = 0; g <= 100; ++g) {
        const double t = g / 100.0;
        CHECK(basis.evaluate(0, t).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("partition of unity holds for random basis shapes") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int degree = 1 + static_cast<int>(rng.below(4));
        const int size = degree + 1 + static_cast<int>(rng.below(10));
        const double lo = -5.0 + 10.0 * rng.uniform();
        const auto basis = build_bspline_basis({size}, degree,
                                               {lo, lo + 0.5 + rng.uniform()});
        for (int g = 0; g <= 50; ++g) {
            const double t =
                basis.domain.lo + basis.domain.length() * g / 50.0;
            CHECK(std::abs(basis.evaluate(0, t).sum() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("two-component cubic basis of size 25 gives block-diagonal W") {
    const auto basis = build_bspline_basis({25, 25}, 3, {1.0, 21.0});
    CHECK(basis.total_size == 50);
    CHECK(basis.gram.rows() == 50);
    // off-diagonal blocks are exactly zero
    CHECK(basis.gram.block(0, 25, 25, 25).cwiseAbs().maxCoeff() == 0.0);
    CHECK(basis.gram.block(25, 0, 25, 25).cwiseAbs().maxCoeff() == 0.0);
    // symmetric positive definite
    CHECK((basis.gram - basis.gram.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(basis.gram);
    CHECK(solver.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("basis evaluation matches the raw de Boor recursion") {
    const auto basis = build_bspline_basis({5}, 3, {0.0, 2.0});
    const auto& knots = basis.knots[0];
    for (int g = 0; g <= 100; ++g) {
        const double t = 2.0 * g / 100.0;
        const Eigen::VectorXd values = basis.evaluate(0, t);
        for (int b = 0; b < 5; ++b) {
            const double expected = oracle::deboor_basis(knots, b, 3, t);
            CHECK(std::abs(values[b] - expected) <= 1e-12);
        }
    }
}

TEST_CASE("gram matrix sums to the domain length") {
    const auto basis = build_bspline_basis({7, 12}, 3, {1.0, 21.0});
    // sum_{b,l} W_bl = integral of (sum phi)(sum phi) = |domain| per block
    CHECK(basis.gram.sum() ==
          doctest::Approx(2.0 * basis.domain.length()).epsilon(1e-10));
}

TEST_CASE("gram matrix matches dense trapezoid quadrature") {
    const auto basis = build_bspline_basis({6}, 3, {0.0, 1.0});
    const int grid = 100000;
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(6, 6);
    Eigen::VectorXd prev = basis.evaluate(0, 0.0);
    for (int g = 1; g <= grid; ++g) {
        const double t = static_cast<double>(g) / grid;
        const Eigen::VectorXd cur = basis.evaluate(0, t);
        dense += 0.5 / grid * (prev * prev.transpose() + cur * cur.transpose());
        prev = cur;
    }
    CHECK((basis.gram - dense).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("basis construction rejects bad inputs") {
    CHECK_THROWS_AS(build_bspline_basis({3}, 3, {0.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(build_bspline_basis({5}, 3, {1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(build_bspline_basis({5}, 3, {2.0, 1.0}), ConfigError);
}

TEST_CASE("matrix_sqrt basics") {
    CHECK((matrix_sqrt(Eigen::MatrixXd::Identity(3, 3)) -
           Eigen::MatrixXd::Identity(3, 3))
              .norm() == doctest::Approx(0.0));

    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
    diag(0, 0) = 4.0;
    diag(1, 1) = 9.0;
    const Eigen::MatrixXd root = matrix_sqrt(diag);
    CHECK(root(0, 0) == doctest::Approx(2.0));
    CHECK(root(1, 1) == doctest::Approx(3.0));
    CHECK(std::abs(root(0, 1)) < 1e-14);
}

TEST_CASE("matrix_sqrt reconstructs random SPD matrices") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd spd = oracle::random_spd(8, rng);
        const Eigen::MatrixXd root = matrix_sqrt(spd);
        CHECK((root - root.transpose()).norm() < 1e-12 * spd.norm());
        CHECK((root * root - spd).norm() <= 1e-12 * spd.norm());
    }
}

TEST_CASE("matrix_sqrt rejects non-PD input and reports the eigenvalue") {
    Eigen::MatrixXd negative = -Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_WITH_AS(matrix_sqrt(negative),
                         doctest::Contains("min eigenvalue"), NumericError);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(matrix_sqrt(asym), NumericError);
}

TEST_CASE("gram square root is consistent with the gram matrix") {
    const auto basis = build_bspline_basis({9, 6}, 3, {0.0, 3.0});
    CHECK((basis.gram_sqrt * basis.gram_sqrt - basis.gram).norm() <=
          1e-10 * basis.gram.norm());
    CHECK((basis.gram_sqrt - basis.gram_sqrt.transpose()).norm() < 1e-12);
}

TEST_CASE("smoothing recovers exact in-span curves") {
    const auto basis = build_bspline_basis({6}, 3, {0.0, 1.0});
    Rng rng(3);
    Eigen::VectorXd truth(6);
    for (int b = 0; b < 6; ++b) {
        truth[b] = rng.normal();
    }
    const auto curves = sample_curves(1, 40, {0.0, 1.0},
                                      [&](int, int, double t) {
                                          return truth.dot(basis.evaluate(0, t));
                                      });
    const CoefficientMatrix coeffs = smooth_curves(curves, basis);
    CHECK((coeffs.row(0).transpose() - truth).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("constant curves give constant coefficients") {
    const auto basis = build_bspline_basis({8}, 3, {0.0, 2.0});
    const auto curves = sample_curves(1, 30, {0.0, 2.0},
                                      [](int, int, double) { return 5.0; });
    const CoefficientMatrix coeffs = smooth_curves(curves, basis);
    for (int b = 0; b < 8; ++b) {
        CHECK(coeffs(0, b) == doctest::Approx(5.0).epsilon(1e-10));
    }
}

TEST_CASE("residuals are orthogonal to the design columns") {
    const auto basis = build_bspline_basis({7}, 3, {0.0, 1.0});
    Rng rng(11);
    const auto curves = sample_curves(
        1, 60, {0.0, 1.0}, [&](int, int, double t) {
            return std::sin(6.0 * t) + 0.3 * rng.normal();
        });
    const CoefficientMatrix coeffs = smooth_curves(curves, basis);
    const Eigen::MatrixXd design =
        design_matrix(basis, 0, curves.curves[0].components[0].times);
    Eigen::VectorXd values(60);
    for (int r = 0; r < 60; ++r) {
        values[r] = curves.curves[0].components[0].values[static_cast<std::size_t>(r)];
    }
    const Eigen::VectorXd residual = values - design * coeffs.row(0).transpose();
    CHECK((design.transpose() * residual).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("smoothing twice is a projection") {
    const auto basis = build_bspline_basis({6, 5}, 3, {1.0, 21.0});
    Rng rng(13);
    const auto curves = sample_curves(
        3, 50, {1.0, 21.0},
        [&](int, int, double t) { return std::cos(t) + 0.5 * rng.normal(); },
        2);
    const CoefficientMatrix first = smooth_curves(curves, basis);

    CurveSet reconstructed = curves;
    for (int i = 0; i < curves.size(); ++i) {
        for (int j = 0; j < 2; ++j) {
            auto& comp = reconstructed.curves[static_cast<std::size_t>(i)]
                             .components[static_cast<std::size_t>(j)];
            const Eigen::RowVectorXd row = first.row(i);
            for (std::size_t r = 0; r < comp.times.size(); ++r) {
                comp.values[r] = evaluate_curve(row, basis, j, comp.times[r]);
            }
        }
    }
    const CoefficientMatrix second = smooth_curves(reconstructed, basis);
    CHECK((first - second).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("underdetermined and rank-deficient designs are reported") {
    const auto basis = build_bspline_basis({10}, 3, {0.0, 1.0});
    // too few points
    const auto sparse = sample_curves(1, 5, {0.0, 1.0},
                                      [](int, int, double t) { return t; });
    CHECK_THROWS_WITH_AS(smooth_curves(sparse, basis),
                         doctest::Contains("component 1"), SmoothingError);

    // enough rows but only two distinct time points
    CurveSet repeated;
    repeated.domain = {0.0, 1.0};
    Curve curve;
    curve.id = "degenerate";
    ComponentSamples samples;
    for (int r = 0; r < 12; ++r) {
        samples.times.push_back(r % 2 == 0 ? 0.25 : 0.75);
        samples.values.push_back(1.0);
    }
    curve.components.push_back(samples);
    repeated.curves.push_back(curve);
    CHECK_THROWS_WITH_AS(smooth_curves(repeated, basis),
                         doctest::Contains("degenerate"), SmoothingError);
}

TEST_CASE("per-curve time grids are supported") {
    const auto basis = build_bspline_basis({5}, 3, {0.0, 1.0});
    CurveSet set;
    set.domain = {0.0, 1.0};
    Rng rng(5);
    for (int i = 0; i < 3; ++i) {
        Curve curve;
        curve.id = "v" + std::to_string(i);
        ComponentSamples samples;
        const int points = 20 + 7 * i;
        for (int r = 0; r < points; ++r) {
            const double t = static_cast<double>(r) / (points - 1);
            samples.times.push_back(t);
            samples.values.push_back(t * t + 0.01 * rng.normal());
        }
        curve.components.push_back(std::move(samples));
        set.curves.push_back(std::move(curve));
    }
    const CoefficientMatrix coeffs = smooth_curves(set, basis);
    CHECK(coeffs.rows() == 3);
    CHECK(coeffs.allFinite());
}
