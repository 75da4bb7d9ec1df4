#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "cfunhddc/basis.hpp"

namespace cfunhddc {

// The functional metric induced by the basis Gram matrix. Inference only
// ever consumes W^{1/2}, W^{-1/2} and log|W|, never W itself.
struct GramMetric {
    int size = 0;
    Eigen::MatrixXd sqrt;     // W^{1/2}, symmetric
    Eigen::MatrixXd inv_sqrt; // W^{-1/2}, symmetric
    double log_det = 0.0;     // log|W|

    static GramMetric from_gram(const Eigen::MatrixXd& gram);
    static GramMetric from_basis(const BasisSystem& basis);
    static GramMetric identity(int size);
};

// One mixture component. The cluster covariance is never materialized: it is
// determined by the subspace U_k, the leading variances a, the shared noise
// variance b and the metric, with the abnormal sub-component inflating that
// covariance by the factor eta.
struct ClusterParams {
    double mixing = 0.0;          // pi_k
    double normal_fraction = 1.0; // beta_k, share of uncontaminated data
    double inflation = 1.0;       // eta_k >= 1
    Eigen::VectorXd mean;         // B-vector in coefficient space
    int dim = 1;                  // intrinsic dimension d_k
    Eigen::MatrixXd subspace;     // B x d_k, orthonormal columns
    Eigen::VectorXd variances;    // a_k1 >= ... >= a_kd_k
    double noise_variance = 0.0;  // b_k
};

struct MixtureModel {
    int n_clusters = 0;
    std::vector<ClusterParams> clusters;
    GramMetric metric;

    int basis_size() const { return metric.size; }
};

struct Responsibilities {
    Eigen::MatrixXd t; // n x K cluster posteriors, rows sum to 1
    Eigen::MatrixXd s; // n x K normality posteriors
};

struct FitConfig {
    double epsilon = 1e-4; // absolute log-likelihood increment threshold
    int max_iter = 200;
    // When set, d_k is re-selected from each cluster's eigenvalue profile at
    // every iteration instead of staying fixed.
    std::optional<double> cattell_threshold;
};

struct FitResult {
    MixtureModel model;
    Responsibilities resp;
    std::vector<double> loglik_trace; // one entry per completed CM sweep
    int iterations = 0;
    bool converged = false;
    std::vector<int> labels;           // 0-based MAP cluster per curve
    std::vector<std::uint8_t> outlier; // normality posterior <= 0.5
    double bic = 0.0;
    double aic = 0.0;
};

} // namespace cfunhddc
