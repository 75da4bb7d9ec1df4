#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cfunhddc/ecm.hpp"

namespace cfunhddc {

// Free-parameter count of a fitted mixture, split the way the model is
// parameterized: means and mixing proportions, subspace orientations,
// variances, plus two contamination parameters per cluster.
struct ComplexityCount {
    long long means_and_proportions = 0; // K*B + K - 1
    long long orientations = 0;          // sum_k d_k * (B - (d_k + 1) / 2)
    long long variances = 0;             // K + sum_k d_k
    long long contamination = 0;         // 2K
    long long total = 0;
};

ComplexityCount count_parameters(int n_clusters, int basis_size,
                                 const std::vector<int>& dims);

// Penalized criteria; larger is better.
double bic(double loglik, long long n_params, long long n_obs);
double aic(double loglik, long long n_params);

// Scree-based dimension choice: with consecutive differences
// delta_l = lambda_l - lambda_{l+1}, returns the largest l whose difference
// reaches threshold * max(delta). Degenerate all-equal spectra give 1.
int cattell_select(const Eigen::VectorXd& eigenvalues, double threshold);

// How intrinsic dimensions are explored during model selection.
struct DimStrategy {
    enum class Kind { Grid, Cattell };
    Kind kind = Kind::Grid;
    // Grid mode: common-d sweep over these values. With
    // per_cluster_exhaustive set, all |grid|^K per-cluster combinations are
    // explored instead (use only for small K).
    std::vector<int> grid{2};
    bool per_cluster_exhaustive = false;
    // Cattell mode: one sweep cell per threshold.
    std::vector<double> thresholds{};

    static DimStrategy fixed(int d);
    static DimStrategy common_grid(std::vector<int> values);
    static DimStrategy cattell(std::vector<double> thresholds);
};

struct Candidate {
    int n_clusters = 0;
    std::vector<int> dims;  // final per-cluster dimensions
    std::string d_config;   // sweep cell description, e.g. "d=2" or "cattell=0.2"
    int restart = 0;
    double loglik = std::numeric_limits<double>::quiet_NaN();
    long long n_params = 0;
    double bic = std::numeric_limits<double>::quiet_NaN();
    double aic = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    bool failed = false;
    std::string fail_reason;
};

struct SelectionReport {
    int basis_size = 0;
    std::vector<Candidate> rows; // one per (cell, restart), enumeration order
    std::optional<Candidate> chosen;
    std::vector<std::string> tie_break_trace;
    std::optional<FitResult> best_fit; // fit behind `chosen`
};

// Tie-break order used everywhere a winner is picked: higher BIC, then
// smaller K, then smaller total intrinsic dimension, then lower restart
// index. Only converged candidates are eligible.
bool candidate_preferred(const Candidate& a, const Candidate& b);

// Sweeps K and the dimension strategy, running nb_init seeded restarts per
// cell (in parallel, capped by CFUNHDDC_THREADS) and keeping the best
// converged fit per cell by BIC. Cells whose restarts all fail are marked
// failed and excluded; if every cell fails a SelectionError is thrown.
SelectionReport select_model(const CoefficientMatrix& coeffs,
                             const GramMetric& metric,
                             const std::vector<int>& k_values,
                             const DimStrategy& strategy,
                             const InitConfig& init_config,
                             const FitConfig& fit_config = {});

// Single-cell convenience: best of nb_init restarts for a fixed (K, dims).
FitResult fit_best_restart(const CoefficientMatrix& coeffs,
                           const GramMetric& metric, int n_clusters,
                           const std::vector<int>& dims,
                           const InitConfig& init_config,
                           const FitConfig& fit_config = {});

} // namespace cfunhddc
