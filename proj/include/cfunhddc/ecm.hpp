#pragma once

#include <utility>

#include "cfunhddc/init.hpp"
#include "cfunhddc/model.hpp"

namespace cfunhddc {

// Log density of a coefficient vector under the cluster's Gaussian (or its
// inflated abnormal counterpart). Evaluated through projections of
// y = W^{1/2}(c - mu) onto the cluster subspace, never through a dense
// covariance matrix.
double cluster_log_density(const Eigen::VectorXd& coeff,
                           const ClusterParams& cluster, bool inflated,
                           const GramMetric& metric);

// Posterior cluster memberships t and within-cluster normality posteriors s,
// computed in log space with log-sum-exp stabilization.
Responsibilities e_step(const CoefficientMatrix& coeffs,
                        const MixtureModel& model);

// First conditional maximization: updates mixing proportions, normal
// fractions, means and the per-cluster subspace/variance structure with the
// inflation factors held fixed. With a Cattell threshold the intrinsic
// dimensions are re-selected from the eigenvalue profile.
void cm1_step(const CoefficientMatrix& coeffs, const Responsibilities& resp,
              MixtureModel& model,
              std::optional<double> cattell_threshold = std::nullopt);

// Second conditional maximization: updates the inflation factors with the
// remaining parameters held fixed.
void cm2_step(const CoefficientMatrix& coeffs, const Responsibilities& resp,
              MixtureModel& model);

double observed_log_likelihood(const CoefficientMatrix& coeffs,
                               const MixtureModel& model);

// MAP labels (lowest index wins ties) and outlier flags (normality posterior
// at the assigned cluster <= 0.5).
std::pair<std::vector<int>, std::vector<std::uint8_t>>
map_classify(const Responsibilities& resp);

// Full ECM run: one CM1/CM2 sweep from the initial hard assignments, then
// alternating E/CM1/CM2 until the observed log-likelihood increment drops
// below epsilon or max_iter is reached. `dims` gives the intrinsic dimension
// per cluster and is ignored when a Cattell threshold is configured.
FitResult fit(const CoefficientMatrix& coeffs, int n_clusters,
              const std::vector<int>& dims, const InitState& init,
              const GramMetric& metric, const FitConfig& config = {});

} // namespace cfunhddc
