#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cfunhddc/basis.hpp"

namespace cfunhddc {

enum class InitMethod { Trimmed, Kmeans, Random };

struct InitConfig {
    InitMethod method = InitMethod::Trimmed;
    double trim_fraction = 0.2; // share of points excluded from center updates
    int nb_init = 10;           // independent restarts, best kept by BIC
    int max_iterations = 100;
    std::uint64_t seed = 0;
};

// Initial latent state for the ECM loop: hard assignments z, soft normality
// v and unit inflation factors. v is 0.99 on the assigned cluster and 0
// elsewhere, except that points trimmed by the trimmed initializer start at
// v = 0: marking the suspected outliers abnormal is what lifts the first
// inflation update above 1. With v uniform at 0.99 the inflation update is
// identically 1 (the weighted mean Mahalanobis distance under the freshly
// fitted covariance is exactly the dimension), so the contaminated fit
// collapses to the uncontaminated one and nothing is ever flagged.
struct InitState {
    Eigen::MatrixXd z;   // n x K one-hot
    Eigen::MatrixXd v;   // n x K
    Eigen::VectorXd eta; // K
};

struct TrimmedKmeans {
    Eigen::MatrixXd centers;            // K x B
    std::vector<int> labels;            // nearest-center label for every point
    std::vector<std::uint8_t> trimmed;  // exactly ceil(trim_fraction * n) set
    double objective = 0.0;             // within-cluster SSQ over untrimmed points
    std::vector<double> objective_trace; // one entry per iteration
    int iterations = 0;
    int reseeded = 0;                   // emptied clusters re-seeded mid-run
};

// Lloyd iterations where the ceil(alpha*n) points farthest from their
// assigned center are excluded from each center update. Seeding is
// k-means++ restricted to the (1-alpha) fraction of closest points, so
// candidate outliers cannot become initial centers. alpha = 0 reduces to
// standard k-means with standard k-means++ seeding. Trimmed points keep a
// nearest-center label so downstream consumers always see a full assignment.
TrimmedKmeans trimmed_kmeans(const Eigen::MatrixXd& points, int k,
                             double trim_fraction, std::uint64_t seed,
                             int max_iterations = 100);

// Same iteration scheme from caller-supplied initial centers.
TrimmedKmeans trimmed_kmeans_from(const Eigen::MatrixXd& points,
                                  Eigen::MatrixXd centers,
                                  double trim_fraction,
                                  int max_iterations = 100);

InitState initialize(const CoefficientMatrix& coeffs, int k,
                     const InitConfig& config);

} // namespace cfunhddc
