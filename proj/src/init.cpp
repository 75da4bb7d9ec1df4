#include "cfunhddc/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cfunhddc/errors.hpp"
#include "cfunhddc/rng.hpp"

namespace cfunhddc {

namespace {

// k-means++ seeding restricted to the (1 - trim_fraction) share of points
// closest to the centers chosen so far: squared-distance sampling as usual,
// but the farthest candidates get zero weight so isolated outliers cannot
// seed a center. trim_fraction = 0 is plain k-means++.
Eigen::MatrixXd seed_centers(const Eigen::MatrixXd& points, int k,
                             double trim_fraction, Rng& rng) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd centers(k, points.cols());
    centers.row(0) = points.row(
        static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
    Eigen::VectorXd dist =
        (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    const Eigen::Index n_keep = std::max<Eigen::Index>(
        1, n - static_cast<Eigen::Index>(
                   std::ceil(trim_fraction * static_cast<double>(n))));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (int c = 1; c < k; ++c) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::sort(order.begin(), order.end(),
                  [&](Eigen::Index a, Eigen::Index b) {
                      if (dist[a] != dist[b]) {
                          return dist[a] < dist[b];
                      }
                      return a < b;
                  });
        double total = 0.0;
        for (Eigen::Index r = 0; r < n_keep; ++r) {
            total += dist[order[static_cast<std::size_t>(r)]];
        }
        Eigen::Index pick;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            pick = order[static_cast<std::size_t>(n_keep - 1)];
            for (Eigen::Index r = 0; r < n_keep; ++r) {
                acc += dist[order[static_cast<std::size_t>(r)]];
                if (acc >= target) {
                    pick = order[static_cast<std::size_t>(r)];
                    break;
                }
            }
        } else {
            pick = order[static_cast<std::size_t>(
                rng.below(static_cast<std::uint64_t>(n_keep)))];
        }
        centers.row(c) = points.row(pick);
        dist = dist.cwiseMin(
            (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

void assign_nearest(const Eigen::MatrixXd& points,
                    const Eigen::MatrixXd& centers, std::vector<int>& labels,
                    Eigen::VectorXd& dist) {
    const Eigen::Index n = points.rows();
    const int k = static_cast<int>(centers.rows());
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        double best_d = (points.row(i) - centers.row(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
            const double d = (points.row(i) - centers.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
        dist[i] = best_d;
    }
}

} // namespace

TrimmedKmeans trimmed_kmeans_from(const Eigen::MatrixXd& points,
                                  Eigen::MatrixXd centers,
                                  double trim_fraction, int max_iterations) {
    const Eigen::Index n = points.rows();
    const int k = static_cast<int>(centers.rows());
    if (trim_fraction < 0.0 || trim_fraction >= 1.0) {
        throw ConfigError("trim fraction must lie in [0, 1)");
    }
    const int n_trim =
        static_cast<int>(std::ceil(trim_fraction * static_cast<double>(n)));
    if (n - n_trim < k) {
        throw ConfigError("trimming leaves fewer points than clusters");
    }

    TrimmedKmeans result;
    result.centers = std::move(centers);
    result.labels.assign(static_cast<std::size_t>(n), 0);
    result.trimmed.assign(static_cast<std::size_t>(n), 0);

    Eigen::VectorXd dist(n);
    std::vector<int> prev_labels;
    std::vector<std::uint8_t> prev_trimmed;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));

    for (int iter = 0; iter < max_iterations; ++iter) {
        result.iterations = iter + 1;
        assign_nearest(points, result.centers, result.labels, dist);

        // Trim the n_trim points farthest from their assigned center; ties
        // resolved by index so runs are reproducible.
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::sort(order.begin(), order.end(),
                  [&](Eigen::Index a, Eigen::Index b) {
                      if (dist[a] != dist[b]) {
                          return dist[a] > dist[b];
                      }
                      return a < b;
                  });
        std::fill(result.trimmed.begin(), result.trimmed.end(), 0);
        for (int i = 0; i < n_trim; ++i) {
            result.trimmed[static_cast<std::size_t>(
                order[static_cast<std::size_t>(i)])] = 1;
        }

        result.objective = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!result.trimmed[static_cast<std::size_t>(i)]) {
                result.objective += dist[i];
            }
        }
        result.objective_trace.push_back(result.objective);

        if (iter > 0 && result.labels == prev_labels &&
            result.trimmed == prev_trimmed) {
            break;
        }
        prev_labels = result.labels;
        prev_trimmed = result.trimmed;

        // Means over untrimmed members; an emptied cluster is re-seeded at
        // the farthest untrimmed point instead of aborting the run.
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (result.trimmed[static_cast<std::size_t>(i)]) {
                continue;
            }
            const int c = result.labels[static_cast<std::size_t>(i)];
            sums.row(c) += points.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                result.centers.row(c) =
                    sums.row(c) / counts[static_cast<std::size_t>(c)];
            } else {
                Eigen::Index farthest = 0;
                double best = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (!result.trimmed[static_cast<std::size_t>(i)] &&
                        dist[i] > best) {
                        best = dist[i];
                        farthest = i;
                    }
                }
                result.centers.row(c) = points.row(farthest);
                ++result.reseeded;
            }
        }
    }
    return result;
}

TrimmedKmeans trimmed_kmeans(const Eigen::MatrixXd& points, int k,
                             double trim_fraction, std::uint64_t seed,
                             int max_iterations) {
    if (k < 1) {
        throw ConfigError("cluster count must be >= 1");
    }
    if (points.rows() < 1) {
        throw ConfigError("no points to cluster");
    }
    Rng rng(derive_seed(seed, 0));
    return trimmed_kmeans_from(points,
                               seed_centers(points, k, trim_fraction, rng),
                               trim_fraction, max_iterations);
}

InitState initialize(const CoefficientMatrix& coeffs, int k,
                     const InitConfig& config) {
    const Eigen::Index n = coeffs.rows();
    if (k < 1) {
        throw ConfigError("cluster count must be >= 1");
    }
    if (k > n) {
        throw ConfigError("cluster count " + std::to_string(k) +
                          " exceeds the number of curves " + std::to_string(n));
    }

    std::vector<int> labels;
    std::vector<std::uint8_t> suspected(static_cast<std::size_t>(n), 0);
    switch (config.method) {
    case InitMethod::Trimmed: {
        auto km = trimmed_kmeans(coeffs, k, config.trim_fraction, config.seed,
                                 config.max_iterations);
        labels = std::move(km.labels);
        suspected = std::move(km.trimmed);
        break;
    }
    case InitMethod::Kmeans:
        labels =
            trimmed_kmeans(coeffs, k, 0.0, config.seed, config.max_iterations)
                .labels;
        break;
    case InitMethod::Random: {
        Rng rng(derive_seed(config.seed, 0));
        const int max_tries = 1000;
        bool ok = false;
        for (int attempt = 0; attempt < max_tries && !ok; ++attempt) {
            labels.assign(static_cast<std::size_t>(n), 0);
            std::vector<char> seen(static_cast<std::size_t>(k), 0);
            for (Eigen::Index i = 0; i < n; ++i) {
                const int c =
                    static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
                labels[static_cast<std::size_t>(i)] = c;
                seen[static_cast<std::size_t>(c)] = 1;
            }
            ok = std::all_of(seen.begin(), seen.end(),
                             [](char s) { return s != 0; });
        }
        if (!ok) {
            throw ConfigError(
                "random initialization failed to cover all clusters");
        }
        break;
    }
    }

    InitState state;
    state.z = Eigen::MatrixXd::Zero(n, k);
    state.v = Eigen::MatrixXd::Zero(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int c = labels[static_cast<std::size_t>(i)];
        state.z(i, c) = 1.0;
        // Trimmed points start abnormal; see the InitState contract.
        state.v(i, c) = suspected[static_cast<std::size_t>(i)] ? 0.0 : 0.99;
    }
    state.eta = Eigen::VectorXd::Ones(k);
    return state;
}

} // namespace cfunhddc
