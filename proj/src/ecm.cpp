#include "cfunhddc/ecm.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cfunhddc/errors.hpp"
#include "cfunhddc/selection.hpp"

namespace cfunhddc {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kInf = std::numeric_limits<double>::infinity();

double lse2(double a, double b) {
    if (a == -kInf) {
        return b;
    }
    if (b == -kInf) {
        return a;
    }
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Log densities of all rows under one cluster, from the metric-transformed
// data rows y_i = W^{1/2} c_i. Mahalanobis distances come from projections
// onto the cluster subspace:
//   sum_l rho_l^2 / a_l + (|y - nu|^2 - sum_l rho_l^2) / b,
// and the log determinant of the cluster covariance is
//   sum_l log a_l + (B - d) log b - log|W|.
void row_log_densities(const Eigen::MatrixXd& transformed,
                       const ClusterParams& cl, const GramMetric& metric,
                       Eigen::VectorXd& plain, Eigen::VectorXd& inflated) {
    const int b_total = metric.size;
    const int d = cl.dim;
    const Eigen::VectorXd nu = metric.sqrt * cl.mean;
    const Eigen::MatrixXd centered = transformed.rowwise() - nu.transpose();
    const Eigen::MatrixXd proj = centered * cl.subspace;

    const Eigen::VectorXd inv_a = cl.variances.cwiseInverse();
    Eigen::VectorXd mahal =
        (proj.array().square().matrix() * inv_a).eval();
    const Eigen::VectorXd residual =
        (centered.rowwise().squaredNorm() - proj.rowwise().squaredNorm())
            .cwiseMax(0.0);
    mahal += residual / cl.noise_variance;

    const double log_det = cl.variances.array().log().sum() +
                           (b_total - d) * std::log(cl.noise_variance) -
                           metric.log_det;
    const double base = b_total * kLog2Pi + log_det;
    plain = -0.5 * (mahal.array() + base);
    inflated = -0.5 * (mahal.array() / cl.inflation + base +
                       b_total * std::log(cl.inflation));
}

struct StepContext {
    const CoefficientMatrix& coeffs;
    Eigen::MatrixXd transformed; // coeffs * W^{1/2}

    explicit StepContext(const CoefficientMatrix& c, const GramMetric& metric)
        : coeffs(c), transformed(c * metric.sqrt) {}
};

Responsibilities e_step_impl(const StepContext& ctx,
                             const MixtureModel& model) {
    const Eigen::Index n = ctx.coeffs.rows();
    const int k = model.n_clusters;

    Eigen::MatrixXd log_normal(n, k);   // log pi_k beta_k f(c; Sigma_k)
    Eigen::MatrixXd log_abnormal(n, k); // log pi_k (1-beta_k) f(c; eta Sigma_k)
    Eigen::VectorXd plain;
    Eigen::VectorXd inflated;
    for (int c = 0; c < k; ++c) {
        const ClusterParams& cl = model.clusters[static_cast<std::size_t>(c)];
        row_log_densities(ctx.transformed, cl, model.metric, plain, inflated);
        const double log_pi = std::log(cl.mixing);
        const double log_beta =
            cl.normal_fraction > 0.0 ? std::log(cl.normal_fraction) : -kInf;
        const double log_1m_beta = cl.normal_fraction < 1.0
                                       ? std::log1p(-cl.normal_fraction)
                                       : -kInf;
        log_normal.col(c) = plain.array() + (log_pi + log_beta);
        log_abnormal.col(c) = inflated.array() + (log_pi + log_1m_beta);
    }

    Responsibilities resp;
    resp.t.resize(n, k);
    resp.s.resize(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        double row_max = -kInf;
        for (int c = 0; c < k; ++c) {
            resp.t(i, c) = lse2(log_normal(i, c), log_abnormal(i, c));
            row_max = std::max(row_max, resp.t(i, c));
            const double diff = log_abnormal(i, c) - log_normal(i, c);
            if (log_normal(i, c) == -kInf) {
                resp.s(i, c) = 0.0;
            } else if (log_abnormal(i, c) == -kInf) {
                resp.s(i, c) = 1.0;
            } else {
                resp.s(i, c) = 1.0 / (1.0 + std::exp(diff));
            }
        }
        if (!std::isfinite(row_max)) {
            throw NumericError("E-step underflow: observation " +
                               std::to_string(i) +
                               " has zero density in every cluster");
        }
        double norm = -kInf;
        for (int c = 0; c < k; ++c) {
            norm = lse2(norm, resp.t(i, c));
        }
        for (int c = 0; c < k; ++c) {
            resp.t(i, c) = std::exp(resp.t(i, c) - norm);
        }
    }
    return resp;
}

void cm1_impl(const StepContext& ctx, const Responsibilities& resp,
              MixtureModel& model, std::optional<double> cattell_threshold) {
    const Eigen::Index n = ctx.coeffs.rows();
    const int b_total = model.metric.size;

    for (int c = 0; c < model.n_clusters; ++c) {
        ClusterParams& cl = model.clusters[static_cast<std::size_t>(c)];
        const Eigen::VectorXd t = resp.t.col(c);
        const Eigen::VectorXd ts = t.cwiseProduct(resp.s.col(c));
        const double gamma = t.sum();

        // The smallest admissible dimension already needs gamma >= 3; the
        // exact d-dependent check runs once d is known.
        if (!(gamma >= 3.0)) {
            throw RestartFailure("cluster " + std::to_string(c) +
                                 " degenerate: mass " + std::to_string(gamma));
        }
        cl.mixing = gamma / static_cast<double>(n);
        cl.normal_fraction = ts.sum() / gamma;

        // Weights blend normal and inflation-discounted abnormal mass.
        const Eigen::VectorXd weights = ts + (t - ts) / cl.inflation;
        const double weight_sum = weights.sum();
        if (!(weight_sum > 0.0)) {
            throw RestartFailure("cluster " + std::to_string(c) +
                                 " lost all weight");
        }
        cl.mean = (weights.transpose() * ctx.coeffs).transpose() / weight_sum;

        // Metric-space scatter about the new mean, normalized by the cluster
        // mass (not the weight sum).
        const Eigen::VectorXd nu = model.metric.sqrt * cl.mean;
        Eigen::MatrixXd scaled =
            (ctx.transformed.rowwise() - nu.transpose()).eval();
        scaled.array().colwise() *= weights.array().max(0.0).sqrt();
        Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(b_total, b_total);
        scatter.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
        scatter = scatter.selfadjointView<Eigen::Lower>();
        scatter /= gamma;
        if (!scatter.allFinite()) {
            throw NumericError("cluster " + std::to_string(c) +
                               ": non-finite scatter matrix");
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scatter);
        if (solver.info() != Eigen::Success) {
            throw NumericError("cluster " + std::to_string(c) +
                               ": eigendecomposition failed");
        }
        // Eigen returns ascending order; flip to descending.
        const Eigen::VectorXd values = solver.eigenvalues().reverse();
        const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();

        if (cattell_threshold) {
            cl.dim = cattell_select(values, *cattell_threshold);
        }
        if (cl.dim < 1 || cl.dim > b_total - 1) {
            throw ConfigError("cluster " + std::to_string(c) +
                              ": intrinsic dimension " +
                              std::to_string(cl.dim) +
                              " not in [1, B-1] with B = " +
                              std::to_string(b_total));
        }
        if (gamma < static_cast<double>(cl.dim) + 2.0) {
            throw RestartFailure(
                "cluster " + std::to_string(c) + " degenerate: mass " +
                std::to_string(gamma) + " cannot support dimension " +
                std::to_string(cl.dim));
        }

        const int d = cl.dim;
        cl.subspace = vectors.leftCols(d);
        cl.variances = values.head(d);
        const double trace = scatter.trace();
        double noise =
            (trace - cl.variances.sum()) / static_cast<double>(b_total - d);
        noise = std::max(noise, 1e-10 * trace / static_cast<double>(b_total));
        if (!(noise > 0.0) || !std::isfinite(noise)) {
            throw NumericError("cluster " + std::to_string(c) +
                               ": noise variance collapsed (" +
                               std::to_string(noise) + ")");
        }
        cl.noise_variance = noise;
        cl.variances = cl.variances.cwiseMax(noise);
    }
}

void cm2_impl(const StepContext& ctx, const Responsibilities& resp,
              MixtureModel& model) {
    constexpr double kDegenerate = 1e-10;
    for (int c = 0; c < model.n_clusters; ++c) {
        ClusterParams& cl = model.clusters[static_cast<std::size_t>(c)];
        const Eigen::VectorXd nu = model.metric.sqrt * cl.mean;
        const Eigen::MatrixXd centered =
            ctx.transformed.rowwise() - nu.transpose();
        const Eigen::MatrixXd proj = centered * cl.subspace;
        const Eigen::VectorXd inv_a = cl.variances.cwiseInverse();
        Eigen::VectorXd mahal = (proj.array().square().matrix() * inv_a).eval();
        mahal += (centered.rowwise().squaredNorm() -
                  proj.rowwise().squaredNorm())
                     .cwiseMax(0.0) /
                 cl.noise_variance;

        const Eigen::VectorXd t = resp.t.col(c);
        const Eigen::VectorXd ts = t.cwiseProduct(resp.s.col(c));
        const double abnormal_mass = t.sum() - ts.sum();
        if (abnormal_mass <= kDegenerate) {
            cl.inflation = 1.0;
            continue;
        }
        const double numerator = (t - ts).dot(mahal);
        cl.inflation = std::max(
            1.0, numerator / (model.metric.size * abnormal_mass));
    }
}

double log_likelihood_impl(const StepContext& ctx,
                           const MixtureModel& model) {
    const Eigen::Index n = ctx.coeffs.rows();
    const int k = model.n_clusters;
    Eigen::MatrixXd log_mix(n, k);
    Eigen::VectorXd plain;
    Eigen::VectorXd inflated;
    for (int c = 0; c < k; ++c) {
        const ClusterParams& cl = model.clusters[static_cast<std::size_t>(c)];
        row_log_densities(ctx.transformed, cl, model.metric, plain, inflated);
        const double log_pi = std::log(cl.mixing);
        const double log_beta =
            cl.normal_fraction > 0.0 ? std::log(cl.normal_fraction) : -kInf;
        const double log_1m_beta = cl.normal_fraction < 1.0
                                       ? std::log1p(-cl.normal_fraction)
                                       : -kInf;
        for (Eigen::Index i = 0; i < n; ++i) {
            log_mix(i, c) = log_pi + lse2(log_beta + plain[i],
                                          log_1m_beta + inflated[i]);
        }
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = -kInf;
        for (int c = 0; c < k; ++c) {
            row = lse2(row, log_mix(i, c));
        }
        if (!std::isfinite(row)) {
            throw NumericError("log-likelihood underflow at observation " +
                               std::to_string(i));
        }
        total += row;
    }
    return total;
}

void check_shapes(const CoefficientMatrix& coeffs, int n_clusters,
                  const InitState& init, const GramMetric& metric) {
    if (n_clusters < 1) {
        throw ConfigError("cluster count must be >= 1");
    }
    if (coeffs.cols() != metric.size) {
        throw ConfigError("coefficient matrix has " +
                          std::to_string(coeffs.cols()) +
                          " columns but the metric expects " +
                          std::to_string(metric.size));
    }
    if (init.z.rows() != coeffs.rows() || init.z.cols() != n_clusters ||
        init.v.rows() != coeffs.rows() || init.v.cols() != n_clusters ||
        init.eta.size() != n_clusters) {
        throw ConfigError("initial state shape does not match the data");
    }
    if (!coeffs.allFinite()) {
        throw ConfigError("coefficient matrix contains non-finite entries");
    }
}

} // namespace

double cluster_log_density(const Eigen::VectorXd& coeff,
                           const ClusterParams& cluster, bool inflated,
                           const GramMetric& metric) {
    const int b_total = metric.size;
    const int d = cluster.dim;
    const Eigen::VectorXd y = metric.sqrt * (coeff - cluster.mean);
    const Eigen::VectorXd rho = cluster.subspace.transpose() * y;
    const double proj_sq = rho.squaredNorm();
    double mahal = rho.array().square().matrix().dot(
        cluster.variances.cwiseInverse());
    mahal += std::max(y.squaredNorm() - proj_sq, 0.0) / cluster.noise_variance;

    double log_det = cluster.variances.array().log().sum() +
                     (b_total - d) * std::log(cluster.noise_variance) -
                     metric.log_det;
    if (inflated) {
        log_det += b_total * std::log(cluster.inflation);
        mahal /= cluster.inflation;
    }
    const double value = -0.5 * (b_total * kLog2Pi + log_det + mahal);
    if (!std::isfinite(value)) {
        throw NumericError("non-finite cluster log-density");
    }
    return value;
}

Responsibilities e_step(const CoefficientMatrix& coeffs,
                        const MixtureModel& model) {
    StepContext ctx(coeffs, model.metric);
    return e_step_impl(ctx, model);
}

void cm1_step(const CoefficientMatrix& coeffs, const Responsibilities& resp,
              MixtureModel& model, std::optional<double> cattell_threshold) {
    StepContext ctx(coeffs, model.metric);
    cm1_impl(ctx, resp, model, cattell_threshold);
}

void cm2_step(const CoefficientMatrix& coeffs, const Responsibilities& resp,
              MixtureModel& model) {
    StepContext ctx(coeffs, model.metric);
    cm2_impl(ctx, resp, model);
}

double observed_log_likelihood(const CoefficientMatrix& coeffs,
                               const MixtureModel& model) {
    StepContext ctx(coeffs, model.metric);
    return log_likelihood_impl(ctx, model);
}

std::pair<std::vector<int>, std::vector<std::uint8_t>>
map_classify(const Responsibilities& resp) {
    const Eigen::Index n = resp.t.rows();
    const int k = static_cast<int>(resp.t.cols());
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    std::vector<std::uint8_t> outlier(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        for (int c = 1; c < k; ++c) {
            if (resp.t(i, c) > resp.t(i, best)) {
                best = c;
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
        outlier[static_cast<std::size_t>(i)] = resp.s(i, best) <= 0.5 ? 1 : 0;
    }
    return {std::move(labels), std::move(outlier)};
}

FitResult fit(const CoefficientMatrix& coeffs, int n_clusters,
              const std::vector<int>& dims, const InitState& init,
              const GramMetric& metric, const FitConfig& config) {
    check_shapes(coeffs, n_clusters, init, metric);
    if (!config.cattell_threshold) {
        if (static_cast<int>(dims.size()) != n_clusters) {
            throw ConfigError("expected one intrinsic dimension per cluster");
        }
        for (int d : dims) {
            if (d < 1 || d > metric.size - 1) {
                throw ConfigError("intrinsic dimension " + std::to_string(d) +
                                  " not in [1, B-1] with B = " +
                                  std::to_string(metric.size));
            }
        }
    }

    FitResult result;
    MixtureModel& model = result.model;
    model.n_clusters = n_clusters;
    model.metric = metric;
    model.clusters.resize(static_cast<std::size_t>(n_clusters));
    for (int c = 0; c < n_clusters; ++c) {
        ClusterParams& cl = model.clusters[static_cast<std::size_t>(c)];
        cl.dim = config.cattell_threshold ? 1 : dims[static_cast<std::size_t>(c)];
        cl.inflation = init.eta[c];
    }

    StepContext ctx(coeffs, metric);

    // One CM sweep from the initializer's hard assignments before the first
    // E-step.
    Responsibilities resp{init.z, init.v};
    cm1_impl(ctx, resp, model, config.cattell_threshold);
    cm2_impl(ctx, resp, model);
    result.loglik_trace.push_back(log_likelihood_impl(ctx, model));

    result.converged = false;
    for (int iter = 0; iter < config.max_iter; ++iter) {
        resp = e_step_impl(ctx, model);
        cm1_impl(ctx, resp, model, config.cattell_threshold);
        cm2_impl(ctx, resp, model);
        result.loglik_trace.push_back(log_likelihood_impl(ctx, model));
        result.iterations = iter + 1;
        const auto last = result.loglik_trace.size() - 1;
        if (std::abs(result.loglik_trace[last] -
                     result.loglik_trace[last - 1]) < config.epsilon) {
            result.converged = true;
            break;
        }
    }

    result.resp = e_step_impl(ctx, model);
    auto [labels, outlier] = map_classify(result.resp);
    result.labels = std::move(labels);
    result.outlier = std::move(outlier);

    std::vector<int> final_dims;
    final_dims.reserve(static_cast<std::size_t>(n_clusters));
    for (const auto& cl : model.clusters) {
        final_dims.push_back(cl.dim);
    }
    const long long xi =
        count_parameters(n_clusters, metric.size, final_dims).total;
    const double loglik = result.loglik_trace.back();
    result.bic = bic(loglik, xi, coeffs.rows());
    result.aic = aic(loglik, xi);
    return result;
}

} // namespace cfunhddc
