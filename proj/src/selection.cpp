#include "cfunhddc/selection.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>

#include "cfunhddc/errors.hpp"
#include "cfunhddc/parallel.hpp"
#include "cfunhddc/rng.hpp"

namespace cfunhddc {

ComplexityCount count_parameters(int n_clusters, int basis_size,
                                 const std::vector<int>& dims) {
    if (n_clusters < 1 || basis_size < 1) {
        throw ConfigError("cluster count and basis size must be >= 1");
    }
    if (static_cast<int>(dims.size()) != n_clusters) {
        throw ConfigError("expected one intrinsic dimension per cluster");
    }
    ComplexityCount count;
    const long long k = n_clusters;
    const long long b = basis_size;
    count.means_and_proportions = k * b + k - 1;
    long long dim_sum = 0;
    for (int d : dims) {
        if (d < 1 || d > basis_size) {
            throw ConfigError("intrinsic dimension " + std::to_string(d) +
                              " outside [1, " + std::to_string(basis_size) +
                              "]");
        }
        const long long dl = d;
        // d * (B - (d + 1) / 2); d(d + 1) is even, so this stays integral.
        count.orientations += dl * b - dl * (dl + 1) / 2;
        dim_sum += dl;
    }
    count.variances = k + dim_sum;
    count.contamination = 2 * k;
    count.total = count.means_and_proportions + count.orientations +
                  count.variances + count.contamination;
    return count;
}

double bic(double loglik, long long n_params, long long n_obs) {
    if (n_obs < 1) {
        throw ConfigError("BIC needs at least one observation");
    }
    return loglik - 0.5 * static_cast<double>(n_params) *
                        std::log(static_cast<double>(n_obs));
}

double aic(double loglik, long long n_params) {
    return loglik - static_cast<double>(n_params);
}

int cattell_select(const Eigen::VectorXd& eigenvalues, double threshold) {
    const Eigen::Index count = eigenvalues.size();
    if (count < 2) {
        throw ConfigError("scree selection needs at least two eigenvalues");
    }
    if (!(threshold > 0.0) || threshold > 1.0) {
        throw ConfigError("scree threshold must lie in (0, 1]");
    }
    const Eigen::VectorXd diffs =
        eigenvalues.head(count - 1) - eigenvalues.tail(count - 1);
    const double max_diff = diffs.maxCoeff();
    if (!(max_diff > 0.0)) {
        return 1; // flat spectrum, no usable gap
    }
    int dim = 1;
    for (Eigen::Index l = 0; l < diffs.size(); ++l) {
        if (diffs[l] >= threshold * max_diff) {
            dim = static_cast<int>(l) + 1;
        }
    }
    return dim;
}

DimStrategy DimStrategy::fixed(int d) {
    DimStrategy strategy;
    strategy.kind = Kind::Grid;
    strategy.grid = {d};
    return strategy;
}

DimStrategy DimStrategy::common_grid(std::vector<int> values) {
    DimStrategy strategy;
    strategy.kind = Kind::Grid;
    strategy.grid = std::move(values);
    return strategy;
}

DimStrategy DimStrategy::cattell(std::vector<double> thresholds) {
    DimStrategy strategy;
    strategy.kind = Kind::Cattell;
    strategy.thresholds = std::move(thresholds);
    return strategy;
}

bool candidate_preferred(const Candidate& a, const Candidate& b) {
    if (a.failed || !a.converged) {
        return false;
    }
    if (b.failed || !b.converged) {
        return true;
    }
    if (a.bic != b.bic) {
        return a.bic > b.bic;
    }
    if (a.n_clusters != b.n_clusters) {
        return a.n_clusters < b.n_clusters;
    }
    const long long da = std::accumulate(a.dims.begin(), a.dims.end(), 0LL);
    const long long db = std::accumulate(b.dims.begin(), b.dims.end(), 0LL);
    if (da != db) {
        return da < db;
    }
    return a.restart < b.restart;
}

namespace {

struct SweepCell {
    int n_clusters = 0;
    std::vector<int> dims;                // grid mode
    std::optional<double> threshold;      // Cattell mode
    std::string label;
};

std::string dims_label(const std::vector<int>& dims) {
    const bool common = std::all_of(dims.begin(), dims.end(),
                                    [&](int d) { return d == dims.front(); });
    if (common) {
        return "d=" + std::to_string(dims.front());
    }
    std::ostringstream out;
    out << "d=[";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        out << (i ? "," : "") << dims[i];
    }
    out << "]";
    return out.str();
}

std::vector<SweepCell> build_cells(const std::vector<int>& k_values,
                                   const DimStrategy& strategy) {
    std::vector<SweepCell> cells;
    for (int k : k_values) {
        if (k < 1) {
            throw ConfigError("cluster counts must be >= 1");
        }
        if (strategy.kind == DimStrategy::Kind::Cattell) {
            if (strategy.thresholds.empty()) {
                throw ConfigError("Cattell strategy needs thresholds");
            }
            for (double th : strategy.thresholds) {
                SweepCell cell;
                cell.n_clusters = k;
                cell.threshold = th;
                std::ostringstream label;
                label << "cattell=" << th;
                cell.label = label.str();
                cells.push_back(std::move(cell));
            }
            continue;
        }
        if (strategy.grid.empty()) {
            throw ConfigError("grid strategy needs dimension values");
        }
        if (!strategy.per_cluster_exhaustive) {
            for (int d : strategy.grid) {
                SweepCell cell;
                cell.n_clusters = k;
                cell.dims.assign(static_cast<std::size_t>(k), d);
                cell.label = dims_label(cell.dims);
                cells.push_back(std::move(cell));
            }
            continue;
        }
        // Exhaustive per-cluster grid: |grid|^K combinations.
        double combos = 1.0;
        for (int c = 0; c < k; ++c) {
            combos *= static_cast<double>(strategy.grid.size());
        }
        if (combos > 100000.0) {
            throw ConfigError("exhaustive dimension grid too large (" +
                              std::to_string(static_cast<long long>(combos)) +
                              " combinations)");
        }
        std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
        while (true) {
            SweepCell cell;
            cell.n_clusters = k;
            for (int c = 0; c < k; ++c) {
                cell.dims.push_back(
                    strategy.grid[idx[static_cast<std::size_t>(c)]]);
            }
            cell.label = dims_label(cell.dims);
            cells.push_back(std::move(cell));
            int pos = k - 1;
            while (pos >= 0) {
                if (++idx[static_cast<std::size_t>(pos)] <
                    strategy.grid.size()) {
                    break;
                }
                idx[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) {
                break;
            }
        }
    }
    return cells;
}

SelectionReport run_sweep(const CoefficientMatrix& coeffs,
                          const GramMetric& metric,
                          const std::vector<SweepCell>& cells,
                          const InitConfig& init_config,
                          const FitConfig& fit_config) {
    if (coeffs.cols() != metric.size) {
        throw SelectionError("coefficient matrix has " +
                             std::to_string(coeffs.cols()) +
                             " columns but the basis metric expects " +
                             std::to_string(metric.size) +
                             "; candidates must share one basis");
    }
    if (init_config.nb_init < 1) {
        throw ConfigError("nb_init must be >= 1");
    }
    const std::size_t restarts = static_cast<std::size_t>(init_config.nb_init);
    const std::size_t n_tasks = cells.size() * restarts;

    SelectionReport report;
    report.basis_size = metric.size;
    report.rows.resize(n_tasks);

    // Best converged fit per cell; the comparator is deterministic, so the
    // final content does not depend on scheduling.
    std::vector<std::optional<std::pair<Candidate, FitResult>>> cell_best(
        cells.size());
    std::mutex best_mutex;

    parallel_tasks(n_tasks, [&](std::size_t task) {
        const std::size_t cell_idx = task / restarts;
        const int restart = static_cast<int>(task % restarts);
        const SweepCell& cell = cells[cell_idx];

        Candidate row;
        row.n_clusters = cell.n_clusters;
        row.dims = cell.dims;
        row.d_config = cell.label;
        row.restart = restart;
        try {
            InitConfig init = init_config;
            init.seed = derive_seed(init_config.seed, task);
            const InitState state =
                initialize(coeffs, cell.n_clusters, init);
            FitConfig fc = fit_config;
            fc.cattell_threshold = cell.threshold;
            std::vector<int> dims = cell.dims;
            if (cell.threshold) {
                dims.assign(static_cast<std::size_t>(cell.n_clusters), 1);
            }
            FitResult fr =
                fit(coeffs, cell.n_clusters, dims, state, metric, fc);

            row.dims.clear();
            for (const auto& cl : fr.model.clusters) {
                row.dims.push_back(cl.dim);
            }
            row.loglik = fr.loglik_trace.back();
            row.n_params =
                count_parameters(cell.n_clusters, metric.size, row.dims).total;
            row.bic = fr.bic;
            row.aic = fr.aic;
            row.converged = fr.converged;

            if (fr.converged) {
                std::lock_guard<std::mutex> lock(best_mutex);
                auto& slot = cell_best[cell_idx];
                if (!slot || candidate_preferred(row, slot->first)) {
                    slot = std::make_pair(row, std::move(fr));
                }
            }
        } catch (const Error& e) {
            row.failed = true;
            row.fail_reason = e.what();
        }
        report.rows[task] = std::move(row);
    });

    // Global winner across cell bests, with a trace of the ties broken.
    std::optional<std::size_t> winner;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (!cell_best[c]) {
            continue;
        }
        if (!winner) {
            winner = c;
            continue;
        }
        const Candidate& challenger = cell_best[c]->first;
        const Candidate& incumbent = cell_best[*winner]->first;
        if (candidate_preferred(challenger, incumbent)) {
            if (challenger.bic == incumbent.bic) {
                std::ostringstream note;
                note << "K=" << challenger.n_clusters << " "
                     << challenger.d_config << " replaces K="
                     << incumbent.n_clusters << " " << incumbent.d_config
                     << " at equal BIC (smaller model wins)";
                report.tie_break_trace.push_back(note.str());
            }
            winner = c;
        }
    }
    if (!winner) {
        throw SelectionError("no sweep cell produced a converged fit");
    }
    report.chosen = cell_best[*winner]->first;
    report.best_fit = std::move(cell_best[*winner]->second);
    {
        std::ostringstream note;
        note << "chosen: K=" << report.chosen->n_clusters << " "
             << report.chosen->d_config << " restart="
             << report.chosen->restart << " BIC=" << report.chosen->bic;
        report.tie_break_trace.push_back(note.str());
    }
    return report;
}

} // namespace

SelectionReport select_model(const CoefficientMatrix& coeffs,
                             const GramMetric& metric,
                             const std::vector<int>& k_values,
                             const DimStrategy& strategy,
                             const InitConfig& init_config,
                             const FitConfig& fit_config) {
    if (k_values.empty()) {
        throw ConfigError("cluster count range is empty");
    }
    return run_sweep(coeffs, metric, build_cells(k_values, strategy),
                     init_config, fit_config);
}

FitResult fit_best_restart(const CoefficientMatrix& coeffs,
                           const GramMetric& metric, int n_clusters,
                           const std::vector<int>& dims,
                           const InitConfig& init_config,
                           const FitConfig& fit_config) {
    SweepCell cell;
    cell.n_clusters = n_clusters;
    cell.dims = dims;
    cell.label = dims_label(dims);
    SelectionReport report =
        run_sweep(coeffs, metric, {cell}, init_config, fit_config);
    return std::move(*report.best_fit);
}

} // namespace cfunhddc
