#include "cfunhddc/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cfunhddc/errors.hpp"
#include "cfunhddc/metrics.hpp"

namespace cfunhddc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

const char* dataset_name(DatasetKind kind) {
    switch (kind) {
    case DatasetKind::Dataset1:
        return "dataset1";
    case DatasetKind::Dataset2:
        return "dataset2";
    case DatasetKind::NormalOnly:
        return "normal_only";
    }
    return "?";
}

const char* init_name(InitMethod method) {
    switch (method) {
    case InitMethod::Trimmed:
        return "trimmed";
    case InitMethod::Kmeans:
        return "kmeans";
    case InitMethod::Random:
        return "random";
    }
    return "?";
}

std::string strategy_name(const DimStrategy& dims) {
    std::ostringstream out;
    if (dims.kind == DimStrategy::Kind::Cattell) {
        out << "cattell:";
        for (std::size_t i = 0; i < dims.thresholds.size(); ++i) {
            out << (i ? "," : "") << dims.thresholds[i];
        }
    } else {
        out << (dims.per_cluster_exhaustive ? "grid-exhaustive:" : "grid:");
        for (std::size_t i = 0; i < dims.grid.size(); ++i) {
            out << (i ? "," : "") << dims.grid[i];
        }
    }
    return out.str();
}

nlohmann::ordered_json candidate_json(const Candidate& row) {
    nlohmann::ordered_json out;
    out["K"] = row.n_clusters;
    out["dims"] = row.dims;
    out["d_config"] = row.d_config;
    out["restart"] = row.restart;
    if (row.failed) {
        out["loglik"] = nullptr;
        out["xi"] = nullptr;
        out["bic"] = nullptr;
        out["aic"] = nullptr;
    } else {
        out["loglik"] = row.loglik;
        out["xi"] = row.n_params;
        out["bic"] = row.bic;
        out["aic"] = row.aic;
    }
    out["converged"] = row.converged;
    out["failed"] = row.failed;
    out["fail_reason"] = row.fail_reason;
    return out;
}

} // namespace

nlohmann::ordered_json report_to_json(const RunConfig& config,
                                      const RunReport& report) {
    nlohmann::ordered_json root;
    root["schema_version"] = 1;

    nlohmann::ordered_json cfg;
    cfg["input"] = config.input_csv
                       ? nlohmann::ordered_json(config.input_csv->string())
                       : nlohmann::ordered_json(nullptr);
    cfg["simulate"] = config.simulation
                          ? nlohmann::ordered_json(
                                dataset_name(config.simulation->kind))
                          : nlohmann::ordered_json(nullptr);
    cfg["basis_size"] = config.basis_size;
    cfg["degree"] = config.degree;
    cfg["K_values"] = config.k_values;
    cfg["d_strategy"] = strategy_name(config.dims);
    cfg["init_method"] = init_name(config.init.method);
    cfg["trim_fraction"] = config.init.trim_fraction;
    cfg["nb_init"] = config.init.nb_init;
    cfg["epsilon"] = config.fit.epsilon;
    cfg["max_iter"] = config.fit.max_iter;
    cfg["seed"] = config.init.seed;
    cfg["normalize_time"] = config.normalize_times;
    root["config"] = cfg;

    nlohmann::ordered_json sel;
    sel["basis_total_size"] = report.selection.basis_size;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : report.selection.rows) {
        rows.push_back(candidate_json(row));
    }
    sel["rows"] = rows;
    sel["chosen"] = report.selection.chosen
                        ? candidate_json(*report.selection.chosen)
                        : nlohmann::ordered_json(nullptr);
    sel["tie_break_trace"] = report.selection.tie_break_trace;
    root["selection"] = sel;

    nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
    if (report.selection.best_fit) {
        for (const auto& cl : report.selection.best_fit->model.clusters) {
            nlohmann::ordered_json c;
            c["pi"] = cl.mixing;
            c["beta"] = cl.normal_fraction;
            c["eta"] = cl.inflation;
            c["d"] = cl.dim;
            c["a"] = std::vector<double>(
                cl.variances.data(), cl.variances.data() + cl.variances.size());
            c["b"] = cl.noise_variance;
            clusters.push_back(c);
        }
    }
    root["clusters"] = clusters;

    nlohmann::ordered_json curves = nlohmann::ordered_json::array();
    for (const auto& record : report.curves) {
        nlohmann::ordered_json c;
        c["id"] = record.id;
        c["cluster"] = record.cluster;
        c["outlier"] = record.outlier;
        c["t_max"] = record.t_max;
        c["s"] = record.s;
        curves.push_back(c);
    }
    root["curves"] = curves;
    return root;
}

RunReport run(const RunConfig& config) {
    const auto t_start = Clock::now();
    if (config.input_csv.has_value() == config.simulation.has_value()) {
        throw ConfigError("exactly one of input CSV or simulation spec "
                          "must be given");
    }

    CurveSet curves = config.input_csv ? ingest_csv(*config.input_csv)
                                       : simulate(*config.simulation).curves;
    if (config.normalize_times) {
        curves = normalize_time(curves);
    }
    curves.validate();

    const auto t_smooth = Clock::now();
    const std::vector<int> sizes(
        static_cast<std::size_t>(curves.components()), config.basis_size);
    const BasisSystem basis =
        build_bspline_basis(sizes, config.degree, curves.domain);
    const CoefficientMatrix coeffs = smooth_curves(curves, basis);
    const GramMetric metric = GramMetric::from_basis(basis);

    const auto t_fit = Clock::now();
    RunReport report;
    report.timing.smooth_seconds = seconds_since(t_smooth);
    report.selection = select_model(coeffs, metric, config.k_values,
                                    config.dims, config.init, config.fit);
    report.timing.fit_seconds = seconds_since(t_fit);

    const FitResult& best = *report.selection.best_fit;
    report.curves.reserve(static_cast<std::size_t>(curves.size()));
    for (int i = 0; i < curves.size(); ++i) {
        CurveRecord record;
        record.id = curves.curves[static_cast<std::size_t>(i)].id;
        const int label = best.labels[static_cast<std::size_t>(i)];
        record.cluster = label + 1;
        record.outlier = best.outlier[static_cast<std::size_t>(i)] != 0;
        record.t_max = best.resp.t(i, label);
        record.s = best.resp.s(i, label);
        report.curves.push_back(std::move(record));
    }
    report.timing.total_seconds = seconds_since(t_start);

    // All computation is done; emit the four outputs, removing anything
    // already written if a write fails.
    std::filesystem::create_directories(config.output_dir);
    std::vector<std::filesystem::path> written;
    auto open_output = [&](const char* name) {
        const auto path = config.output_dir / name;
        std::ofstream out(path);
        if (!out) {
            throw IngestError("cannot write '" + path.string() + "'");
        }
        written.push_back(path);
        return out;
    };
    try {
        {
            auto out = open_output("report.json");
            out << report_to_json(config, report).dump(2) << '\n';
            if (!out.good()) {
                throw IngestError("write failed for report.json");
            }
        }
        {
            auto out = open_output("assignments.csv");
            out << "curve_id,cluster,outlier,t_max,s\n";
            for (const auto& record : report.curves) {
                out << record.id << ',' << record.cluster << ','
                    << (record.outlier ? "true" : "false") << ','
                    << format_double(record.t_max) << ','
                    << format_double(record.s) << '\n';
            }
            if (!out.good()) {
                throw IngestError("write failed for assignments.csv");
            }
        }
        {
            // Smoothed curves on a fixed grid, enough to re-plot the fit.
            constexpr int kPlotPoints = 200;
            auto out = open_output("plotdata.csv");
            out << "curve_id,component,t,value,cluster,outlier\n";
            for (int i = 0; i < curves.size(); ++i) {
                const auto& record = report.curves[static_cast<std::size_t>(i)];
                const Eigen::RowVectorXd row = coeffs.row(i);
                for (int j = 0; j < curves.components(); ++j) {
                    for (int g = 0; g < kPlotPoints; ++g) {
                        const double t =
                            curves.domain.lo +
                            curves.domain.length() * g / (kPlotPoints - 1);
                        out << record.id << ',' << (j + 1) << ','
                            << format_double(t) << ','
                            << format_double(evaluate_curve(row, basis, j, t))
                            << ',' << record.cluster << ','
                            << (record.outlier ? "true" : "false") << '\n';
                    }
                }
            }
            if (!out.good()) {
                throw IngestError("write failed for plotdata.csv");
            }
        }
        {
            // Timing is the one volatile quantity; report.json stays
            // byte-identical across reruns of the same seed.
            auto out = open_output("timing.json");
            nlohmann::ordered_json timing;
            timing["total_seconds"] = report.timing.total_seconds;
            timing["smooth_seconds"] = report.timing.smooth_seconds;
            timing["fit_seconds"] = report.timing.fit_seconds;
            out << timing.dump(2) << '\n';
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& path : written) {
            std::filesystem::remove(path, ec);
        }
        throw;
    }
    return report;
}

} // namespace cfunhddc
