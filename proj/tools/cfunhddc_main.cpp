#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cfunhddc/errors.hpp"
#include "cfunhddc/io.hpp"
#include "cfunhddc/pipeline.hpp"
#include "cfunhddc/simulate.hpp"

namespace {

using cfunhddc::DatasetKind;

// "a:b" -> {a..b}, "a,b,c" -> {a,b,c}, "a" -> {a}
std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const int lo = std::stoi(text.substr(0, colon));
        const int hi = std::stoi(text.substr(colon + 1));
        if (hi < lo) {
            throw CLI::ValidationError("range '" + text + "' is empty");
        }
        for (int v = lo; v <= hi; ++v) {
            values.push_back(v);
        }
        return values;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const auto piece = text.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        values.push_back(std::stoi(piece));
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    if (values.empty()) {
        throw CLI::ValidationError("empty list '" + text + "'");
    }
    return values;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const auto piece = text.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        values.push_back(std::stod(piece));
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    if (values.empty()) {
        throw CLI::ValidationError("empty list '" + text + "'");
    }
    return values;
}

DatasetKind parse_dataset(const std::string& name) {
    if (name == "dataset1") {
        return DatasetKind::Dataset1;
    }
    if (name == "dataset2") {
        return DatasetKind::Dataset2;
    }
    if (name == "normal_only") {
        return DatasetKind::NormalOnly;
    }
    throw CLI::ValidationError(
        "dataset must be dataset1, dataset2 or normal_only");
}

cfunhddc::InitMethod parse_init(const std::string& name) {
    if (name == "trimmed") {
        return cfunhddc::InitMethod::Trimmed;
    }
    if (name == "kmeans") {
        return cfunhddc::InitMethod::Kmeans;
    }
    if (name == "random") {
        return cfunhddc::InitMethod::Random;
    }
    throw CLI::ValidationError("init must be trimmed, kmeans or random");
}

int fail_with(const std::string& module, const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"]["module"] = module;
    err["error"]["message"] = e.what();
    std::cerr << err.dump() << '\n';
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clustering and outlier detection for multivariate "
                 "functional data via a contaminated Gaussian mixture"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run_cmd = app.add_subcommand(
        "run", "Smooth curves, fit the mixture and write reports");
    std::string input;
    std::string sim_name;
    std::string k_text = "4";
    std::string d_text;
    std::string d_grid_text;
    std::string thresholds_text;
    bool exhaustive = false;
    std::string init_name = "trimmed";
    double alpha = 0.2;
    int nb_init = 10;
    double epsilon = 1e-4;
    int max_iter = 200;
    int basis_size = 25;
    int degree = 3;
    std::uint64_t seed = 0;
    bool normalize = false;
    std::string out_dir = ".";
    int per_class = 250;
    int n_outlier1 = 3;
    int n_outlier2 = 2;
    double sigma = 0.5;
    int grid_size = 101;

    auto* input_opt =
        run_cmd->add_option("--input", input, "Input curve CSV (long format)");
    auto* sim_opt = run_cmd->add_option(
        "--simulate", sim_name, "Simulate dataset1|dataset2|normal_only");
    input_opt->excludes(sim_opt);
    run_cmd->add_option("--K,--K-range", k_text,
                        "Cluster counts, e.g. 4 or 2:6 or 2,4,6");
    auto* d_opt =
        run_cmd->add_option("--d", d_text, "Fixed intrinsic dimension");
    auto* d_grid_opt = run_cmd->add_option(
        "--d-grid", d_grid_text, "Dimension grid swept by BIC, e.g. 2:10");
    auto* cattell_opt = run_cmd->add_option(
        "--cattell", thresholds_text,
        "Scree-test thresholds swept by BIC, e.g. 0.1,0.15,0.2");
    d_opt->excludes(d_grid_opt)->excludes(cattell_opt);
    d_grid_opt->excludes(cattell_opt);
    run_cmd->add_flag("--d-exhaustive", exhaustive,
                      "Explore per-cluster dimension combinations (small K)");
    run_cmd->add_option("--init", init_name, "trimmed|kmeans|random");
    run_cmd->add_option("--alpha", alpha, "Trim fraction for trimmed init");
    run_cmd->add_option("--nb-init", nb_init, "Restarts per sweep cell");
    run_cmd->add_option("--epsilon", epsilon, "Convergence threshold");
    run_cmd->add_option("--max-iter", max_iter, "Iteration cap");
    run_cmd->add_option("--basis-size", basis_size,
                        "Basis functions per component");
    run_cmd->add_option("--degree", degree, "Spline degree");
    run_cmd->add_option("--seed", seed, "Random seed");
    run_cmd->add_flag("--normalize-time", normalize,
                      "Rescale each curve's time grid to [0,1]");
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_option("--per-class", per_class, "Normal curves per class");
    run_cmd->add_option("--outlier1", n_outlier1,
                        "Sinusoid-shifted outlier count");
    run_cmd->add_option("--outlier2", n_outlier2,
                        "Truncated-waveform outlier count");
    run_cmd->add_option("--sigma", sigma, "Class noise standard deviation");
    run_cmd->add_option("--grid-size", grid_size, "Observation points");

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand(
        "simulate", "Generate a benchmark dataset as curve CSV");
    std::string sim_kind = "dataset1";
    std::string sim_out = "curves.csv";
    std::string labels_out;
    std::uint64_t sim_seed = 0;
    int sim_per_class = 250;
    int sim_outlier1 = 3;
    int sim_outlier2 = 2;
    double sim_sigma = 0.5;
    int sim_grid = 101;
    sim_cmd->add_option("--kind", sim_kind,
                        "dataset1|dataset2|normal_only");
    sim_cmd->add_option("--seed", sim_seed, "Random seed");
    sim_cmd->add_option("--out", sim_out, "Output CSV path");
    sim_cmd->add_option("--labels-out", labels_out,
                        "Optional CSV with true classes and outlier flags");
    sim_cmd->add_option("--per-class", sim_per_class,
                        "Normal curves per class");
    sim_cmd->add_option("--outlier1", sim_outlier1,
                        "Sinusoid-shifted outlier count");
    sim_cmd->add_option("--outlier2", sim_outlier2,
                        "Truncated-waveform outlier count");
    sim_cmd->add_option("--sigma", sim_sigma,
                        "Class noise standard deviation");
    sim_cmd->add_option("--grid-size", sim_grid, "Observation points");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) {
        try {
            cfunhddc::RunConfig config;
            if (!input.empty()) {
                config.input_csv = input;
            } else if (!sim_name.empty()) {
                cfunhddc::SimSpec spec;
                spec.kind = parse_dataset(sim_name);
                spec.per_class = per_class;
                spec.n_shifted = n_outlier1;
                spec.n_truncated = n_outlier2;
                spec.noise_sd = sigma;
                spec.grid_size = grid_size;
                spec.seed = seed;
                config.simulation = spec;
            } else {
                throw cfunhddc::ConfigError(
                    "one of --input or --simulate is required");
            }
            config.basis_size = basis_size;
            config.degree = degree;
            config.k_values = parse_int_list(k_text);
            if (!thresholds_text.empty()) {
                config.dims = cfunhddc::DimStrategy::cattell(
                    parse_double_list(thresholds_text));
            } else if (!d_grid_text.empty()) {
                config.dims = cfunhddc::DimStrategy::common_grid(
                    parse_int_list(d_grid_text));
                config.dims.per_cluster_exhaustive = exhaustive;
            } else if (!d_text.empty()) {
                config.dims = cfunhddc::DimStrategy::common_grid(
                    parse_int_list(d_text));
                config.dims.per_cluster_exhaustive = exhaustive;
            }
            config.init.method = parse_init(init_name);
            config.init.trim_fraction = alpha;
            config.init.nb_init = nb_init;
            config.init.seed = seed;
            config.fit.epsilon = epsilon;
            config.fit.max_iter = max_iter;
            config.normalize_times = normalize;
            config.output_dir = out_dir;

            const auto report = cfunhddc::run(config);
            std::cout << "wrote report.json, assignments.csv, plotdata.csv, "
                         "timing.json to "
                      << out_dir << '\n';
            if (report.selection.chosen) {
                std::cout << "selected K=" << report.selection.chosen->n_clusters
                          << " " << report.selection.chosen->d_config
                          << " (BIC " << report.selection.chosen->bic << ")\n";
            }
            return 0;
        } catch (const cfunhddc::Error& e) {
            return fail_with("run", e);
        } catch (const std::exception& e) {
            return fail_with("run", e);
        }
    }

    try {
        cfunhddc::SimSpec spec;
        spec.kind = parse_dataset(sim_kind);
        spec.per_class = sim_per_class;
        spec.n_shifted = sim_outlier1;
        spec.n_truncated = sim_outlier2;
        spec.noise_sd = sim_sigma;
        spec.grid_size = sim_grid;
        spec.seed = sim_seed;
        const auto data = cfunhddc::simulate(spec);
        cfunhddc::write_curves_csv(data.curves, std::filesystem::path(sim_out));
        if (!labels_out.empty()) {
            std::ofstream out(labels_out);
            if (!out) {
                throw cfunhddc::IngestError("cannot write '" + labels_out +
                                            "'");
            }
            out << "curve_id,class,outlier,outlier_kind\n";
            for (std::size_t i = 0; i < data.curves.curves.size(); ++i) {
                const char* kind =
                    data.outlier_kind[i] == cfunhddc::OutlierKind::None
                        ? "none"
                        : (data.outlier_kind[i] ==
                                   cfunhddc::OutlierKind::Shifted
                               ? "outlier1"
                               : "outlier2");
                out << data.curves.curves[i].id << ',' << data.class_label[i]
                    << ',' << (data.is_outlier[i] ? "true" : "false") << ','
                    << kind << '\n';
            }
        }
        std::cout << "wrote " << data.curves.size() << " curves to " << sim_out
                  << '\n';
        return 0;
    } catch (const std::exception& e) {
        return fail_with("simulate", e);
    }
}
