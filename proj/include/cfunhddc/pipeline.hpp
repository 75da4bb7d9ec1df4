#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfunhddc/init.hpp"
#include "cfunhddc/io.hpp"
#include "cfunhddc/selection.hpp"
#include "cfunhddc/simulate.hpp"

namespace cfunhddc {

// End-to-end run configuration: one input source (CSV file or simulation
// spec), smoothing setup, the selection sweep and the output location.
struct RunConfig {
    std::optional<std::filesystem::path> input_csv;
    std::optional<SimSpec> simulation;
    int basis_size = 25;
    int degree = 3;
    std::vector<int> k_values{4};
    DimStrategy dims = DimStrategy::fixed(2);
    InitConfig init;
    FitConfig fit;
    bool normalize_times = false;
    std::filesystem::path output_dir = ".";
};

struct CurveRecord {
    std::string id;
    int cluster = 0; // 1-based
    bool outlier = false;
    double t_max = 0.0; // posterior of the assigned cluster
    double s = 0.0;     // normality posterior at the assigned cluster
};

struct RunTiming {
    double total_seconds = 0.0;
    double smooth_seconds = 0.0;
    double fit_seconds = 0.0;
};

struct RunReport {
    SelectionReport selection;
    std::vector<CurveRecord> curves;
    RunTiming timing;
};

// Deterministic serialization of everything except timing; report.json must
// be byte-identical across runs with the same config and seed, so timing
// goes to a separate timing.json.
nlohmann::ordered_json report_to_json(const RunConfig& config,
                                      const RunReport& report);

// Ingest/simulate -> optional time normalization -> smoothing -> selection
// sweep -> report.json, assignments.csv, plotdata.csv and timing.json in the
// output directory. Partially written outputs are removed on failure.
RunReport run(const RunConfig& config);

} // namespace cfunhddc
