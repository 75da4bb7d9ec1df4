#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cfunhddc/curves.hpp"

namespace cfunhddc {

// Shifted triangular waveforms used by the synthetic benchmarks:
//   TriangleEarly(t)  = max(6 - |t - 7|, 0)
//   TriangleLate(t)   = max(6 - |t - 15|, 0)
//   TriangleCutoff(t) = max(6 - |t * [t < 7] - 7|, 0)
// TriangleCutoff rises like TriangleEarly for t < 7 and is 0 for t >= 7.
enum class Waveform { TriangleEarly, TriangleLate, TriangleCutoff };

double waveform(Waveform kind, double t);

// Dataset1: both components of the abnormal curves deviate.
// Dataset2: only one component deviates.
// NormalOnly: the shared normal curves only, no contamination.
enum class DatasetKind { Dataset1, Dataset2, NormalOnly };

enum class OutlierKind : std::uint8_t {
    None = 0,
    Shifted = 1,   // sinusoid-shifted curves with heavier noise ("outlier1")
    Truncated = 2, // curves built on the truncated waveform ("outlier2")
};

struct SimSpec {
    DatasetKind kind = DatasetKind::Dataset1;
    int per_class = 250;
    int n_shifted = 3;
    int n_truncated = 2;
    double noise_sd = 0.5; // sd of the within-class noise (variance 0.25)
    int grid_size = 101;
    Interval domain{1.0, 21.0};
    std::uint64_t seed = 0;
    // Test hook: pin the per-curve uniform draw instead of sampling it.
    std::optional<double> u_override;
};

struct LabeledCurves {
    CurveSet curves;                      // bivariate
    std::vector<int> class_label;         // 1..4 for normal curves, 0 for outliers
    std::vector<std::uint8_t> is_outlier;
    std::vector<OutlierKind> outlier_kind;
};

// Draws every curve from its own derived sub-seed, so equal seeds give
// bitwise-identical data and growing the outlier count leaves the normal
// curves untouched.
LabeledCurves simulate(const SimSpec& spec);

// One dataset per contamination level (outliers per thousand normal curves).
// The sinusoid-shifted count stays at the base value; the truncated count is
// adjusted to reach the level. Levels must be integer-representable.
std::vector<LabeledCurves> contamination_sweep(const SimSpec& base,
                                               const std::vector<int>& per_mille_levels);

} // namespace cfunhddc
