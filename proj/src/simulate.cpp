#include "cfunhddc/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "cfunhddc/errors.hpp"
#include "cfunhddc/rng.hpp"

namespace cfunhddc {

double waveform(Waveform kind, double t) {
    switch (kind) {
    case Waveform::TriangleEarly:
        return std::max(6.0 - std::abs(t - 7.0), 0.0);
    case Waveform::TriangleLate:
        return std::max(6.0 - std::abs(t - 15.0), 0.0);
    case Waveform::TriangleCutoff:
        return std::max(6.0 - std::abs((t < 7.0 ? t : 0.0) - 7.0), 0.0);
    }
    return 0.0;
}

namespace {

std::vector<double> regular_grid(Interval domain, int size) {
    std::vector<double> grid(static_cast<std::size_t>(size));
    for (int j = 0; j < size; ++j) {
        grid[static_cast<std::size_t>(j)] =
            domain.lo + domain.length() * j / (size - 1);
    }
    return grid;
}

std::string curve_id(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "curve_%05d", index + 1);
    return buf;
}

// Class models share one uniform draw U across both components; the noise is
// drawn independently per component and per grid point. Each component is
// u + (scale - u) * H(t) + noise.
struct ClassModel {
    Waveform shape1;
    double scale1;
    Waveform shape2;
    double scale2;
};
constexpr ClassModel kClassModels[4] = {
    {Waveform::TriangleEarly, 1.0, Waveform::TriangleEarly, 0.5},
    {Waveform::TriangleLate, 1.0, Waveform::TriangleLate, 0.5},
    {Waveform::TriangleEarly, 0.5, Waveform::TriangleLate, 1.0},
    {Waveform::TriangleLate, 0.5, Waveform::TriangleEarly, 1.0},
};

Curve make_normal_curve(int index, int class_idx, const SimSpec& spec,
                        const std::vector<double>& grid) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(index)));
    const double u = spec.u_override ? *spec.u_override : rng.uniform();
    const ClassModel& m = kClassModels[class_idx];

    Curve curve;
    curve.id = curve_id(index);
    curve.components.resize(2);
    for (int comp = 0; comp < 2; ++comp) {
        const Waveform shape = comp == 0 ? m.shape1 : m.shape2;
        const double scale = comp == 0 ? m.scale1 : m.scale2;
        auto& samples = curve.components[static_cast<std::size_t>(comp)];
        samples.times = grid;
        samples.values.reserve(grid.size());
        for (double t : grid) {
            samples.values.push_back(u + (scale - u) * waveform(shape, t) +
                                     rng.normal(spec.noise_sd));
        }
    }
    return curve;
}

Curve make_shifted_outlier(int index, const SimSpec& spec,
                           const std::vector<double>& grid) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(index)));
    const double u = spec.u_override ? *spec.u_override : rng.uniform();

    Curve curve;
    curve.id = curve_id(index);
    curve.components.resize(2);
    for (int comp = 0; comp < 2; ++comp) {
        auto& samples = curve.components[static_cast<std::size_t>(comp)];
        samples.times = grid;
        samples.values.reserve(grid.size());
        for (double t : grid) {
            const double shift = std::sin(std::numbers::pi * t / 2.0);
            double value;
            if (spec.kind == DatasetKind::Dataset1) {
                // both components deviate; abnormal noise has unit variance
                const double base =
                    comp == 0
                        ? (0.5 - u) * waveform(Waveform::TriangleEarly, t)
                        : (1.0 - u) * waveform(Waveform::TriangleLate, t);
                value = base + shift + rng.normal(1.0);
            } else {
                // only the second component deviates
                if (comp == 0) {
                    value = u +
                            (0.5 - u) * waveform(Waveform::TriangleEarly, t) +
                            rng.normal(spec.noise_sd);
                } else {
                    value = (1.0 - u) * waveform(Waveform::TriangleLate, t) +
                            shift + rng.normal(1.0);
                }
            }
            samples.values.push_back(value);
        }
    }
    return curve;
}

Curve make_truncated_outlier(int index, const SimSpec& spec,
                             const std::vector<double>& grid) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(index)));
    const double u = spec.u_override ? *spec.u_override : rng.uniform();

    Curve curve;
    curve.id = curve_id(index);
    curve.components.resize(2);
    for (int comp = 0; comp < 2; ++comp) {
        auto& samples = curve.components[static_cast<std::size_t>(comp)];
        samples.times = grid;
        samples.values.reserve(grid.size());
        for (double t : grid) {
            double value;
            if (spec.kind == DatasetKind::Dataset1) {
                const double scale = comp == 0 ? 1.0 : 0.5;
                value = u +
                        (scale - u) * waveform(Waveform::TriangleCutoff, t) +
                        rng.normal(spec.noise_sd);
            } else {
                value = comp == 0
                            ? u +
                                  (1.0 - u) *
                                      waveform(Waveform::TriangleCutoff, t) +
                                  rng.normal(spec.noise_sd)
                            : u +
                                  (0.5 - u) *
                                      waveform(Waveform::TriangleEarly, t) +
                                  rng.normal(spec.noise_sd);
            }
            samples.values.push_back(value);
        }
    }
    return curve;
}

} // namespace

LabeledCurves simulate(const SimSpec& spec) {
    if (spec.per_class < 0 || spec.n_shifted < 0 || spec.n_truncated < 0) {
        throw SimulationError("curve counts must be non-negative");
    }
    if (spec.noise_sd < 0.0) {
        throw SimulationError("noise standard deviation must be >= 0");
    }
    if (spec.grid_size < 2) {
        throw SimulationError("grid size must be >= 2");
    }

    const bool contaminated = spec.kind != DatasetKind::NormalOnly;
    const int n_shifted = contaminated ? spec.n_shifted : 0;
    const int n_truncated = contaminated ? spec.n_truncated : 0;
    const std::vector<double> grid = regular_grid(spec.domain, spec.grid_size);

    LabeledCurves out;
    out.curves.domain = spec.domain;
    int index = 0;
    for (int class_idx = 0; class_idx < 4; ++class_idx) {
        for (int i = 0; i < spec.per_class; ++i, ++index) {
            out.curves.curves.push_back(
                make_normal_curve(index, class_idx, spec, grid));
            out.class_label.push_back(class_idx + 1);
            out.is_outlier.push_back(0);
            out.outlier_kind.push_back(OutlierKind::None);
        }
    }
    for (int i = 0; i < n_shifted; ++i, ++index) {
        out.curves.curves.push_back(make_shifted_outlier(index, spec, grid));
        out.class_label.push_back(0);
        out.is_outlier.push_back(1);
        out.outlier_kind.push_back(OutlierKind::Shifted);
    }
    for (int i = 0; i < n_truncated; ++i, ++index) {
        out.curves.curves.push_back(make_truncated_outlier(index, spec, grid));
        out.class_label.push_back(0);
        out.is_outlier.push_back(1);
        out.outlier_kind.push_back(OutlierKind::Truncated);
    }
    return out;
}

std::vector<LabeledCurves> contamination_sweep(
    const SimSpec& base, const std::vector<int>& per_mille_levels) {
    const long long normals = 4LL * base.per_class;
    if (normals <= 0) {
        throw SimulationError("contamination sweep needs normal curves");
    }
    std::vector<LabeledCurves> out;
    out.reserve(per_mille_levels.size());
    for (int level : per_mille_levels) {
        if (level < 0) {
            throw SimulationError("contamination level must be >= 0");
        }
        const long long scaled = static_cast<long long>(level) * normals;
        if (scaled % 1000 != 0) {
            throw SimulationError(
                "contamination level " + std::to_string(level) +
                " per mille is not an integer outlier count for " +
                std::to_string(normals) + " normal curves");
        }
        const long long total = scaled / 1000;
        SimSpec spec = base;
        if (total == 0) {
            spec.kind = DatasetKind::NormalOnly;
            spec.n_shifted = 0;
            spec.n_truncated = 0;
        } else {
            if (total < base.n_shifted) {
                throw SimulationError(
                    "contamination level " + std::to_string(level) +
                    " per mille is below the fixed sinusoid-shifted count " +
                    std::to_string(base.n_shifted));
            }
            spec.n_shifted = base.n_shifted;
            spec.n_truncated = static_cast<int>(total - base.n_shifted);
        }
        out.push_back(simulate(spec));
    }
    return out;
}

} // namespace cfunhddc
