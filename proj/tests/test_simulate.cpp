#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "cfunhddc/errors.hpp"
#include "cfunhddc/rng.hpp"
#include "cfunhddc/simulate.hpp"

using namespace cfunhddc;

TEST_CASE("waveforms match their formulas") {
    CHECK(waveform(Waveform::TriangleEarly, 7.0) == 6.0);
    CHECK(waveform(Waveform::TriangleEarly, 1.0) == 0.0);
    CHECK(waveform(Waveform::TriangleLate, 15.0) == 6.0);
    CHECK(waveform(Waveform::TriangleLate, 9.0) == 0.0);

    // truncated waveform: |t*[t<7] - 7| in the formula
    for (int t = 1; t <= 21; ++t) {
        const double arg = t < 7 ? static_cast<double>(t) : 0.0;
        const double expected = std::max(6.0 - std::abs(arg - 7.0), 0.0);
        CHECK(waveform(Waveform::TriangleCutoff, t) == expected);
    }
    CHECK(waveform(Waveform::TriangleCutoff, 7.0) == 0.0);
    CHECK(waveform(Waveform::TriangleCutoff, 6.0) == 5.0);
}

TEST_CASE("dataset1 defaults reproduce the benchmark composition") {
    SimSpec spec;
    spec.seed = 99;
    const auto data = simulate(spec);
    CHECK(data.curves.size() == 1005);
    CHECK(data.curves.components() == 2);
    CHECK(data.curves.domain.lo == 1.0);
    CHECK(data.curves.domain.hi == 21.0);

    int per_class[5] = {0, 0, 0, 0, 0};
    int shifted = 0;
    int truncated = 0;
    for (std::size_t i = 0; i < data.class_label.size(); ++i) {
        ++per_class[data.class_label[i]];
        if (data.outlier_kind[i] == OutlierKind::Shifted) {
            ++shifted;
        }
        if (data.outlier_kind[i] == OutlierKind::Truncated) {
            ++truncated;
        }
    }
    CHECK(per_class[1] == 250);
    CHECK(per_class[2] == 250);
    CHECK(per_class[3] == 250);
    CHECK(per_class[4] == 250);
    CHECK(shifted == 3);
    CHECK(truncated == 2);

    // regular 101-point grid on [1, 21]
    const auto& grid = data.curves.curves[0].components[0].times;
    CHECK(grid.size() == 101);
    CHECK(grid.front() == 1.0);
    CHECK(grid.back() == 21.0);
    CHECK(grid[50] == doctest::Approx(11.0));
}

TEST_CASE("noise-free curves with pinned U follow the class models") {
    SimSpec spec;
    spec.per_class = 1;
    spec.n_shifted = 0;
    spec.n_truncated = 0;
    spec.noise_sd = 0.0;
    spec.u_override = 0.0;
    const auto data = simulate(spec);
    // class 1: X1 = H_early, X2 = 0.5 * H_early when U = 0
    const auto& c1 = data.curves.curves[0];
    for (std::size_t r = 0; r < c1.components[0].times.size(); ++r) {
        const double t = c1.components[0].times[r];
        CHECK(c1.components[0].values[r] ==
              waveform(Waveform::TriangleEarly, t));
        CHECK(c1.components[1].values[r] ==
              0.5 * waveform(Waveform::TriangleEarly, t));
    }
    // class 3: X1 = 0.5 * H_early, X2 = H_late
    const auto& c3 = data.curves.curves[2];
    for (std::size_t r = 0; r < c3.components[0].times.size(); ++r) {
        const double t = c3.components[0].times[r];
        CHECK(c3.components[0].values[r] ==
              0.5 * waveform(Waveform::TriangleEarly, t));
        CHECK(c3.components[1].values[r] ==
              waveform(Waveform::TriangleLate, t));
    }
}

TEST_CASE("equal seeds are bitwise identical, different seeds differ") {
    SimSpec spec;
    spec.seed = 123;
    const auto a = simulate(spec);
    const auto b = simulate(spec);
    REQUIRE(a.curves.size() == b.curves.size());
    for (int i = 0; i < a.curves.size(); ++i) {
        for (int j = 0; j < 2; ++j) {
            const auto& ca = a.curves.curves[static_cast<std::size_t>(i)]
                                 .components[static_cast<std::size_t>(j)];
            const auto& cb = b.curves.curves[static_cast<std::size_t>(i)]
                                 .components[static_cast<std::size_t>(j)];
            CHECK(ca.values == cb.values);
            CHECK(ca.times == cb.times);
        }
    }
    SimSpec other = spec;
    other.seed = 124;
    const auto c = simulate(other);
    CHECK(a.curves.curves[0].components[0].values !=
          c.curves.curves[0].components[0].values);
}

TEST_CASE("class-1 sample mean at the waveform peak") {
    // With sigma = 0, X1(7) = U + (1-U)*6 = 6 - 5U, so the mean is 3.5 and
    // the variance 25/12.
    SimSpec spec;
    spec.per_class = 600;
    spec.n_shifted = 0;
    spec.n_truncated = 0;
    spec.noise_sd = 0.0;
    spec.seed = 2024;
    const auto data = simulate(spec);
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < data.curves.size(); ++i) {
        if (data.class_label[static_cast<std::size_t>(i)] != 1) {
            continue;
        }
        const auto& comp = data.curves.curves[static_cast<std::size_t>(i)]
                               .components[0];
        // t = 7 sits at grid index 30 of the default [1,21] 101-point grid
        CHECK(comp.times[30] == doctest::Approx(7.0));
        sum += comp.values[30];
        ++count;
    }
    const double mean = sum / count;
    const double se = std::sqrt(25.0 / 12.0 / count);
    CHECK(std::abs(mean - 3.5) <= 3.0 * se);
}

TEST_CASE("outlier flags partition into the two kinds") {
    SimSpec spec;
    spec.seed = 5;
    spec.n_shifted = 4;
    spec.n_truncated = 7;
    const auto data = simulate(spec);
    int flagged = 0;
    int by_kind = 0;
    for (std::size_t i = 0; i < data.is_outlier.size(); ++i) {
        if (data.is_outlier[i]) {
            ++flagged;
            CHECK(data.class_label[i] == 0);
        }
        if (data.outlier_kind[i] != OutlierKind::None) {
            ++by_kind;
            CHECK(data.is_outlier[i] == 1);
        }
    }
    CHECK(flagged == 11);
    CHECK(by_kind == 11);
}

TEST_CASE("normal_only ignores outlier counts") {
    SimSpec spec;
    spec.kind = DatasetKind::NormalOnly;
    spec.per_class = 10;
    const auto data = simulate(spec);
    CHECK(data.curves.size() == 40);
    for (auto flag : data.is_outlier) {
        CHECK(flag == 0);
    }
}

TEST_CASE("contamination sweep arithmetic") {
    SimSpec base;
    base.per_class = 250; // 1000 normal curves
    base.seed = 77;

    const auto sets = contamination_sweep(base, {0, 5, 20});
    REQUIRE(sets.size() == 3);

    // 0 per mille: normal only
    CHECK(sets[0].curves.size() == 1000);
    for (auto flag : sets[0].is_outlier) {
        CHECK(flag == 0);
    }

    // 5 per mille: 3 + 2
    int shifted = 0;
    int truncated = 0;
    for (auto kind : sets[1].outlier_kind) {
        shifted += kind == OutlierKind::Shifted;
        truncated += kind == OutlierKind::Truncated;
    }
    CHECK(shifted == 3);
    CHECK(truncated == 2);

    // 20 per mille: 3 + 17
    shifted = truncated = 0;
    for (auto kind : sets[2].outlier_kind) {
        shifted += kind == OutlierKind::Shifted;
        truncated += kind == OutlierKind::Truncated;
    }
    CHECK(shifted == 3);
    CHECK(truncated == 17);

    // growing the contamination leaves the normal curves untouched
    CHECK(sets[1].curves.curves[0].components[0].values ==
          sets[2].curves.curves[0].components[0].values);

    // 1 per mille would need 1 outlier but the shifted count is fixed at 3
    CHECK_THROWS_AS(contamination_sweep(base, {1}), SimulationError);

    SimSpec odd = base;
    odd.per_class = 100; // 400 normals: 3 per mille -> 1.2 outliers
    CHECK_THROWS_AS(contamination_sweep(odd, {3}), SimulationError);
}

TEST_CASE("invalid specs are rejected") {
    SimSpec spec;
    spec.grid_size = 1;
    CHECK_THROWS_AS(simulate(spec), SimulationError);
    spec = SimSpec{};
    spec.noise_sd = -1.0;
    CHECK_THROWS_AS(simulate(spec), SimulationError);
    spec = SimSpec{};
    spec.per_class = -2;
    CHECK_THROWS_AS(simulate(spec), SimulationError);
}
