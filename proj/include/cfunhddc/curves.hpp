#pragma once

#include <string>
#include <vector>

#include "cfunhddc/errors.hpp"

namespace cfunhddc {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
};

// One observed component of one curve: paired sampling times and values.
struct ComponentSamples {
    std::vector<double> times;
    std::vector<double> values;
};

struct Curve {
    std::string id;
    std::vector<ComponentSamples> components;
};

// n discretely observed p-variate curves over a common domain. Each curve
// carries its own time grids, so curves of different lengths can coexist.
struct CurveSet {
    std::vector<Curve> curves;
    Interval domain{0.0, 1.0};

    int size() const { return static_cast<int>(curves.size()); }
    int components() const {
        return curves.empty() ? 0 : static_cast<int>(curves[0].components.size());
    }

    // Enforces: n >= 1, p >= 1, a common component count, >= 2 observation
    // points per component, all times inside the domain, finite values.
    void validate() const;
};

} // namespace cfunhddc
