#include "cfunhddc/curves.hpp"

#include <cmath>
#include <string>

namespace cfunhddc {

void CurveSet::validate() const {
    if (curves.empty()) {
        throw ConfigError("curve set is empty");
    }
    if (!(domain.hi > domain.lo)) {
        throw ConfigError("curve set domain is degenerate");
    }
    const auto p = curves[0].components.size();
    if (p == 0) {
        throw ConfigError("curve '" + curves[0].id + "' has no components");
    }
    for (const auto& curve : curves) {
        if (curve.components.size() != p) {
            throw ConfigError("curve '" + curve.id + "' has " +
                              std::to_string(curve.components.size()) +
                              " components, expected " + std::to_string(p));
        }
        for (std::size_t j = 0; j < p; ++j) {
            const auto& comp = curve.components[j];
            if (comp.times.size() != comp.values.size()) {
                throw ConfigError("curve '" + curve.id + "', component " +
                                  std::to_string(j + 1) +
                                  ": times and values differ in length");
            }
            if (comp.times.size() < 2) {
                throw ConfigError("curve '" + curve.id + "', component " +
                                  std::to_string(j + 1) +
                                  ": fewer than 2 observation points");
            }
            for (std::size_t r = 0; r < comp.times.size(); ++r) {
                const double t = comp.times[r];
                const double v = comp.values[r];
                if (!std::isfinite(t) || t < domain.lo || t > domain.hi) {
                    throw ConfigError("curve '" + curve.id + "', component " +
                                      std::to_string(j + 1) + ": time " +
                                      std::to_string(t) +
                                      " outside the domain");
                }
                if (!std::isfinite(v)) {
                    throw ConfigError("curve '" + curve.id + "', component " +
                                      std::to_string(j + 1) +
                                      ": non-finite value");
                }
            }
        }
    }
}

} // namespace cfunhddc
