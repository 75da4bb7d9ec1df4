#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cfunhddc/curves.hpp"

namespace cfunhddc {

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double value);

// Long-format curve CSV with header `curve_id,component,time,value`.
// Components are 1-based. Curves are ordered by first appearance, rows
// within a curve/component keep file order.
CurveSet read_curves_csv(std::istream& in, const std::string& source_name);
CurveSet ingest_csv(const std::filesystem::path& path);

void write_curves_csv(const CurveSet& curves, std::ostream& out);
void write_curves_csv(const CurveSet& curves, const std::filesystem::path& path);

// Per-curve affine rescale of time onto [0, 1] using that curve's own first
// and last sampling instants across all components.
CurveSet normalize_time(const CurveSet& curves);

} // namespace cfunhddc
