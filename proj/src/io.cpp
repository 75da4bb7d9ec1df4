#include "cfunhddc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>

namespace cfunhddc {

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        return std::to_string(value);
    }
    return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream stream(line);
    while (std::getline(stream, field, ',')) {
        // trim surrounding whitespace
        const auto begin = field.find_first_not_of(" \t\r");
        const auto end = field.find_last_not_of(" \t\r");
        fields.push_back(begin == std::string::npos
                             ? std::string()
                             : field.substr(begin, end - begin + 1));
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_double(const std::string& text, const std::string& what,
                    long row) {
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() ||
        !std::isfinite(value)) {
        throw IngestError("row " + std::to_string(row) + ": non-numeric " +
                          what + " '" + text + "'");
    }
    return value;
}

long parse_component(const std::string& text, long row) {
    long value = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 1) {
        throw IngestError("row " + std::to_string(row) +
                          ": component must be a positive integer, got '" +
                          text + "'");
    }
    return value;
}

} // namespace

CurveSet read_curves_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    if (!std::getline(in, line)) {
        throw IngestError(source_name + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto header = split_csv_row(line);
    const std::vector<std::string> expected = {"curve_id", "component", "time",
                                               "value"};
    if (header != expected) {
        throw IngestError(source_name +
                          ": header must be 'curve_id,component,time,value'");
    }

    struct Builder {
        std::size_t order;
        std::map<long, ComponentSamples> components;
    };
    std::map<std::string, Builder> builders;
    std::vector<std::string> id_order;

    long row = 1;
    long max_component = 0;
    double t_min = std::numeric_limits<double>::infinity();
    double t_max = -std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_row(line);
        if (fields.size() != 4) {
            throw IngestError("row " + std::to_string(row) +
                              ": expected 4 columns, found " +
                              std::to_string(fields.size()));
        }
        if (fields[0].empty()) {
            throw IngestError("row " + std::to_string(row) +
                              ": empty curve_id");
        }
        const long comp = parse_component(fields[1], row);
        const double t = parse_double(fields[2], "time", row);
        const double v = parse_double(fields[3], "value", row);

        auto [it, inserted] =
            builders.try_emplace(fields[0], Builder{id_order.size(), {}});
        if (inserted) {
            id_order.push_back(fields[0]);
        }
        auto& samples = it->second.components[comp];
        samples.times.push_back(t);
        samples.values.push_back(v);
        max_component = std::max(max_component, comp);
        t_min = std::min(t_min, t);
        t_max = std::max(t_max, t);
    }
    if (builders.empty()) {
        throw IngestError(source_name + ": no data rows");
    }

    CurveSet curves;
    curves.domain = {t_min, t_max};
    for (const auto& id : id_order) {
        const auto& builder = builders.at(id);
        Curve curve;
        curve.id = id;
        curve.components.resize(static_cast<std::size_t>(max_component));
        for (long comp = 1; comp <= max_component; ++comp) {
            const auto it = builder.components.find(comp);
            if (it == builder.components.end()) {
                throw IngestError("curve '" + id + "' is missing component " +
                                  std::to_string(comp) + " (file has " +
                                  std::to_string(max_component) +
                                  " components)");
            }
            curve.components[static_cast<std::size_t>(comp - 1)] = it->second;
        }
        curves.curves.push_back(std::move(curve));
    }
    curves.validate();
    return curves;
}

CurveSet ingest_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError("cannot open '" + path.string() + "'");
    }
    return read_curves_csv(in, path.string());
}

void write_curves_csv(const CurveSet& curves, std::ostream& out) {
    out << "curve_id,component,time,value\n";
    for (const auto& curve : curves.curves) {
        for (std::size_t j = 0; j < curve.components.size(); ++j) {
            const auto& comp = curve.components[j];
            for (std::size_t r = 0; r < comp.times.size(); ++r) {
                out << curve.id << ',' << (j + 1) << ','
                    << format_double(comp.times[r]) << ','
                    << format_double(comp.values[r]) << '\n';
            }
        }
    }
}

void write_curves_csv(const CurveSet& curves,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IngestError("cannot write '" + path.string() + "'");
    }
    write_curves_csv(curves, out);
    if (!out.good()) {
        throw IngestError("write failed for '" + path.string() + "'");
    }
}

CurveSet normalize_time(const CurveSet& curves) {
    CurveSet out = curves;
    out.domain = {0.0, 1.0};
    for (auto& curve : out.curves) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& comp : curve.components) {
            for (double t : comp.times) {
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
        }
        if (!(hi > lo)) {
            throw ConfigError("curve '" + curve.id +
                              "': constant time grid, cannot normalize");
        }
        const double span = hi - lo;
        for (auto& comp : curve.components) {
            for (double& t : comp.times) {
                t = (t - lo) / span;
            }
        }
    }
    return out;
}

} // namespace cfunhddc
