#include "minphase_tools/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace minphase::tools {

namespace {

using nlohmann::json;

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

double number(const json& obj, const std::string& key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + "." + key + ": missing");
    if (!it->is_number()) throw ParseError(where + "." + key + ": expected a number");
    return it->get<double>();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key)) throw ParseError(where + ": unknown field '" + key + "'");
    }
}

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

DesignSpec parse_spec_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError(fmt::format("line {}, column {}: {}", line, col, e.what()));
    }
    if (!doc.is_object()) throw ParseError("line 1, column 1: spec must be a JSON object");
    reject_unknown(doc, {"name", "spacing_wavelengths", "angle_unit", "steering_angle_rad", "bands"},
                   "spec");

    DesignSpec spec;
    spec.spacing_wavelengths = number(doc, "spacing_wavelengths", "spec");
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw ParseError("spec.name: expected a string");
        spec.name = doc["name"].get<std::string>();
    }
    if (doc.contains("steering_angle_rad")) {
        spec.steering_angle_rad = number(doc, "steering_angle_rad", "spec");
    }
    bool degrees = false;
    if (doc.contains("angle_unit")) {
        const auto& unit = doc["angle_unit"];
        if (!unit.is_string()) throw ParseError("spec.angle_unit: expected a string");
        if (unit == "theta_deg") {
            degrees = true;
        } else if (unit != "u_rad") {
            throw ParseError("spec.angle_unit: expected \"u_rad\" or \"theta_deg\"");
        }
    }

    const auto bands = doc.find("bands");
    if (bands == doc.end() || !bands->is_array()) throw ParseError("spec.bands: expected an array");
    for (std::size_t i = 0; i < bands->size(); ++i) {
        const json& b = (*bands)[i];
        const std::string where = fmt::format("spec.bands[{}]", i);
        if (!b.is_object()) throw ParseError(where + ": expected an object");
        reject_unknown(b, {"u_lo", "u_hi", "kind", "ripple_db", "max_level_db"}, where);
        BandSpec band;
        band.u_lo = number(b, "u_lo", where);
        band.u_hi = number(b, "u_hi", where);
        if (degrees) {
            band.u_lo = theta_to_u(deg_to_rad(band.u_lo), spec.spacing_wavelengths);
            band.u_hi = theta_to_u(deg_to_rad(band.u_hi), spec.spacing_wavelengths);
        }
        const auto kind = b.find("kind");
        if (kind == b.end() || !kind->is_string()) {
            throw ParseError(where + ".kind: expected \"pass\" or \"stop\"");
        }
        if (*kind == "pass") {
            band.kind = BandKind::pass;
            band.ripple_db = number(b, "ripple_db", where);
            if (b.contains("max_level_db")) throw ParseError(where + ".max_level_db: not allowed on a pass band");
        } else if (*kind == "stop") {
            band.kind = BandKind::stop;
            band.max_level_db = number(b, "max_level_db", where);
            if (b.contains("ripple_db")) throw ParseError(where + ".ripple_db: not allowed on a stop band");
        } else {
            throw ParseError(where + ".kind: expected \"pass\" or \"stop\"");
        }
        spec.bands.push_back(band);
    }
    return spec;
}

DesignSpec load_spec_file(const std::filesystem::path& path) {
    try {
        return parse_spec_json(read_text(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::vector<Complex> parse_weights_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<Complex> out;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("index", 0) == 0) continue;
        }
        std::vector<std::string> cols;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cols.push_back(cell);
        if (cols.size() < 2 || cols.size() > 3) {
            throw ParseError(fmt::format("line {}: expected index,re[,im]", lineno));
        }
        double vals[3] = {0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < cols.size(); ++k) {
            std::size_t used = 0;
            try {
                vals[k] = std::stod(cols[k], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || cols[k].find_first_not_of(" \t", used) != std::string::npos) {
                throw ParseError(fmt::format("line {}, column {}: '{}' is not a number", lineno,
                                             k + 1, cols[k]));
            }
        }
        if (vals[0] != static_cast<double>(out.size())) {
            throw ParseError(fmt::format("line {}: index {} out of sequence", lineno, cols[0]));
        }
        out.emplace_back(vals[1], vals[2]);
    }
    if (out.empty()) throw ParseError("weights file holds no entries");
    return out;
}

std::vector<Complex> load_weights_file(const std::filesystem::path& path) {
    try {
        return parse_weights_csv(read_text(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string weights_csv(std::span<const Complex> c) {
    std::string out = "index,re,im\n";
    for (std::size_t k = 0; k < c.size(); ++k) {
        out += fmt::format("{},{},{}\n", k, format_real(c[k].real()), format_real(c[k].imag()));
    }
    return out;
}

std::string pattern_csv(const PatternSamples& samples, double spacing_wavelengths) {
    std::string out = "u_rad,theta_deg,magnitude_db\n";
    const double visible = 2.0 * kPi * spacing_wavelengths;
    for (std::size_t i = 0; i < samples.u.size(); ++i) {
        const double u = samples.u[i];
        const double theta = std::abs(u) <= visible
                                 ? rad_to_deg(u_to_theta(u, spacing_wavelengths))
                                 : std::numeric_limits<double>::quiet_NaN();
        out += fmt::format("{:.12f},{:.4f},{:.4f}\n", u, theta, round_db(samples.magnitude_db[i]));
    }
    return out;
}

std::string zeros_csv(const ZeroSet& zeros) {
    std::string out = "re,im,radius\n";
    for (const auto& z : zeros.zeros) {
        out += fmt::format("{},{},{}\n", format_real(z.real()), format_real(z.imag()),
                           format_real(std::abs(z)));
    }
    return out;
}

double round_db(double value_db) {
    if (!std::isfinite(value_db)) return value_db;
    const double r = std::round(value_db * 1e4) / 1e4;
    return r == 0.0 ? 0.0 : r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace minphase::tools
