#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <minphase/analysis.hpp>
#include <minphase/spec.hpp>

namespace minphase::tools {

/// Malformed spec or weights file. The message carries line/column or the
/// offending field path.
class ParseError : public Error {
public:
    using Error::Error;
};

/// JSON spec document:
///   { "name": str?, "spacing_wavelengths": num, "angle_unit": "u_rad"|"theta_deg"?,
///     "steering_angle_rad": num?,
///     "bands": [ { "u_lo": num, "u_hi": num, "kind": "pass"|"stop",
///                  "ripple_db": num | "max_level_db": num } ] }
/// With angle_unit theta_deg the band edges are θ in degrees and are mapped
/// to u on load. The result is not validated.
[[nodiscard]] DesignSpec parse_spec_json(const std::string& text);
[[nodiscard]] DesignSpec load_spec_file(const std::filesystem::path& path);

/// `index,re,im` with a header row. A missing im column reads as 0.
[[nodiscard]] std::vector<Complex> parse_weights_csv(const std::string& text);
[[nodiscard]] std::vector<Complex> load_weights_file(const std::filesystem::path& path);

[[nodiscard]] std::string weights_csv(std::span<const Complex> c);
/// `u_rad,theta_deg,magnitude_db`; theta_deg is nan outside the visible region.
[[nodiscard]] std::string pattern_csv(const PatternSamples& samples, double spacing_wavelengths);
[[nodiscard]] std::string zeros_csv(const ZeroSet& zeros);

/// Rounds to 4 decimals; non-finite values pass through.
[[nodiscard]] double round_db(double value_db);

void write_text(const std::filesystem::path& path, const std::string& text);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);

}  // namespace minphase::tools
