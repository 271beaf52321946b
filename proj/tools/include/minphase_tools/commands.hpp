#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <minphase/prototype.hpp>

namespace minphase::tools {

enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitUnmet = 2 };

enum class Command { design, analyze, reproduce };

struct RunConfig {
    Command command = Command::design;
    std::filesystem::path spec_path;
    std::filesystem::path weights_path;
    std::string builtin;
    std::filesystem::path output_dir = ".";
    std::size_t q_factor = 30;
    std::size_t grid_points = kDefaultGridPoints;
    std::size_t max_n = 64;
    bool newton_refine = false;
    double zero_tol = 1e-6;
    double gamma_margin = 1e-3;
    /// Replaces the built-in Design 3 stop edge (u radians).
    std::optional<double> design3_stop_edge;
};

/// Empty when the overrides satisfy q_factor >= 1, grid_points >= 1024,
/// max_n >= 1, zero_tol >= 0 and gamma_margin > 0.
[[nodiscard]] std::vector<std::string> check_config(const RunConfig& config);

[[nodiscard]] SearchLimits limits_from(const RunConfig& config);

/// Stop edge used by the built-in Design 3 (u radians). Calibrated so the
/// order search returns 14 elements.
inline constexpr double kDesign3StopEdge = 1.2605;

inline constexpr std::size_t kPencilTaps = 27;

/// design1, design2, design3 as DesignSpec. pencil is degenerate-pass at
/// u = 0 with stop [0.1π, π] at -30 dB. Throws std::invalid_argument for an
/// unknown id.
[[nodiscard]] DesignSpec builtin_spec(const std::string& id,
                                      std::optional<double> design3_stop_edge = std::nullopt);

[[nodiscard]] const std::vector<std::string>& builtin_ids();

/// The pencil-beam prototype: a direct equiripple design of the pattern
/// with `taps` coefficients.
[[nodiscard]] LinearPhasePrototype pencil_prototype(std::size_t taps = kPencilTaps,
                                                    const RemezOptions& options = {});

struct CriterionCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ReproduceOutcome {
    std::string id;
    DesignSpec spec;
    std::vector<double> weights;
    std::optional<LinearPhasePrototype> prototype;
    std::optional<DesignReport> report;
    std::optional<OrderSearchResult> search;
    std::vector<CriterionCheck> checks;
    double runtime_s = 0.0;
    int exit_code = kExitOk;

    [[nodiscard]] bool all_passed() const;
};

/// Runs one built-in design, writes its artifacts to config.output_dir and
/// evaluates the headline numbers. Prints one PASS/FAIL line per check to
/// `out`. Throws std::invalid_argument for an unknown id.
[[nodiscard]] ReproduceOutcome reproduce(const std::string& id, const RunConfig& config,
                                         std::ostream& out);

/// Exit-code wrappers used by main(); diagnostics go to `err`.
[[nodiscard]] int run_design(const RunConfig& config, std::ostream& out, std::ostream& err);
[[nodiscard]] int run_reproduce(const RunConfig& config, std::ostream& out, std::ostream& err);
[[nodiscard]] int run_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);

/// JSON text of a report, dB values rounded to 4 decimals.
[[nodiscard]] std::string report_json(const DesignReport& report,
                                      const OrderSearchResult* search = nullptr);

inline constexpr const char* kWeightsFile = "weights.csv";
inline constexpr const char* kPatternFile = "pattern.csv";
inline constexpr const char* kZerosFile = "zeros.csv";
inline constexpr const char* kReportFile = "report.json";

}  // namespace minphase::tools
