#pragma once

#include <string>
#include <vector>

#include "minphase/error.hpp"

namespace minphase {

inline constexpr double kPi = 3.14159265358979323846;

enum class BandKind { pass, stop };

/// One band of a magnitude mask, in u-domain radians on [0, π].
struct BandSpec {
    double u_lo = 0.0;
    double u_hi = 0.0;
    BandKind kind = BandKind::stop;
    /// Peak-to-peak flat-top ripple bound in dB (pass bands only).
    double ripple_db = 0.0;
    /// Sidelobe ceiling in dB relative to the pattern maximum (stop bands only).
    double max_level_db = 0.0;

    [[nodiscard]] bool degenerate() const noexcept { return u_hi == u_lo; }

    static BandSpec pass(double lo, double hi, double ripple_db) {
        return {lo, hi, BandKind::pass, ripple_db, 0.0};
    }
    static BandSpec stop(double lo, double hi, double max_level_db) {
        return {lo, hi, BandKind::stop, 0.0, max_level_db};
    }

    bool operator==(const BandSpec&) const = default;
};

/// Magnitude pattern mask for a uniform linear array. Only the
/// non-negative half of the u axis is stored: real weights give an even
/// magnitude pattern.
struct DesignSpec {
    double spacing_wavelengths = 0.5;
    std::vector<BandSpec> bands;
    double steering_angle_rad = 0.0;
    std::string name;

    [[nodiscard]] const BandSpec& pass_band() const;

    bool operator==(const DesignSpec&) const = default;
};

/// u = 2π (d/λ) sin θ.
[[nodiscard]] double theta_to_u(double theta, double spacing_wavelengths);

/// Inverse of theta_to_u on the visible region |u| <= 2π d/λ.
/// Throws DomainError outside it.
[[nodiscard]] double u_to_theta(double u, double spacing_wavelengths);

[[nodiscard]] double db_to_amplitude(double level_db) noexcept;

/// Returns -infinity for a zero amplitude.
[[nodiscard]] double amplitude_to_db(double amplitude) noexcept;

[[nodiscard]] double deg_to_rad(double deg) noexcept;
[[nodiscard]] double rad_to_deg(double rad) noexcept;

/// Every violation found in `spec`, in band order. Empty means valid.
[[nodiscard]] std::vector<SpecIssue> check_spec(const DesignSpec& spec);

/// Returns `spec` with bands sorted by u_lo and edges within 1e-12 of π
/// snapped to π. Throws SpecError carrying every issue otherwise.
[[nodiscard]] DesignSpec validate_spec(DesignSpec spec);

[[nodiscard]] const char* to_string(BandKind kind) noexcept;

}  // namespace minphase
