#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "minphase/spec.hpp"
#include "minphase/spectral_factor.hpp"

namespace minphase {

using Complex = std::complex<double>;

/// Samples of C(u) = Σ c_k e^{j k u}; magnitude_db is normalized so that its
/// maximum over the samples is exactly 0 dB.
struct PatternSamples {
    std::vector<double> u;
    std::vector<double> magnitude_db;
    std::vector<Complex> complex_value;
};

struct ZeroSet {
    /// Roots of Σ c_k z^{N-1-k}, i.e. the zeros of Σ c_k z^{-k}.
    std::vector<Complex> zeros;
    double max_radius = 0.0;
    /// max |p(z_i)| / Σ |c_k| |z_i|^{n-k} after polishing.
    double max_residual = 0.0;
};

struct MinPhaseVerdict {
    bool minimum_phase = true;
    std::vector<Complex> offenders;
};

struct BandMetric {
    std::size_t band_index = 0;
    BandKind kind = BandKind::stop;
    double u_lo = 0.0;
    double u_hi = 0.0;
    /// Stop: max level in dB. Pass: peak-to-peak ripple in dB.
    double achieved_db = 0.0;
    double bound_db = 0.0;
    /// bound - achieved for stop bands and ripple; positive is compliant.
    double margin_db = 0.0;
    bool compliant = false;
};

struct ZeroSummary {
    std::size_t count = 0;
    double max_radius = 0.0;
    double min_radius = 0.0;
    bool minimum_phase = false;
};

struct DesignReport {
    std::string name;
    std::size_t element_count = 0;
    std::vector<BandMetric> bands;
    double flat_top_ripple_db = 0.0;
    double max_sidelobe_db = 0.0;
    ZeroSummary zeros;
    FactorizationDiagnostics diagnostics;
    bool compliant = false;

    /// Smallest margin across all bands (dB).
    [[nodiscard]] double worst_margin_db() const;
};

inline constexpr std::size_t kDefaultGridPoints = 8192;

/// `points` uniform samples on [0, π] merged with every band edge of `spec`.
[[nodiscard]] std::vector<double> analysis_grid(std::size_t points, const DesignSpec* spec = nullptr);

/// `points` uniform samples on [-π, π].
[[nodiscard]] std::vector<double> symmetric_grid(std::size_t points);

[[nodiscard]] PatternSamples array_factor(std::span<const Complex> c, std::span<const double> u_grid);
[[nodiscard]] PatternSamples array_factor(std::span<const double> c, std::span<const double> u_grid);

[[nodiscard]] std::vector<Complex> to_complex(std::span<const double> c);

/// Per-band compliance of sampled pattern against `spec`. Throws
/// std::invalid_argument when a band lies outside the sampled range.
[[nodiscard]] std::vector<BandMetric> pattern_metrics(const PatternSamples& samples,
                                                      const DesignSpec& spec);

/// Full report: metrics over the analysis grid plus zero locations.
[[nodiscard]] DesignReport evaluate_design(std::span<const double> c, const DesignSpec& spec,
                                           std::size_t grid_points = kDefaultGridPoints,
                                           double zero_tol = 1e-6);

/// Companion-matrix eigenvalues polished with two Newton steps each. Exact
/// leading and trailing zero coefficients are stripped first.
[[nodiscard]] ZeroSet polynomial_zeros(std::span<const Complex> c);
[[nodiscard]] ZeroSet polynomial_zeros(std::span<const double> c);

[[nodiscard]] MinPhaseVerdict min_phase_check(const ZeroSet& zeros, double tol = 1e-6);

/// Entry k = Σ_{n<=k} |c_n|².
[[nodiscard]] std::vector<double> partial_energy_profile(std::span<const Complex> c);
[[nodiscard]] std::vector<double> partial_energy_profile(std::span<const double> c);

/// Weight vectors with the same |C(u)| as `c`: one per subset of zeros
/// strictly inside the unit circle, with that subset reflected to 1/z̄ and
/// the result rescaled to equal energy. The first entry is `c` itself.
/// Zeros within `unit_tol` of the unit circle are never reflected.
/// Requires N <= 12.
[[nodiscard]] std::vector<std::vector<Complex>> allpass_variants(std::span<const double> c,
                                                                 double unit_tol = 1e-6);

/// Polynomial coefficients c_0..c_{n} of lead · Π (z - z_i), i.e. the weights
/// whose zero set (in the convention of polynomial_zeros) is `zeros`.
[[nodiscard]] std::vector<Complex> weights_from_zeros(std::span<const Complex> zeros,
                                                      Complex lead = 1.0);

/// c'_k = c_k e^{-j k u0}, so that |C'(u)| = |C(u - u0)|.
[[nodiscard]] std::vector<Complex> apply_steering(std::span<const Complex> c, double u0);
[[nodiscard]] std::vector<Complex> apply_steering(std::span<const double> c, double u0);

}  // namespace minphase
