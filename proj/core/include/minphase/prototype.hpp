#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "minphase/analysis.hpp"
#include "minphase/equiripple.hpp"
#include "minphase/spec.hpp"
#include "minphase/spectral_factor.hpp"

namespace minphase {

/// Target for G(u) ≈ |C(u)|²: desired 1 on the pass band, 0 on stop bands.
/// Each band weight is 1/δ′ of that band, so a common weighted error of 1
/// meets every band's δ′ at once.
struct PrototypeSpec {
    std::vector<PrototypeBand> bands;
    /// δ₁′, the pass-band tolerance on G.
    double delta_pass = 0.0;
    /// δ₂′ of the tightest stop band.
    double delta_stop = 0.0;
    /// Per-band δ′ in band order (pass entry equals delta_pass).
    std::vector<double> band_delta;
    std::size_t target_n = 0;
};

/// Weight on a single-point pass constraint relative to the stop bands.
inline constexpr double kDegeneratePassWeightRatio = 1e6;

/// δ₂′ = δ_s²/2 per stop band and δ₁′ = 1 - (1-δ_p)² - 2δ₂′, with δ_p the
/// half ripple 1 - 10^(-ripple_db/40). Throws InfeasibleError when δ₁′ <= 0.
/// `spec` must already be validated.
[[nodiscard]] PrototypeSpec to_prototype_spec(const DesignSpec& spec);

/// Rebuilds band weights after scaling each band's δ′ by `scale[i]`.
[[nodiscard]] PrototypeSpec scaled(const PrototypeSpec& pspec, const std::vector<double>& scale);

/// (2N-1)-tap equiripple design of `pspec`.
[[nodiscard]] LinearPhasePrototype design_prototype(const PrototypeSpec& pspec, std::size_t n,
                                                    const RemezOptions& options = {});

struct SearchLimits {
    std::size_t max_n = 64;
    SpectralOptions spectral;
    RemezOptions remez;
    std::size_t grid_points = kDefaultGridPoints;
    double zero_tol = 1e-6;
    /// Retries per N with the violated bands' δ′ multiplied by shrink_factor.
    std::size_t max_shrinks = 5;
    double shrink_factor = 0.9;
};

/// Outcome of the full pipeline at one element count.
struct OrderTrial {
    std::size_t n = 0;
    bool feasible = false;
    std::size_t shrinks = 0;
    double worst_margin_db = -std::numeric_limits<double>::infinity();
    /// Empty unless the pipeline threw.
    std::string failure;
    std::vector<double> weights;
    std::optional<LinearPhasePrototype> prototype;
    std::optional<DesignReport> report;
};

/// prototype -> spectral_factorize -> evaluate_design at a fixed N, with the
/// shrink loop. Checks `spec` itself, never the transformed bounds.
[[nodiscard]] OrderTrial design_at_order(const DesignSpec& spec, std::size_t n,
                                         const SearchLimits& limits = {});

struct OrderSearchResult {
    bool satisfied = false;
    /// Minimal feasible trial, or the trial with the best worst-margin when
    /// nothing up to max_n is feasible.
    OrderTrial best;
    /// The trial at best.n - 1 showing minimality (absent when best.n == 1).
    std::optional<OrderTrial> witness;
    std::size_t initial_estimate = 0;
    /// Element counts tried, in order.
    std::vector<std::size_t> visited;
};

/// Linear search for the smallest N meeting `spec`, seeded by
/// estimate_order: step down while feasible, up while infeasible.
[[nodiscard]] OrderSearchResult find_min_order(const DesignSpec& spec,
                                               const SearchLimits& limits = {});

}  // namespace minphase
