#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace minphase {

/// Piecewise-constant target for the equiripple design, u in [0, π].
/// A band with u_lo == u_hi is a single-point constraint.
struct PrototypeBand {
    double u_lo = 0.0;
    double u_hi = 0.0;
    double desired = 0.0;
    double weight = 1.0;
};

struct RemezOptions {
    /// Grid points per expected extremum.
    std::size_t grid_density = 16;
    std::size_t max_iterations = 250;
    /// Stop once max |E(u)| exceeds |δ| by no more than this relative amount.
    double tolerance = 1e-10;
};

/// Odd-length (type-I) symmetric real prototype g of length 2L+1.
struct LinearPhasePrototype {
    std::vector<double> taps;
    std::size_t half_order = 0;
    std::vector<PrototypeBand> bands;
    /// Peak |desired - A(u)| per band (unweighted, linear).
    std::vector<double> achieved_delta;
    /// Common level of the weighted error W(u)(D(u) - A(u)).
    double weighted_delta = 0.0;
    /// Final reference set (half_order + 2 points, ascending u).
    std::vector<double> extremal_u;
    std::size_t iterations = 0;

    /// a[0] = g[L], a[m] = 2 g[L+m]; A(u) = Σ a[m] cos(m u).
    [[nodiscard]] std::vector<double> cosine_coefficients() const;
};

/// Chebyshev (minimax) design of A(u) = Σ_{m=0}^{L} a_m cos(m u) over the
/// union of `bands` by the Remez exchange. Extrema are located on a dense grid
/// and then refined on the continuum, so the result equioscillates to
/// `tolerance` everywhere in the bands, not just on grid points.
///
/// Throws ConvergenceError (with the last δ and reference set) and
/// std::invalid_argument for malformed bands.
[[nodiscard]] LinearPhasePrototype remez_design(std::span<const PrototypeBand> bands,
                                                std::size_t half_order,
                                                const RemezOptions& options = {});

/// Zero-phase amplitude of a symmetric odd-length tap vector at u.
[[nodiscard]] double zero_phase_amplitude(std::span<const double> taps, double u);

[[nodiscard]] std::vector<double> amplitude_response(const LinearPhasePrototype& prototype,
                                                     std::span<const double> u_grid);

/// Classical transition-width/ripple order estimate mapped to an element
/// count N (prototype length 2N-1). Seed for the order search only.
/// Throws InfeasibleError when the narrowest transition has zero width.
[[nodiscard]] std::size_t estimate_order(std::span<const PrototypeBand> bands, double delta_pass,
                                         double delta_stop);

}  // namespace minphase
