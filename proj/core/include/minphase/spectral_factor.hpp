#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace minphase {

/// Symmetric banded Toeplitz matrix G + γI of dimension 2Q + N built from a
/// symmetric prototype g of length 2N-1: entry (i, j) is g[N-1-|i-j|] for
/// |i-j| <= N-1 and zero otherwise. Only the N band values are stored.
class ToeplitzOperator {
public:
    ToeplitzOperator(std::span<const double> g, std::size_t expansion, double gamma = 0.0);

    [[nodiscard]] std::size_t elements() const noexcept { return band_.size(); }
    [[nodiscard]] std::size_t expansion() const noexcept { return expansion_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return 2 * expansion_ + band_.size(); }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    /// Value on the k-th diagonal, k = |i - j|, including the shift on k = 0.
    [[nodiscard]] double diagonal(std::size_t k) const noexcept;
    [[nodiscard]] double entry(std::size_t i, std::size_t j) const noexcept;
    [[nodiscard]] ToeplitzOperator shifted(double gamma) const;
    /// max |g|, the scale every tolerance is taken relative to.
    [[nodiscard]] double scale() const noexcept { return scale_; }

private:
    std::vector<double> band_;  // band_[k] = g[N-1-k]
    std::size_t expansion_;
    double gamma_;
    double scale_;
};

/// Upper-triangular banded factor C with CᵀC = G + γI. Stored as the rows of
/// the lower factor L = Cᵀ: lower(i, k) = L(i, i - k) for k < bandwidth.
class BandedCholeskyFactor {
public:
    BandedCholeskyFactor(std::size_t dimension, std::size_t bandwidth);

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t bandwidth() const noexcept { return bandwidth_; }
    /// Entry (i, j) of the upper factor C; zero outside the band.
    [[nodiscard]] double upper(std::size_t i, std::size_t j) const noexcept;
    /// C · e_j, the full column (length = dimension).
    [[nodiscard]] std::vector<double> apply_to_unit(std::size_t j) const;
    /// (CᵀC)(i, j).
    [[nodiscard]] double reconstruct(std::size_t i, std::size_t j) const noexcept;

    double& lower(std::size_t row, std::size_t k) noexcept { return data_[row * bandwidth_ + k]; }
    [[nodiscard]] double lower(std::size_t row, std::size_t k) const noexcept {
        return data_[row * bandwidth_ + k];
    }

private:
    std::size_t dimension_;
    std::size_t bandwidth_;
    std::vector<double> data_;
};

/// Pivots at or below 1e-14 · max|g| count as failure.
inline constexpr double kPivotFloorRelative = 1e-14;

/// Banded Cholesky in O(dim · N²). Returns nullopt on pivot failure.
[[nodiscard]] std::optional<BandedCholeskyFactor> try_cholesky_banded(const ToeplitzOperator& op);

/// As try_cholesky_banded, throwing FactorizationError on pivot failure.
[[nodiscard]] BandedCholeskyFactor cholesky_banded(const ToeplitzOperator& op);

struct GammaEstimate {
    double gamma = 0.0;
    /// Smallest eigenvalue of G located by Cholesky-success bisection.
    double lambda_min_estimate = 0.0;
    bool shift_required = false;
    std::size_t factorizations = 0;
};

/// γ = 0 when G factors unshifted, otherwise |λ_min| (1 + margin) where
/// |λ_min| is the smallest shift that lets the Cholesky succeed, found by
/// bisection to `relative_tolerance`.
[[nodiscard]] GammaEstimate find_gamma(std::span<const double> g, std::size_t expansion,
                                       double margin = 1e-3, double relative_tolerance = 1e-6);

struct MinPhaseWeights {
    /// c[0] multiplies the zeroth element; Σ c > 0.
    std::vector<double> c;
    double gamma_used = 0.0;
    std::size_t q_used = 0;
    /// max |entry| of C δ_aug outside the N-window, over max |c|.
    double purge_residual = 0.0;
    /// max |row(Q+N-1) - row(Q+N-2)| of the factor over max |c| (extraction
    /// convergence in Q).
    double row_drift = 0.0;
};

inline constexpr double kPurgeWarnTolerance = 1e-6;

/// c_aug = C δ_aug with the unit entry at row Q + N - 1; positions
/// Q..Q+N-1 hold c_{N-1}..c_0.
[[nodiscard]] MinPhaseWeights extract_min_phase(const BandedCholeskyFactor& factor,
                                                std::size_t elements, std::size_t expansion);

/// r[N-1+m] = Σ_k c_k c_{k+m}, symmetric, length 2N-1.
[[nodiscard]] std::vector<double> autocorrelation(std::span<const double> c);

struct FactorizationDiagnostics {
    double gamma = 0.0;
    double lambda_min_estimate = 0.0;
    double gamma_margin_used = 0.0;
    /// max |autocorrelation(c) - g - γ e_center|
    double autocorr_residual = 0.0;
    double purge_residual = 0.0;
    double row_drift = 0.0;
    std::size_t q = 0;
    std::size_t factorizations = 0;
    bool newton_refined = false;
    std::size_t newton_iterations = 0;
    std::vector<std::string> warnings;
};

/// Residual check of the autocorrelation equations for c against g and γ.
[[nodiscard]] FactorizationDiagnostics verify_factorization(std::span<const double> c,
                                                            std::span<const double> g,
                                                            double gamma);

struct NewtonResult {
    std::vector<double> c;
    bool converged = false;
    std::size_t iterations = 0;
    double residual = 0.0;
    std::string note;
};

/// Newton iteration on the N autocorrelation equations. On failure the
/// initial vector is returned with converged = false. `tol` is taken
/// relative to max(1, max|g|).
[[nodiscard]] NewtonResult refine_newton(std::span<const double> c_init,
                                         std::span<const double> g, double gamma,
                                         std::size_t max_iter = 50, double tol = 1e-13);

struct SpectralOptions {
    /// Q = q_factor · N.
    std::size_t q_factor = 30;
    double gamma_margin = 1e-3;
    /// Raise the margin along a fixed ladder until the autocorrelation
    /// residual falls below residual_target · max|g|.
    bool adaptive_margin = true;
    double residual_target = 1e-9;
    /// Use this γ instead of searching for one.
    std::optional<double> fixed_gamma;
    bool newton = false;
};

struct FactorizationResult {
    MinPhaseWeights weights;
    FactorizationDiagnostics diagnostics;
};

/// find_gamma -> cholesky_banded -> extract_min_phase -> verify_factorization
/// (-> refine_newton). g must be symmetric with odd length.
[[nodiscard]] FactorizationResult spectral_factorize(std::span<const double> g,
                                                     const SpectralOptions& options = {});

}  // namespace minphase
