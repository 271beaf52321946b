#include "minphase/spectral_factor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "minphase/error.hpp"

namespace minphase {

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void check_symmetric(std::span<const double> g) {
    if (g.empty() || g.size() % 2 == 0) {
        throw std::invalid_argument("prototype taps must have odd length 2N-1");
    }
    const double tol = 1e-12 * std::max(max_abs(g), 1.0);
    for (std::size_t k = 0; k < g.size() / 2; ++k) {
        if (std::abs(g[k] - g[g.size() - 1 - k]) > tol) {
            throw std::invalid_argument("prototype taps are not symmetric");
        }
    }
}

bool cholesky_succeeds(const ToeplitzOperator& op) { return try_cholesky_banded(op).has_value(); }

void apply_sign_convention(std::vector<double>& c) {
    if (std::accumulate(c.begin(), c.end(), 0.0) < 0.0) {
        for (double& x : c) x = -x;
    }
}

constexpr std::array<double, 14> kMarginLadder = {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.2, 0.3,
                                                  0.5,  0.75, 1.0,  1.5,  2.0, 3.0, 4.0};

}  // namespace

ToeplitzOperator::ToeplitzOperator(std::span<const double> g, std::size_t expansion, double gamma)
    : expansion_(expansion), gamma_(gamma) {
    check_symmetric(g);
    if (expansion == 0) throw std::invalid_argument("expansion factor Q must be >= 1");
    const std::size_t n = (g.size() + 1) / 2;
    band_.resize(n);
    for (std::size_t k = 0; k < n; ++k) band_[k] = g[n - 1 - k];
    scale_ = max_abs(g);
}

double ToeplitzOperator::diagonal(std::size_t k) const noexcept {
    if (k >= band_.size()) return 0.0;
    return k == 0 ? band_[0] + gamma_ : band_[k];
}

double ToeplitzOperator::entry(std::size_t i, std::size_t j) const noexcept {
    return diagonal(i > j ? i - j : j - i);
}

ToeplitzOperator ToeplitzOperator::shifted(double gamma) const {
    ToeplitzOperator out = *this;
    out.gamma_ = gamma;
    return out;
}

BandedCholeskyFactor::BandedCholeskyFactor(std::size_t dimension, std::size_t bandwidth)
    : dimension_(dimension), bandwidth_(bandwidth), data_(dimension * bandwidth, 0.0) {}

double BandedCholeskyFactor::upper(std::size_t i, std::size_t j) const noexcept {
    if (i > j || j - i >= bandwidth_ || j >= dimension_) return 0.0;
    return lower(j, j - i);
}

std::vector<double> BandedCholeskyFactor::apply_to_unit(std::size_t j) const {
    std::vector<double> col(dimension_, 0.0);
    for (std::size_t i = 0; i < dimension_; ++i) col[i] = upper(i, j);
    return col;
}

double BandedCholeskyFactor::reconstruct(std::size_t i, std::size_t j) const noexcept {
    // (CᵀC)(i, j) = Σ_p L(i, p) L(j, p)
    if (i < j) std::swap(i, j);
    if (i - j >= bandwidth_) return 0.0;
    double acc = 0.0;
    const std::size_t p_lo = i + 1 >= bandwidth_ ? i + 1 - bandwidth_ : 0;
    for (std::size_t p = p_lo; p <= j; ++p) acc += lower(i, i - p) * lower(j, j - p);
    return acc;
}

namespace {

std::optional<BandedCholeskyFactor> factor_banded(const ToeplitzOperator& op,
                                                  std::size_t& failed_row) {
    const std::size_t n = op.dimension();
    const std::size_t b = op.elements();
    const double floor = kPivotFloorRelative * op.scale();
    BandedCholeskyFactor factor(n, b);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j_lo = i + 1 >= b ? i + 1 - b : 0;
        for (std::size_t j = j_lo; j <= i; ++j) {
            double s = op.diagonal(i - j);
            for (std::size_t p = j_lo; p < j; ++p) {
                s -= factor.lower(i, i - p) * factor.lower(j, j - p);
            }
            if (j == i) {
                if (!(s > floor)) {
                    failed_row = i;
                    return std::nullopt;
                }
                factor.lower(i, 0) = std::sqrt(s);
            } else {
                factor.lower(i, i - j) = s / factor.lower(j, 0);
            }
        }
    }
    return factor;
}

}  // namespace

std::optional<BandedCholeskyFactor> try_cholesky_banded(const ToeplitzOperator& op) {
    std::size_t failed_row = 0;
    return factor_banded(op, failed_row);
}

BandedCholeskyFactor cholesky_banded(const ToeplitzOperator& op) {
    std::size_t failed_row = 0;
    auto factor = factor_banded(op, failed_row);
    if (!factor) {
        std::ostringstream os;
        os << "banded Cholesky failed at pivot " << failed_row << ": G + " << op.gamma()
           << " I is not positive definite (dimension " << op.dimension() << ")";
        throw FactorizationError(os.str(), failed_row);
    }
    return std::move(*factor);
}

GammaEstimate find_gamma(std::span<const double> g, std::size_t expansion, double margin,
                         double relative_tolerance) {
    const ToeplitzOperator op(g, expansion);
    if (op.scale() == 0.0) throw std::invalid_argument("find_gamma: prototype is identically zero");
    GammaEstimate est;
    auto ok = [&](double shift) {
        ++est.factorizations;
        return cholesky_succeeds(op.shifted(shift));
    };

    if (ok(0.0)) {
        // Positive definite: bracket the smallest eigenvalue from below.
        double lo = 0.0;
        double hi = std::max(op.diagonal(0), 0.0);
        while (hi - lo > relative_tolerance * hi) {
            const double mid = 0.5 * (lo + hi);
            if (ok(-mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        est.lambda_min_estimate = lo;
        est.gamma = 0.0;
        est.shift_required = false;
        return est;
    }

    double lo = 0.0;
    double hi = std::accumulate(g.begin(), g.end(), 0.0,
                                [](double acc, double x) { return acc + std::abs(x); });
    for (int k = 0; !ok(hi); ++k) {
        if (k > 60) throw Error("find_gamma: could not bracket the smallest eigenvalue");
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > relative_tolerance * hi) {
        const double mid = 0.5 * (lo + hi);
        if (ok(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    est.lambda_min_estimate = -hi;
    est.gamma = hi * (1.0 + margin);
    est.shift_required = true;
    return est;
}

MinPhaseWeights extract_min_phase(const BandedCholeskyFactor& factor, std::size_t elements,
                                  std::size_t expansion) {
    if (factor.bandwidth() != elements || factor.dimension() != 2 * expansion + elements) {
        throw std::invalid_argument("extract_min_phase: factor does not match N and Q");
    }
    const std::size_t pivot = expansion + elements - 1;
    const std::vector<double> c_aug = factor.apply_to_unit(pivot);

    MinPhaseWeights w;
    w.q_used = expansion;
    w.c.resize(elements);
    for (std::size_t k = 0; k < elements; ++k) w.c[k] = c_aug[pivot - k];
    const double peak = max_abs(w.c);

    double purged = 0.0;
    for (std::size_t i = 0; i < c_aug.size(); ++i) {
        if (i < expansion || i > pivot) purged = std::max(purged, std::abs(c_aug[i]));
    }
    w.purge_residual = peak > 0.0 ? purged / peak : purged;

    double drift = 0.0;
    for (std::size_t k = 0; k < elements; ++k) {
        drift = std::max(drift, std::abs(factor.lower(pivot, k) - factor.lower(pivot - 1, k)));
    }
    w.row_drift = peak > 0.0 ? drift / peak : drift;

    apply_sign_convention(w.c);
    return w;
}

std::vector<double> autocorrelation(std::span<const double> c) {
    if (c.empty()) return {};
    const std::size_t n = c.size();
    std::vector<double> r(2 * n - 1, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
        double acc = 0.0;
        for (std::size_t k = 0; k + m < n; ++k) acc += c[k] * c[k + m];
        r[n - 1 + m] = acc;
        r[n - 1 - m] = acc;
    }
    return r;
}

FactorizationDiagnostics verify_factorization(std::span<const double> c, std::span<const double> g,
                                              double gamma) {
    if (c.empty() || g.size() != 2 * c.size() - 1) {
        throw std::invalid_argument("verify_factorization: need |g| = 2|c| - 1");
    }
    auto r = autocorrelation(c);
    const std::size_t center = c.size() - 1;
    double worst = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        double res = r[k] - g[k];
        if (k == center) res -= gamma;
        worst = std::max(worst, std::abs(res));
    }
    FactorizationDiagnostics d;
    d.gamma = gamma;
    d.autocorr_residual = worst;
    return d;
}

NewtonResult refine_newton(std::span<const double> c_init, std::span<const double> g, double gamma,
                           std::size_t max_iter, double tol) {
    const std::size_t n = c_init.size();
    if (n == 0 || g.size() != 2 * n - 1) {
        throw std::invalid_argument("refine_newton: need |g| = 2|c| - 1");
    }
    const double tol_abs = tol * std::max(1.0, max_abs(g));
    Eigen::VectorXd target(n);
    for (std::size_t m = 0; m < n; ++m) target(m) = g[n - 1 + m];
    target(0) += gamma;

    auto residual = [&](const Eigen::VectorXd& c) {
        Eigen::VectorXd f(n);
        for (std::size_t m = 0; m < n; ++m) {
            double acc = 0.0;
            for (std::size_t k = 0; k + m < n; ++k) acc += c(k) * c(k + m);
            f(m) = acc - target(m);
        }
        return f;
    };

    NewtonResult out;
    out.c.assign(c_init.begin(), c_init.end());
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(c_init.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd f = residual(c);
    const double initial = f.cwiseAbs().maxCoeff();
    out.residual = initial;
    if (initial <= tol_abs) {
        out.converged = true;
        return out;
    }

    Eigen::VectorXd best = c;
    double best_res = initial;
    std::size_t stalled = 0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t m = 0; m < n; ++m) {
            for (std::size_t i = 0; i < n; ++i) {
                double v = 0.0;
                if (i + m < n) v += c(i + m);
                if (i >= m) v += c(i - m);
                jac(m, i) = v;
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) {
            out.note = "singular Jacobian";
            out.residual = initial;
            return out;
        }
        c -= lu.solve(f);
        f = residual(c);
        const double res = f.cwiseAbs().maxCoeff();
        out.iterations = it;
        if (!std::isfinite(res) || res > 1e3 * std::max(initial, tol_abs)) {
            out.note = "diverged";
            out.residual = initial;
            out.iterations = it;
            return out;
        }
        if (res < best_res) {
            best = c;
            stalled = (res > 0.5 * best_res) ? stalled + 1 : 0;
            best_res = res;
        } else {
            ++stalled;
        }
        if (best_res <= tol_abs || stalled >= 3) break;
    }
    out.c.assign(best.data(), best.data() + n);
    apply_sign_convention(out.c);
    out.residual = best_res;
    out.converged = best_res <= tol_abs;
    if (!out.converged && out.note.empty()) out.note = "residual stalled above tolerance";
    return out;
}

FactorizationResult spectral_factorize(std::span<const double> g, const SpectralOptions& options) {
    check_symmetric(g);
    if (options.q_factor == 0) throw std::invalid_argument("q_factor must be >= 1");
    const std::size_t n = (g.size() + 1) / 2;
    const std::size_t q = options.q_factor * n;
    const double scale = max_abs(g);

    FactorizationResult out;
    auto& diag = out.diagnostics;

    auto attempt = [&](double gamma) -> std::optional<FactorizationResult> {
        ++diag.factorizations;
        const auto factor = try_cholesky_banded(ToeplitzOperator(g, q, gamma));
        if (!factor) return std::nullopt;
        FactorizationResult r;
        r.weights = extract_min_phase(*factor, n, q);
        r.weights.gamma_used = gamma;
        r.diagnostics = verify_factorization(r.weights.c, g, gamma);
        return r;
    };

    std::optional<FactorizationResult> chosen;
    double lambda_min = 0.0;
    double margin_used = 0.0;

    if (options.fixed_gamma) {
        chosen = attempt(*options.fixed_gamma);
        if (!chosen) {
            throw FactorizationError("spectral_factorize: fixed gamma leaves G + gamma I indefinite",
                                     0);
        }
        lambda_min = -*options.fixed_gamma;
        diag.warnings.push_back("gamma fixed by caller");
    } else {
        const GammaEstimate est = find_gamma(g, q, options.gamma_margin);
        diag.factorizations += est.factorizations;
        lambda_min = est.lambda_min_estimate;
        if (!est.shift_required) {
            chosen = attempt(0.0);
            if (!chosen) throw FactorizationError("spectral_factorize: unshifted factorization failed", 0);
        } else {
            std::vector<double> margins{options.gamma_margin};
            if (options.adaptive_margin) {
                for (double m : kMarginLadder) {
                    if (m > options.gamma_margin) margins.push_back(m);
                }
            }
            const double target = options.residual_target * scale;
            const double base = -est.lambda_min_estimate;
            for (double m : margins) {
                auto r = attempt(base * (1.0 + m));
                if (!r) continue;
                const bool better =
                    !chosen || r->diagnostics.autocorr_residual < chosen->diagnostics.autocorr_residual;
                if (better) {
                    chosen = std::move(r);
                    margin_used = m;
                }
                if (chosen->diagnostics.autocorr_residual <= target) break;
            }
            if (!chosen) {
                throw FactorizationError("spectral_factorize: no margin produced a factorization", 0);
            }
            if (options.adaptive_margin && chosen->diagnostics.autocorr_residual > target) {
                diag.warnings.push_back("autocorrelation residual above target at every gamma margin");
            }
        }
    }

    const std::size_t factorizations = diag.factorizations;
    auto warnings = std::move(diag.warnings);
    out.weights = std::move(chosen->weights);
    diag = std::move(chosen->diagnostics);
    diag.factorizations = factorizations;
    diag.warnings = std::move(warnings);
    diag.gamma = out.weights.gamma_used;
    diag.lambda_min_estimate = lambda_min;
    diag.gamma_margin_used = margin_used;
    diag.q = q;
    diag.purge_residual = out.weights.purge_residual;
    diag.row_drift = out.weights.row_drift;
    if (out.weights.purge_residual > kPurgeWarnTolerance) {
        diag.warnings.push_back("purge residual above 1e-6: expansion factor Q too small");
    }

    if (options.newton) {
        const auto refined = refine_newton(out.weights.c, g, out.weights.gamma_used);
        diag.newton_iterations = refined.iterations;
        if (refined.converged) {
            out.weights.c = refined.c;
            diag.newton_refined = true;
            diag.autocorr_residual =
                verify_factorization(out.weights.c, g, out.weights.gamma_used).autocorr_residual;
        } else {
            diag.warnings.push_back("newton refinement failed: " + refined.note);
        }
    }
    return out;
}

}  // namespace minphase
