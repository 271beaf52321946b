#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <minphase/analysis.hpp>
#include <minphase/prototype.hpp>
#include <minphase/spectral_factor.hpp>

#include "support/oracles.hpp"

using namespace minphase;
namespace mt = minphase::testing;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> design_prototype_taps(const std::string& id) {
    DesignSpec s;
    if (id == "design1") {
        s.bands = {BandSpec::pass(0.0, kPi * std::sin(0.2182), 0.25),
                   BandSpec::stop(kPi * std::sin(kPi / 3.0), kPi, -52.0)};
        return design_prototype(to_prototype_spec(validate_spec(s)), 6).taps;
    }
    if (id == "design2") {
        s.bands = {BandSpec::pass(0.0, kPi / 2.0, 1.18), BandSpec::stop(1.92, kPi, -21.0)};
        return design_prototype(to_prototype_spec(validate_spec(s)), 14).taps;
    }
    s.bands = {BandSpec::pass(0.0, kPi * std::sin(12.5 * kPi / 180.0), 0.5),
               BandSpec::stop(1.2605, kPi, -30.0)};
    return design_prototype(to_prototype_spec(validate_spec(s)), 14).taps;
}

const std::vector<double> kPair{0.5, 1.25, 0.5};

}  // namespace

TEST(ToeplitzOperator, EntriesFollowBandStructure) {
    const std::vector<double> g{0.1, -0.2, 0.7, 2.0, 0.7, -0.2, 0.1};
    const ToeplitzOperator op(g, 5, 0.25);
    EXPECT_EQ(op.elements(), 4u);
    EXPECT_EQ(op.dimension(), 14u);
    for (std::size_t i = 0; i < op.dimension(); ++i) {
        for (std::size_t j = 0; j < op.dimension(); ++j) {
            const std::size_t k = i > j ? i - j : j - i;
            const double expect = (k < 4 ? g[3 - k] : 0.0) + (k == 0 ? 0.25 : 0.0);
            EXPECT_EQ(op.entry(i, j), expect);
            EXPECT_EQ(op.entry(i, j), op.entry(j, i));
        }
    }
    EXPECT_THROW(ToeplitzOperator(g, 0), std::invalid_argument);
}

TEST(CholeskyBanded, ScalarCase) {
    const std::vector<double> g{4.0};
    for (std::size_t q : {1u, 3u, 10u}) {
        const auto f = cholesky_banded(ToeplitzOperator(g, q));
        for (std::size_t i = 0; i < f.dimension(); ++i) EXPECT_NEAR(f.upper(i, i), 2.0, 1e-15);
    }
}

TEST(CholeskyBanded, ReconstructsPairExample) {
    const ToeplitzOperator op(kPair, 60);
    const auto f = cholesky_banded(op);
    EXPECT_EQ(f.bandwidth(), 2u);
    for (std::size_t i = 0; i < op.dimension(); ++i) {
        for (std::size_t j = i; j < std::min(op.dimension(), i + 3); ++j) {
            EXPECT_NEAR(f.reconstruct(i, j), op.entry(i, j), 1e-12);
        }
    }
}

TEST(CholeskyBanded, ReconstructsRandomAutocorrelations) {
    std::mt19937_64 rng(3);
    for (std::size_t n = 2; n <= 8; ++n) {
        const auto c = mt::random_min_phase(rng, n, 0.95);
        const auto g = mt::convolve_with_reverse(c);
        const ToeplitzOperator op(g, 30 * n, 1e-3 * max_abs(g));
        const auto f = cholesky_banded(op);
        const double tol = 1e-10 * max_abs(g);
        for (std::size_t i = 0; i < op.dimension(); i += 7) {
            for (std::size_t j = i; j < std::min(op.dimension(), i + n + 1); ++j) {
                EXPECT_NEAR(f.reconstruct(i, j), op.entry(i, j), tol);
            }
        }
        for (std::size_t i = 0; i < op.dimension(); ++i) {
            for (std::size_t j = i + n; j < std::min(op.dimension(), i + n + 3); ++j) {
                EXPECT_EQ(f.upper(i, j), 0.0);
            }
        }
    }
}

TEST(CholeskyBanded, IndefiniteMatrixReportsPivot) {
    const std::vector<double> g{1.0, 0.0, 1.0};
    try {
        (void)cholesky_banded(ToeplitzOperator(g, 4));
        FAIL() << "expected FactorizationError";
    } catch (const FactorizationError& e) {
        EXPECT_LT(e.pivot_row(), 10u);
    }
    EXPECT_FALSE(try_cholesky_banded(ToeplitzOperator(g, 4)).has_value());
}

TEST(FindGamma, PsdSymbolNeedsNoShift) {
    std::mt19937_64 rng(5);
    const auto c = mt::random_min_phase(rng, 5, 0.8);
    const auto est = find_gamma(mt::convolve_with_reverse(c), 150);
    EXPECT_EQ(est.gamma, 0.0);
    EXPECT_GE(est.lambda_min_estimate, 0.0);
    EXPECT_FALSE(est.shift_required);
    EXPECT_EQ(find_gamma(std::vector<double>{1.0}, 30).gamma, 0.0);
}

TEST(FindGamma, Design1AgainstDenseEigensolve) {
    const auto g = design_prototype_taps("design1");
    const std::size_t q = 12;
    const auto est = find_gamma(g, q);
    ASSERT_TRUE(est.shift_required);
    const double lambda = mt::dense_lambda_min(g, q);
    ASSERT_LT(lambda, 0.0);
    EXPECT_NEAR(est.lambda_min_estimate, lambda, 2e-6 * std::abs(lambda));
    EXPECT_NEAR(est.gamma, -lambda * 1.001, 1e-5 * std::abs(lambda));

    DesignSpec s;
    s.bands = {BandSpec::pass(0.0, kPi * std::sin(0.2182), 0.25),
               BandSpec::stop(kPi * std::sin(kPi / 3.0), kPi, -52.0)};
    const double d2 = to_prototype_spec(validate_spec(s)).delta_stop;
    const auto at30 = find_gamma(g, 30 * 6);
    EXPECT_GT(at30.gamma, 0.0);
    EXPECT_LE(at30.gamma, 2.0 * d2);
}

TEST(FindGamma, SuccessPredicateIsMonotone) {
    const auto g = design_prototype_taps("design2");
    const ToeplitzOperator op(g, 30 * 14);
    const auto est = find_gamma(g, 30 * 14);
    const double lam = -est.lambda_min_estimate;
    for (double f : {1.001, 1.01, 1.1, 2.0, 10.0}) {
        EXPECT_TRUE(try_cholesky_banded(op.shifted(lam * f)).has_value()) << f;
    }
    for (double f : {0.999, 0.99, 0.9, 0.5, 0.0}) {
        EXPECT_FALSE(try_cholesky_banded(op.shifted(lam * f)).has_value()) << f;
    }
}

TEST(ExtractMinPhase, PairExample) {
    const auto f = cholesky_banded(ToeplitzOperator(kPair, 60));
    const auto w = extract_min_phase(f, 2, 60);
    ASSERT_EQ(w.c.size(), 2u);
    EXPECT_NEAR(w.c[0], 1.0, 1e-6);
    EXPECT_NEAR(w.c[1], 0.5, 1e-6);
    EXPECT_LE(w.purge_residual, kPurgeWarnTolerance);
}

TEST(ExtractMinPhase, Trivial) {
    const std::vector<double> g{1.0};
    const auto w = extract_min_phase(cholesky_banded(ToeplitzOperator(g, 30)), 1, 30);
    ASSERT_EQ(w.c.size(), 1u);
    EXPECT_NEAR(w.c[0], 1.0, 1e-15);
}

TEST(ExtractMinPhase, SignConvention) {
    const std::vector<double> g{-0.5, 1.25, -0.5};
    const auto w = spectral_factorize(g).weights;
    EXPECT_GT(w.c[0] + w.c[1], 0.0);
    EXPECT_NEAR(w.c[0], 1.0, 1e-6);
    EXPECT_NEAR(w.c[1], -0.5, 1e-6);
}

TEST(Autocorrelation, Examples) {
    const std::vector<double> c{1.0, 0.5};
    EXPECT_EQ(autocorrelation(c), kPair);
    EXPECT_EQ(autocorrelation(std::vector<double>{1.0}), std::vector<double>{1.0});
}

TEST(Autocorrelation, EqualsPolynomialProduct) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n01;
    for (std::size_t n = 1; n <= 12; ++n) {
        std::vector<double> c(n);
        for (auto& x : c) x = n01(rng);
        const auto r = autocorrelation(c);
        const auto oracle = mt::convolve_with_reverse(c);
        EXPECT_LE(max_abs_diff(r, oracle), 1e-12);
        double energy = 0.0;
        for (double x : c) energy += x * x;
        EXPECT_NEAR(r[n - 1], energy, 1e-12);
        for (std::size_t k = 0; k < r.size(); ++k) EXPECT_EQ(r[k], r[r.size() - 1 - k]);
    }
}

TEST(VerifyFactorization, DetectsResidual) {
    const std::vector<double> c{1.0, 0.5};
    EXPECT_LE(verify_factorization(c, kPair, 0.0).autocorr_residual, 1e-10);
    EXPECT_EQ(verify_factorization(std::vector<double>{1.0}, std::vector<double>{1.0}, 0.0)
                  .autocorr_residual,
              0.0);
    const std::vector<double> bumped{1.0 + 1e-3, 0.5};
    EXPECT_GE(verify_factorization(bumped, kPair, 0.0).autocorr_residual, 1e-4);
    EXPECT_THROW((void)verify_factorization(c, std::vector<double>{1.0}, 0.0),
                 std::invalid_argument);
}

TEST(RefineNewton, ExactInputIsUnchanged) {
    const std::vector<double> c{1.0, 0.5};
    const auto r = refine_newton(c, kPair, 0.0);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 0u);
    EXPECT_EQ(r.c, c);
}

TEST(RefineNewton, Design1ToMachinePrecision) {
    const auto g = design_prototype_taps("design1");
    const auto f = spectral_factorize(g);
    const auto r = refine_newton(f.weights.c, g, f.weights.gamma_used);
    EXPECT_TRUE(r.converged) << r.note;
    EXPECT_LE(verify_factorization(r.c, g, f.weights.gamma_used).autocorr_residual, 1e-13);
}

TEST(RefineNewton, ConvergesFromPerturbedStart) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
    for (std::size_t n = 2; n <= 8; ++n) {
        const auto c = mt::random_min_phase(rng, n, 0.9);
        auto start = c;
        for (auto& x : start) x += jitter(rng);
        const auto r = refine_newton(start, mt::convolve_with_reverse(c), 0.0);
        ASSERT_TRUE(r.converged) << n << ": " << r.note;
        EXPECT_LE(max_abs_diff(r.c, c), 1e-10) << n;
    }
}

TEST(RefineNewton, SingularJacobianFallsBack) {
    const std::vector<double> zero{0.0, 0.0};
    const auto r = refine_newton(zero, kPair, 0.0);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.c, zero);
    EXPECT_FALSE(r.note.empty());
}

TEST(SpectralFactorize, Trivial) {
    const auto r = spectral_factorize(std::vector<double>{1.0});
    EXPECT_EQ(r.weights.c.size(), 1u);
    EXPECT_NEAR(r.weights.c[0], 1.0, 1e-15);
    EXPECT_EQ(r.diagnostics.gamma, 0.0);
}

TEST(SpectralFactorize, Design1IsMinimumPhase) {
    const auto r = spectral_factorize(design_prototype_taps("design1"));
    ASSERT_EQ(r.weights.c.size(), 6u);
    EXPECT_EQ(r.diagnostics.q, 180u);
    EXPECT_TRUE(min_phase_check(polynomial_zeros(r.weights.c), 1e-6).minimum_phase);
}

TEST(SpectralFactorize, RejectsAsymmetricInput) {
    EXPECT_THROW((void)spectral_factorize(std::vector<double>{1.0, 2.0}), std::invalid_argument);
    EXPECT_THROW((void)spectral_factorize(std::vector<double>{0.3, 1.0, 0.2}),
                 std::invalid_argument);
}

TEST(SpectralFactorize, RoundTripModerateRadius) {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + trial % 11;
        const auto c = mt::random_min_phase(rng, n, 0.85);
        const auto r = spectral_factorize(mt::convolve_with_reverse(c));
        EXPECT_LE(max_abs_diff(r.weights.c, c), 1e-6) << "trial " << trial << " N=" << n;
        EXPECT_TRUE(min_phase_check(polynomial_zeros(r.weights.c), 1e-6).minimum_phase);
    }
}

TEST(SpectralFactorize, RoundTripWithNewton) {
    std::mt19937_64 rng(99);
    SpectralOptions opt;
    opt.newton = true;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + trial % 11;
        const auto c = mt::random_min_phase(rng, n, 0.7);
        const auto r = spectral_factorize(mt::convolve_with_reverse(c), opt);
        EXPECT_LE(max_abs_diff(r.weights.c, c), 1e-12) << "trial " << trial << " N=" << n;
    }
}

// Near the unit circle the factor is ill-conditioned in the autocorrelation,
// so only the equation residual reaches rounding level.
TEST(SpectralFactorize, NewtonResidualAtLargeRadius) {
    std::mt19937_64 rng(99);
    SpectralOptions opt;
    opt.newton = true;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + trial % 11;
        const auto c = mt::random_min_phase(rng, n, 0.95);
        const auto g = mt::convolve_with_reverse(c);
        const auto r = spectral_factorize(g, opt);
        double scale = 1.0;
        for (double x : g) scale = std::max(scale, std::abs(x));
        EXPECT_TRUE(r.diagnostics.newton_refined) << trial;
        EXPECT_LE(r.diagnostics.autocorr_residual, 1e-13 * scale) << "trial " << trial << " N=" << n;
        EXPECT_LE(max_abs_diff(r.weights.c, c), 1e-6) << "trial " << trial << " N=" << n;
    }
}

TEST(SpectralFactorize, CenterEquation) {
    for (const char* id : {"design1", "design2", "design3"}) {
        const auto g = design_prototype_taps(id);
        const auto r = spectral_factorize(g);
        double energy = 0.0;
        for (double x : r.weights.c) energy += x * x;
        const double rhs = g[(g.size() - 1) / 2] + r.weights.gamma_used;
        EXPECT_NEAR(energy, rhs, 1e-8 * rhs) << id;
    }
}

TEST(SpectralFactorize, QConvergenceOnBuiltinDesigns) {
    for (const char* id : {"design1", "design2", "design3"}) {
        const auto g = design_prototype_taps(id);
        const auto base = spectral_factorize(g);
        SpectralOptions doubled;
        doubled.q_factor = 60;
        doubled.fixed_gamma = base.weights.gamma_used;
        const auto twice = spectral_factorize(g, doubled);
        EXPECT_LE(max_abs_diff(base.weights.c, twice.weights.c), 1e-6) << id;
    }
}

TEST(SpectralFactorize, ExtractionImprovesWithQ) {
    const auto g = design_prototype_taps("design2");
    const double gamma = spectral_factorize(g).weights.gamma_used;
    double prev_purge = std::numeric_limits<double>::infinity();
    double prev_drift = std::numeric_limits<double>::infinity();
    for (std::size_t k : {5u, 10u, 30u}) {
        SpectralOptions opt;
        opt.q_factor = k;
        opt.fixed_gamma = gamma;
        const auto r = spectral_factorize(g, opt);
        EXPECT_LE(r.diagnostics.purge_residual, prev_purge) << k;
        EXPECT_LT(r.diagnostics.row_drift, prev_drift) << k;
        prev_purge = r.diagnostics.purge_residual;
        prev_drift = r.diagnostics.row_drift;
    }
}
