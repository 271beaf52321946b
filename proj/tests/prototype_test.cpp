#include <cmath>

#include <gtest/gtest.h>

#include <minphase/prototype.hpp>

using namespace minphase;

namespace {

DesignSpec design1() {
    DesignSpec s;
    s.name = "design1";
    s.bands = {BandSpec::pass(0.0, kPi * std::sin(0.2182), 0.25),
               BandSpec::stop(kPi * std::sin(kPi / 3.0), kPi, -52.0)};
    return validate_spec(s);
}

DesignSpec design2() {
    DesignSpec s;
    s.bands = {BandSpec::pass(0.0, kPi * std::sin(kPi / 6.0), 1.18), BandSpec::stop(1.92, kPi, -21.0)};
    return validate_spec(s);
}

DesignSpec design3() {
    DesignSpec s;
    s.bands = {BandSpec::pass(0.0, kPi * std::sin(12.5 * kPi / 180.0), 0.5),
               BandSpec::stop(1.2605, kPi, -30.0)};
    return validate_spec(s);
}

double stop_peak(const LinearPhasePrototype& p, double lo) {
    double m = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double u = lo + (kPi - lo) * i / 20000.0;
        m = std::max(m, std::abs(zero_phase_amplitude(p.taps, u)));
    }
    return m;
}

}  // namespace

TEST(ToPrototypeSpec, Design1Deltas) {
    const auto p = to_prototype_spec(design1());
    const double ds = std::pow(10.0, -52.0 / 20.0);
    EXPECT_NEAR(p.delta_stop, ds * ds / 2.0, 1e-18);
    EXPECT_NEAR(p.delta_stop, 3.155e-6, 5e-10);
    const double dp = 1.0 - std::pow(10.0, -0.25 / 40.0);
    EXPECT_NEAR(p.delta_pass, 1.0 - (1.0 - dp) * (1.0 - dp) - ds * ds, 1e-15);
    ASSERT_EQ(p.bands.size(), 2u);
    EXPECT_EQ(p.bands[0].desired, 1.0);
    EXPECT_EQ(p.bands[1].desired, 0.0);
    EXPECT_NEAR(p.bands[0].weight * p.delta_pass, 1.0, 1e-12);
    EXPECT_NEAR(p.bands[1].weight * p.delta_stop, 1.0, 1e-12);
}

TEST(ToPrototypeSpec, VanishingRippleIsInfeasible) {
    DesignSpec s = design1();
    s.bands[0].ripple_db = 1e-9;
    EXPECT_THROW((void)to_prototype_spec(s), InfeasibleError);
}

TEST(ToPrototypeSpec, LooserRippleRaisesPassDelta) {
    DesignSpec s = design1();
    double prev = 0.0;
    for (double r = 0.05; r < 3.0; r += 0.05) {
        s.bands[0].ripple_db = r;
        const double d = to_prototype_spec(s).delta_pass;
        EXPECT_GT(d, prev);
        prev = d;
    }
}

TEST(DesignPrototype, Design1StopBandWithinDelta) {
    const auto ps = to_prototype_spec(design1());
    const auto p = design_prototype(ps, 6);
    ASSERT_EQ(p.taps.size(), 11u);
    EXPECT_LE(stop_peak(p, ps.bands[1].u_lo), ps.delta_stop * (1.0 + 1e-6));
}

TEST(DesignPrototype, SingleFullBand) {
    PrototypeSpec ps;
    ps.bands = {{0.0, kPi, 1.0, 1.0}};
    ps.delta_pass = 0.1;
    ps.band_delta = {0.1};
    const auto p = design_prototype(ps, 1);
    ASSERT_EQ(p.taps.size(), 1u);
    EXPECT_NEAR(p.taps[0], 1.0, 1e-15);
}

TEST(DesignPrototype, Design2DeltaRatio) {
    const auto ps = to_prototype_spec(design2());
    const auto p = design_prototype(ps, 14);
    ASSERT_EQ(p.taps.size(), 27u);
    const double achieved = p.achieved_delta[0] / p.achieved_delta[1];
    EXPECT_NEAR(achieved, ps.delta_pass / ps.delta_stop, 1e-6 * ps.delta_pass / ps.delta_stop);
}

TEST(FindMinOrder, BuiltinElementCounts) {
    const auto r1 = find_min_order(design1());
    ASSERT_TRUE(r1.satisfied);
    EXPECT_EQ(r1.best.n, 6u);
    const auto r2 = find_min_order(design2());
    ASSERT_TRUE(r2.satisfied);
    EXPECT_EQ(r2.best.n, 14u);
    const auto r3 = find_min_order(design3());
    ASSERT_TRUE(r3.satisfied);
    EXPECT_EQ(r3.best.n, 14u);
}

TEST(FindMinOrder, MinimalityWitness) {
    for (const auto& spec : {design1(), design2(), design3()}) {
        const auto r = find_min_order(spec);
        ASSERT_TRUE(r.satisfied);
        ASSERT_TRUE(r.witness.has_value());
        EXPECT_EQ(r.witness->n + 1, r.best.n);
        EXPECT_FALSE(r.witness->feasible);
    }
}

TEST(FindMinOrder, MeetsOriginalSpec) {
    const auto spec = design1();
    const auto r = find_min_order(spec);
    ASSERT_TRUE(r.best.report.has_value());
    const auto fresh = evaluate_design(r.best.weights, spec);
    EXPECT_TRUE(fresh.compliant);
    EXPECT_LE(fresh.max_sidelobe_db, -52.0);
    EXPECT_LE(fresh.flat_top_ripple_db, 0.25);
    for (const auto& m : fresh.bands) EXPECT_GE(m.margin_db, 0.0);
}

TEST(FindMinOrder, Deterministic) {
    const auto a = find_min_order(design2());
    const auto b = find_min_order(design2());
    EXPECT_EQ(a.best.n, b.best.n);
    EXPECT_EQ(a.best.weights, b.best.weights);
    EXPECT_EQ(a.visited, b.visited);
}

TEST(FindMinOrder, LimitTooSmallReportsBestAttempt) {
    SearchLimits limits;
    limits.max_n = 3;
    const auto r = find_min_order(design1(), limits);
    EXPECT_FALSE(r.satisfied);
    EXPECT_LE(r.best.n, 3u);
    ASSERT_TRUE(r.best.report.has_value());
    EXPECT_LT(r.best.worst_margin_db, 0.0);
}

TEST(FindMinOrder, InfeasibleSpecThrows) {
    DesignSpec s = design1();
    s.bands[0].ripple_db = 1e-9;
    EXPECT_THROW((void)find_min_order(s), InfeasibleError);
}

TEST(Scaled, ChangesOnlyTheGivenBands) {
    const auto ps = to_prototype_spec(design1());
    const auto s = scaled(ps, {1.0, 0.9});
    EXPECT_EQ(s.bands[0].weight, ps.bands[0].weight);
    EXPECT_NEAR(s.bands[1].weight, ps.bands[1].weight / 0.9, 1e-6);
    EXPECT_NEAR(s.delta_stop, ps.delta_stop * 0.9, 1e-18);
    EXPECT_EQ(s.delta_pass, ps.delta_pass);
    EXPECT_THROW((void)scaled(ps, {1.0}), std::invalid_argument);
}

TEST(DesignAtOrder, InfeasibleOrderKeepsBestAttempt) {
    const auto t = design_at_order(design3(), 13);
    EXPECT_FALSE(t.feasible);
    EXPECT_LE(t.shrinks, SearchLimits{}.max_shrinks);
    ASSERT_TRUE(t.report.has_value());
    EXPECT_EQ(t.report->element_count, 13u);
}
