#include "minphase/prototype.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace minphase {

namespace {

double half_ripple(double ripple_db) { return 1.0 - std::pow(10.0, -ripple_db / 40.0); }

bool better(const OrderTrial& a, const OrderTrial& b) {
    if (a.feasible != b.feasible) return a.feasible;
    return a.worst_margin_db > b.worst_margin_db;
}

}  // namespace

PrototypeSpec to_prototype_spec(const DesignSpec& spec) {
    PrototypeSpec p;
    double delta_s_min = std::numeric_limits<double>::infinity();
    for (const auto& b : spec.bands) {
        if (b.kind == BandKind::stop) {
            const double ds = db_to_amplitude(b.max_level_db);
            delta_s_min = std::min(delta_s_min, ds * ds / 2.0);
        }
    }
    if (!std::isfinite(delta_s_min)) {
        throw std::invalid_argument("to_prototype_spec: at least one stop band is required");
    }
    p.delta_stop = delta_s_min;

    const BandSpec& pass = spec.pass_band();
    if (pass.degenerate()) {
        p.delta_pass = delta_s_min / kDegeneratePassWeightRatio;
    } else {
        const double dp = half_ripple(pass.ripple_db);
        p.delta_pass = 1.0 - (1.0 - dp) * (1.0 - dp) - 2.0 * delta_s_min;
        if (!(p.delta_pass > 0.0)) {
            throw InfeasibleError("pass ripple of " + std::to_string(pass.ripple_db) +
                                  " dB is too tight for the sidelobe bound");
        }
    }

    for (const auto& b : spec.bands) {
        double d = p.delta_pass;
        double desired = 1.0;
        if (b.kind == BandKind::stop) {
            const double ds = db_to_amplitude(b.max_level_db);
            d = ds * ds / 2.0;
            desired = 0.0;
        }
        p.band_delta.push_back(d);
        p.bands.push_back({b.u_lo, b.u_hi, desired, 1.0 / d});
    }
    return p;
}

PrototypeSpec scaled(const PrototypeSpec& pspec, const std::vector<double>& scale) {
    if (scale.size() != pspec.bands.size()) {
        throw std::invalid_argument("scaled: one factor per band required");
    }
    PrototypeSpec out = pspec;
    out.delta_stop = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.bands.size(); ++i) {
        out.band_delta[i] = pspec.band_delta[i] * scale[i];
        out.bands[i].weight = 1.0 / out.band_delta[i];
        if (out.bands[i].desired == 1.0) {
            out.delta_pass = out.band_delta[i];
        } else {
            out.delta_stop = std::min(out.delta_stop, out.band_delta[i]);
        }
    }
    return out;
}

LinearPhasePrototype design_prototype(const PrototypeSpec& pspec, std::size_t n,
                                      const RemezOptions& options) {
    if (n == 0) throw std::invalid_argument("design_prototype: N must be at least 1");
    return remez_design(pspec.bands, n - 1, options);
}

OrderTrial design_at_order(const DesignSpec& spec, std::size_t n, const SearchLimits& limits) {
    const PrototypeSpec base = to_prototype_spec(spec);
    std::vector<double> scale(base.bands.size(), 1.0);
    OrderTrial best;
    best.n = n;

    for (std::size_t attempt = 0; attempt <= limits.max_shrinks; ++attempt) {
        OrderTrial trial;
        trial.n = n;
        trial.shrinks = attempt;
        PrototypeSpec pspec = scaled(base, scale);
        pspec.target_n = n;
        try {
            auto proto = design_prototype(pspec, n, limits.remez);
            auto fact = spectral_factorize(proto.taps, limits.spectral);
            auto report = evaluate_design(fact.weights.c, spec, limits.grid_points, limits.zero_tol);
            report.diagnostics = fact.diagnostics;
            trial.weights = fact.weights.c;
            trial.worst_margin_db = report.worst_margin_db();
            trial.feasible = report.compliant && report.zeros.minimum_phase;
            trial.prototype = std::move(proto);
            trial.report = std::move(report);
        } catch (const Error& e) {
            trial.failure = e.what();
        }

        const bool done = trial.feasible;
        if (attempt == 0 || better(trial, best)) best = trial;
        if (done || !trial.report) break;

        bool any = false;
        for (const auto& m : trial.report->bands) {
            if (!m.compliant) {
                scale[m.band_index] *= limits.shrink_factor;
                any = true;
            }
        }
        // Bands all pass and only the zero check failed; shrinking cannot help.
        if (!any) break;
    }
    return best;
}

OrderSearchResult find_min_order(const DesignSpec& spec, const SearchLimits& limits) {
    if (limits.max_n == 0) throw std::invalid_argument("find_min_order: max_n must be >= 1");
    const PrototypeSpec pspec = to_prototype_spec(spec);

    OrderSearchResult result;
    try {
        result.initial_estimate = estimate_order(pspec.bands, pspec.delta_pass, pspec.delta_stop);
    } catch (const std::invalid_argument&) {
        result.initial_estimate = 1;
    }
    result.initial_estimate = std::clamp<std::size_t>(result.initial_estimate, 1, limits.max_n);

    std::map<std::size_t, OrderTrial> cache;
    auto run = [&](std::size_t n) -> const OrderTrial& {
        auto it = cache.find(n);
        if (it == cache.end()) {
            result.visited.push_back(n);
            it = cache.emplace(n, design_at_order(spec, n, limits)).first;
        }
        return it->second;
    };

    std::size_t n = result.initial_estimate;
    if (run(n).feasible) {
        while (n > 1 && run(n - 1).feasible) --n;
    } else {
        while (n < limits.max_n && !run(n).feasible) ++n;
    }

    const OrderTrial& at = run(n);
    if (at.feasible) {
        result.satisfied = true;
        result.best = at;
        if (n > 1) result.witness = run(n - 1);
        return result;
    }

    result.best = cache.begin()->second;
    for (const auto& [k, trial] : cache) {
        if (better(trial, result.best)) result.best = trial;
    }
    return result;
}

}  // namespace minphase
