#include "minphase/equiripple.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

#include "minphase/error.hpp"
#include "minphase/spec.hpp"

namespace minphase {

namespace {

struct DenseGrid {
    std::vector<double> u;
    std::vector<int> band;
    /// [first, last] grid index per band
    std::vector<std::pair<std::size_t, std::size_t>> span;
};

struct Extremum {
    double u;
    double error;  // signed weighted error W (D - A)
    int band;
};

void check_bands(std::span<const PrototypeBand> bands) {
    if (bands.empty()) throw std::invalid_argument("remez_design: no bands");
    double prev_hi = -1.0;
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const auto& b = bands[i];
        std::ostringstream os;
        os << "remez_design: band " << i << ' ';
        if (!(b.u_lo >= 0.0 && b.u_hi <= kPi + 1e-12 && b.u_lo <= b.u_hi)) {
            os << "edges must satisfy 0 <= u_lo <= u_hi <= pi";
            throw std::invalid_argument(os.str());
        }
        if (!(b.weight > 0.0) || !std::isfinite(b.weight) || !std::isfinite(b.desired)) {
            os << "needs a finite positive weight and finite desired level";
            throw std::invalid_argument(os.str());
        }
        if (i > 0 && !(b.u_lo > prev_hi)) {
            os << "overlaps or is not above the previous band";
            throw std::invalid_argument(os.str());
        }
        prev_hi = b.u_hi;
    }
}

DenseGrid make_grid(std::span<const PrototypeBand> bands, std::size_t half_order,
                    std::size_t density) {
    const double step =
        kPi / static_cast<double>(density * (half_order + 1));
    DenseGrid grid;
    for (std::size_t b = 0; b < bands.size(); ++b) {
        const double lo = bands[b].u_lo;
        const double hi = std::min(bands[b].u_hi, kPi);
        const std::size_t first = grid.u.size();
        if (hi == lo) {
            grid.u.push_back(lo);
        } else {
            const auto intervals = std::max<std::size_t>(
                3, static_cast<std::size_t>(std::ceil((hi - lo) / step)));
            for (std::size_t i = 0; i <= intervals; ++i) {
                grid.u.push_back(i == intervals
                                     ? hi
                                     : lo + (hi - lo) * static_cast<double>(i) /
                                                static_cast<double>(intervals));
            }
        }
        grid.band.resize(grid.u.size(), static_cast<int>(b));
        grid.span.emplace_back(first, grid.u.size() - 1);
    }
    return grid;
}

/// Weighted Chebyshev solution on a reference set of L+2 points: the level δ
/// and the degree-L interpolant of D_k - (-1)^k δ / W_k in x = cos u
/// (barycentric form).
class ReferenceSolution {
public:
    ReferenceSolution(std::span<const PrototypeBand> bands, std::span<const double> ref_u,
                      std::span<const int> ref_band)
        : bands_(bands) {
        const std::size_t n = ref_u.size();  // L + 2
        std::vector<double> x(n), d(n), w(n), b(n);
        for (std::size_t k = 0; k < n; ++k) {
            x[k] = std::cos(ref_u[k]);
            d[k] = bands[ref_band[k]].desired;
            w[k] = bands[ref_band[k]].weight;
        }
        for (std::size_t k = 0; k < n; ++k) {
            double prod = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != k) prod *= 2.0 * (x[k] - x[j]);
            }
            b[k] = 1.0 / prod;
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            num += b[k] * d[k];
            den += b[k] * sign / w[k];
        }
        delta_ = num / den;

        const std::size_t m = n - 1;  // L + 1 interpolation nodes
        nodes_.resize(m);
        values_.resize(m);
        weights_.resize(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            nodes_[k] = x[k];
            values_[k] = d[k] - sign * delta_ / w[k];
            weights_[k] = b[k] * 2.0 * (x[k] - x[n - 1]);
        }
    }

    [[nodiscard]] double delta() const noexcept { return delta_; }

    [[nodiscard]] double amplitude_x(double x) const noexcept {
        if (nodes_.size() == 1) return values_[0];
        double num = 0.0;
        double den = 0.0;
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            const double diff = x - nodes_[k];
            if (diff == 0.0) return values_[k];
            const double t = weights_[k] / diff;
            num += t * values_[k];
            den += t;
        }
        return num / den;
    }

    [[nodiscard]] double amplitude(double u) const noexcept { return amplitude_x(std::cos(u)); }

    [[nodiscard]] double error(double u, int band) const noexcept {
        const auto& b = bands_[band];
        return b.weight * (b.desired - amplitude(u));
    }

private:
    std::span<const PrototypeBand> bands_;
    double delta_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<double> weights_;
};

/// Continuous local extremum of sign * E(u) on [a, b].
Extremum refine(const ReferenceSolution& sol, double a, double b, int band, double sign,
                const Extremum& seed) {
    if (b <= a) return seed;
    constexpr int bits = std::numeric_limits<double>::digits / 2;
    std::uintmax_t max_iter = 100;
    auto f = [&](double u) { return -sign * sol.error(u, band); };
    const auto [u_best, f_best] = boost::math::tools::brent_find_minima(f, a, b, bits, max_iter);
    if (-f_best > sign * seed.error) return {u_best, sol.error(u_best, band), band};
    return seed;
}

std::vector<Extremum> locate_extrema(const ReferenceSolution& sol, const DenseGrid& grid,
                                     bool continuous) {
    std::vector<double> e(grid.u.size());
    for (std::size_t i = 0; i < grid.u.size(); ++i) e[i] = sol.error(grid.u[i], grid.band[i]);

    std::vector<Extremum> out;
    for (std::size_t b = 0; b < grid.span.size(); ++b) {
        const auto [first, last] = grid.span[b];
        for (std::size_t i = first; i <= last; ++i) {
            if (e[i] == 0.0) continue;
            const double s = e[i] > 0.0 ? 1.0 : -1.0;
            const bool left_ok = (i == first) || s * e[i] >= s * e[i - 1];
            const bool right_ok = (i == last) || s * e[i] > s * e[i + 1];
            if (!(left_ok && right_ok)) continue;
            Extremum ex{grid.u[i], e[i], static_cast<int>(b)};
            if (continuous && first != last) {
                const double a = grid.u[i == first ? i : i - 1];
                const double c = grid.u[i == last ? i : i + 1];
                ex = refine(sol, a, c, static_cast<int>(b), s, ex);
            }
            out.push_back(ex);
        }
    }
    return out;
}

/// New alternating reference of exactly `count` points, or empty when the
/// candidates cannot supply one.
std::vector<Extremum> select_reference(std::vector<Extremum> cand, double level,
                                       std::size_t count) {
    std::sort(cand.begin(), cand.end(),
              [](const Extremum& a, const Extremum& b) { return a.u < b.u; });
    // Old reference points sit at |E| = level up to rounding, which grows
    // with the band weight ratio.
    const double floor = level * (1.0 - 1e-6);
    std::vector<Extremum> alt;
    for (const auto& c : cand) {
        if (std::abs(c.error) < floor) continue;
        if (!alt.empty() && (alt.back().error > 0.0) == (c.error > 0.0)) {
            if (std::abs(c.error) > std::abs(alt.back().error)) alt.back() = c;
            continue;
        }
        alt.push_back(c);
    }
    auto mag = [&](std::size_t i) { return std::abs(alt[i].error); };
    while (alt.size() > count) {
        if (alt.size() == count + 1) {
            if (mag(0) < mag(alt.size() - 1)) {
                alt.erase(alt.begin());
            } else {
                alt.pop_back();
            }
            continue;
        }
        std::size_t weakest = 0;
        for (std::size_t i = 1; i < alt.size(); ++i) {
            if (mag(i) < mag(weakest)) weakest = i;
        }
        if (weakest == 0 || weakest == alt.size() - 1) {
            alt.erase(alt.begin() + static_cast<std::ptrdiff_t>(weakest));
            continue;
        }
        // Dropping an interior point leaves two same-sign neighbours; keep
        // the larger of them.
        const std::size_t drop = mag(weakest - 1) < mag(weakest + 1) ? weakest - 1 : weakest + 1;
        alt.erase(alt.begin() + static_cast<std::ptrdiff_t>(std::max(weakest, drop)));
        alt.erase(alt.begin() + static_cast<std::ptrdiff_t>(std::min(weakest, drop)));
    }
    if (alt.size() < count) alt.clear();
    return alt;
}

std::vector<double> taps_from(const ReferenceSolution& sol, std::size_t half_order) {
    const std::size_t len = 2 * half_order + 1;
    const double n = static_cast<double>(len);
    std::vector<double> samples(half_order + 1);
    for (std::size_t i = 0; i <= half_order; ++i) {
        samples[i] = sol.amplitude(2.0 * kPi * static_cast<double>(i) / n);
    }
    std::vector<double> taps(len);
    for (std::size_t m = 0; m <= half_order; ++m) {
        double acc = samples[0];
        for (std::size_t i = 1; i <= half_order; ++i) {
            acc += 2.0 * samples[i] *
                   std::cos(2.0 * kPi * static_cast<double>(i * m % len) / n);
        }
        taps[half_order + m] = acc / n;
        taps[half_order - m] = acc / n;
    }
    return taps;
}

}  // namespace

std::vector<double> LinearPhasePrototype::cosine_coefficients() const {
    std::vector<double> a(half_order + 1);
    if (taps.empty()) return a;
    a[0] = taps[half_order];
    for (std::size_t m = 1; m <= half_order; ++m) a[m] = 2.0 * taps[half_order + m];
    return a;
}

LinearPhasePrototype remez_design(std::span<const PrototypeBand> bands, std::size_t half_order,
                                  const RemezOptions& options) {
    check_bands(bands);
    const std::size_t ref_count = half_order + 2;
    const DenseGrid grid = make_grid(bands, half_order, std::max<std::size_t>(options.grid_density, 2));
    if (grid.u.size() < ref_count) {
        throw std::invalid_argument("remez_design: degenerate band set, need at least " +
                                    std::to_string(ref_count) + " grid points");
    }

    std::vector<double> ref_u(ref_count);
    std::vector<int> ref_band(ref_count);
    for (std::size_t i = 0; i < ref_count; ++i) {
        const std::size_t idx = i * (grid.u.size() - 1) / (ref_count - 1);
        ref_u[i] = grid.u[idx];
        ref_band[i] = grid.band[idx];
    }

    double scale = 0.0;
    for (const auto& b : bands) scale = std::max(scale, std::abs(b.desired) * b.weight);
    const double exact_floor = 1e-14 * std::max(scale, 1.0);

    double last_delta = 0.0;
    for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
        const ReferenceSolution sol(bands, ref_u, ref_band);
        const double level = std::abs(sol.delta());
        last_delta = level;

        auto cand = locate_extrema(sol, grid, true);
        for (std::size_t k = 0; k < ref_count; ++k) {
            cand.push_back({ref_u[k], sol.error(ref_u[k], ref_band[k]), ref_band[k]});
        }
        double peak = 0.0;
        for (const auto& c : cand) peak = std::max(peak, std::abs(c.error));

        const bool converged =
            peak <= exact_floor || (level > 0.0 && (peak - level) <= options.tolerance * level);

        std::vector<Extremum> next;
        if (!converged) next = select_reference(cand, level, ref_count);
        // Refined extrema are located to about sqrt(eps) in u.
        bool same = !next.empty();
        for (std::size_t k = 0; same && k < ref_count; ++k) {
            same = std::abs(next[k].u - ref_u[k]) <= 1e-7;
        }

        if (converged || next.empty() || same) {
            if (!converged && (next.empty() || (peak - level) > 1e-6 * level)) {
                throw ConvergenceError("remez_design: exchange stalled before equioscillation",
                                       level, ref_u);
            }
            LinearPhasePrototype out;
            out.half_order = half_order;
            out.bands.assign(bands.begin(), bands.end());
            out.taps = taps_from(sol, half_order);
            out.weighted_delta = level;
            out.extremal_u = ref_u;
            out.iterations = iter;
            out.achieved_delta.assign(bands.size(), 0.0);
            for (const auto& c : cand) {
                auto& slot = out.achieved_delta[static_cast<std::size_t>(c.band)];
                slot = std::max(slot, std::abs(c.error) / bands[c.band].weight);
            }
            return out;
        }
        for (std::size_t k = 0; k < ref_count; ++k) {
            ref_u[k] = next[k].u;
            ref_band[k] = next[k].band;
        }
    }
    throw ConvergenceError("remez_design: no convergence after " +
                               std::to_string(options.max_iterations) + " iterations",
                           last_delta, ref_u);
}

double zero_phase_amplitude(std::span<const double> taps, double u) {
    if (taps.empty() || taps.size() % 2 == 0) {
        throw std::invalid_argument("zero_phase_amplitude: taps must have odd length");
    }
    const std::size_t l = taps.size() / 2;
    double acc = taps[l];
    for (std::size_t m = 1; m <= l; ++m) {
        acc += 2.0 * taps[l + m] * std::cos(static_cast<double>(m) * u);
    }
    return acc;
}

std::vector<double> amplitude_response(const LinearPhasePrototype& prototype,
                                       std::span<const double> u_grid) {
    std::vector<double> out;
    out.reserve(u_grid.size());
    for (double u : u_grid) out.push_back(zero_phase_amplitude(prototype.taps, u));
    return out;
}

std::size_t estimate_order(std::span<const PrototypeBand> bands, double delta_pass,
                           double delta_stop) {
    if (!(delta_pass > 0.0 && delta_stop > 0.0)) {
        throw std::invalid_argument("estimate_order: deltas must be positive");
    }
    double transition = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < bands.size(); ++i) {
        if (bands[i].desired != bands[i - 1].desired) {
            transition = std::min(transition, bands[i].u_lo - bands[i - 1].u_hi);
        }
    }
    if (!std::isfinite(transition)) {
        throw std::invalid_argument("estimate_order: needs a pass band next to a stop band");
    }
    if (!(transition > 0.0)) {
        throw InfeasibleError("estimate_order: zero-width transition band");
    }
    // Kaiser's estimate of the tap count for a lowpass prototype.
    const double atten = -20.0 * std::log10(std::sqrt(delta_pass * delta_stop));
    const double taps = (atten - 13.0) / (14.6 * transition / (2.0 * kPi)) + 1.0;
    const double n = std::ceil((std::max(taps, 1.0) + 1.0) / 2.0);
    return static_cast<std::size_t>(std::max(n, 1.0));
}

}  // namespace minphase
