#include "minphase/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace minphase {

namespace {

constexpr double kEdgeSlack = 1e-12;

// Polynomial with its exact leading and trailing zero coefficients removed.
struct Trimmed {
    std::vector<Complex> coeffs;
    std::size_t leading = 0;
    std::size_t trailing = 0;
};

Trimmed trim(std::span<const Complex> c) {
    Trimmed t;
    std::size_t lo = 0;
    std::size_t hi = c.size();
    while (lo < hi && c[lo] == Complex{}) ++lo;
    while (hi > lo && c[hi - 1] == Complex{}) --hi;
    t.leading = lo;
    t.trailing = c.size() - hi;
    t.coeffs.assign(c.begin() + static_cast<std::ptrdiff_t>(lo),
                    c.begin() + static_cast<std::ptrdiff_t>(hi));
    return t;
}

// Horner evaluation of p(z) = Σ a_k z^{n-k} and p'(z).
std::pair<Complex, Complex> horner(const std::vector<Complex>& a, Complex z) {
    Complex p = 0.0;
    Complex dp = 0.0;
    for (const Complex& ak : a) {
        dp = dp * z + p;
        p = p * z + ak;
    }
    return {p, dp};
}

double horner_scale(const std::vector<Complex>& a, Complex z) {
    const double r = std::abs(z);
    double s = 0.0;
    for (const Complex& ak : a) s = s * r + std::abs(ak);
    return s;
}

Complex polish(const std::vector<Complex>& a, Complex z) {
    for (int step = 0; step < 2; ++step) {
        const auto [p, dp] = horner(a, z);
        if (std::abs(dp) == 0.0) break;
        const Complex next = z - p / dp;
        if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
        if (std::abs(horner(a, next).first) >= std::abs(p)) break;
        z = next;
    }
    return z;
}

ZeroSet finish(std::vector<Complex> zeros, const std::vector<Complex>& a) {
    ZeroSet set;
    for (const Complex& z : zeros) {
        set.max_radius = std::max(set.max_radius, std::abs(z));
        const double scale = horner_scale(a, z);
        if (scale > 0.0) {
            set.max_residual = std::max(set.max_residual, std::abs(horner(a, z).first) / scale);
        }
    }
    std::sort(zeros.begin(), zeros.end(), [](const Complex& x, const Complex& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    set.zeros = std::move(zeros);
    return set;
}

}  // namespace

double DesignReport::worst_margin_db() const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& b : bands) worst = std::min(worst, b.margin_db);
    return worst;
}

std::vector<double> analysis_grid(std::size_t points, const DesignSpec* spec) {
    if (points < 2) throw std::invalid_argument("analysis grid needs at least 2 points");
    std::vector<double> u(points);
    for (std::size_t i = 0; i < points; ++i) {
        u[i] = kPi * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    u.back() = kPi;
    if (spec != nullptr) {
        for (const auto& b : spec->bands) {
            u.push_back(b.u_lo);
            u.push_back(b.u_hi);
        }
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
    }
    return u;
}

std::vector<double> symmetric_grid(std::size_t points) {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
    std::vector<double> u(points);
    for (std::size_t i = 0; i < points; ++i) {
        u[i] = -kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    u.back() = kPi;
    return u;
}

std::vector<Complex> to_complex(std::span<const double> c) {
    return {c.begin(), c.end()};
}

PatternSamples array_factor(std::span<const Complex> c, std::span<const double> u_grid) {
    if (c.empty()) throw std::invalid_argument("array_factor: empty weight vector");
    PatternSamples out;
    out.u.assign(u_grid.begin(), u_grid.end());
    out.complex_value.resize(u_grid.size());
    std::vector<double> mag(u_grid.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
        // Horner in e^{ju} from the highest index down.
        const Complex w = std::polar(1.0, u_grid[i]);
        Complex acc = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) acc = acc * w + c[k];
        out.complex_value[i] = acc;
        mag[i] = std::abs(acc);
        peak = std::max(peak, mag[i]);
    }
    out.magnitude_db.resize(mag.size());
    for (std::size_t i = 0; i < mag.size(); ++i) {
        out.magnitude_db[i] = peak > 0.0 ? amplitude_to_db(mag[i] / peak)
                                         : -std::numeric_limits<double>::infinity();
    }
    return out;
}

PatternSamples array_factor(std::span<const double> c, std::span<const double> u_grid) {
    const auto cc = to_complex(c);
    return array_factor(std::span<const Complex>(cc), u_grid);
}

std::vector<BandMetric> pattern_metrics(const PatternSamples& samples, const DesignSpec& spec) {
    if (samples.u.empty()) throw std::invalid_argument("pattern_metrics: no samples");
    const auto [min_it, max_it] = std::minmax_element(samples.u.begin(), samples.u.end());
    std::vector<BandMetric> metrics;
    for (std::size_t bi = 0; bi < spec.bands.size(); ++bi) {
        const BandSpec& b = spec.bands[bi];
        if (b.u_lo < *min_it - kEdgeSlack || b.u_hi > *max_it + kEdgeSlack) {
            throw std::invalid_argument("pattern_metrics: band " + std::to_string(bi) +
                                        " lies outside the sampled range");
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        std::size_t hits = 0;
        for (std::size_t i = 0; i < samples.u.size(); ++i) {
            const double u = samples.u[i];
            if (u < b.u_lo - kEdgeSlack || u > b.u_hi + kEdgeSlack) continue;
            lo = std::min(lo, samples.magnitude_db[i]);
            hi = std::max(hi, samples.magnitude_db[i]);
            ++hits;
        }
        if (hits == 0) {
            throw std::invalid_argument("pattern_metrics: no samples inside band " +
                                        std::to_string(bi));
        }
        BandMetric m;
        m.band_index = bi;
        m.kind = b.kind;
        m.u_lo = b.u_lo;
        m.u_hi = b.u_hi;
        if (b.kind == BandKind::stop) {
            m.achieved_db = hi;
            m.bound_db = b.max_level_db;
        } else {
            m.achieved_db = hi - lo;
            m.bound_db = b.ripple_db;
        }
        m.margin_db = m.bound_db - m.achieved_db;
        m.compliant = m.margin_db >= 0.0;
        metrics.push_back(m);
    }
    return metrics;
}

DesignReport evaluate_design(std::span<const double> c, const DesignSpec& spec,
                             std::size_t grid_points, double zero_tol) {
    DesignReport report;
    report.name = spec.name;
    report.element_count = c.size();
    const auto grid = analysis_grid(grid_points, &spec);
    const auto samples = array_factor(c, grid);
    report.bands = pattern_metrics(samples, spec);
    report.max_sidelobe_db = -std::numeric_limits<double>::infinity();
    report.compliant = true;
    for (const auto& m : report.bands) {
        if (m.kind == BandKind::pass) {
            report.flat_top_ripple_db = m.achieved_db;
        } else {
            report.max_sidelobe_db = std::max(report.max_sidelobe_db, m.achieved_db);
        }
        report.compliant = report.compliant && m.compliant;
    }
    const ZeroSet zs = polynomial_zeros(c);
    report.zeros.count = zs.zeros.size();
    report.zeros.max_radius = zs.max_radius;
    report.zeros.min_radius = zs.zeros.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    for (const auto& z : zs.zeros) report.zeros.min_radius = std::min(report.zeros.min_radius, std::abs(z));
    report.zeros.minimum_phase = min_phase_check(zs, zero_tol).minimum_phase;
    return report;
}

ZeroSet polynomial_zeros(std::span<const Complex> c) {
    const Trimmed t = trim(c);
    const std::size_t n = t.coeffs.empty() ? 0 : t.coeffs.size() - 1;
    if (n == 0) return {};
    std::vector<Complex> zeros;
    if (n == 1) {
        zeros.push_back(-t.coeffs[1] / t.coeffs[0]);
    } else {
        Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n),
                                                            static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) {
            companion(0, static_cast<Eigen::Index>(j)) = -t.coeffs[j + 1] / t.coeffs[0];
        }
        for (std::size_t i = 1; i < n; ++i) {
            companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
        }
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
        const auto& ev = solver.eigenvalues();
        zeros.assign(ev.data(), ev.data() + ev.size());
    }
    for (auto& z : zeros) z = polish(t.coeffs, z);
    return finish(std::move(zeros), t.coeffs);
}

ZeroSet polynomial_zeros(std::span<const double> c) {
    const auto cc = to_complex(c);
    return polynomial_zeros(std::span<const Complex>(cc));
}

MinPhaseVerdict min_phase_check(const ZeroSet& zeros, double tol) {
    MinPhaseVerdict v;
    for (const auto& z : zeros.zeros) {
        if (std::abs(z) > 1.0 + tol) v.offenders.push_back(z);
    }
    v.minimum_phase = v.offenders.empty();
    return v;
}

std::vector<double> partial_energy_profile(std::span<const Complex> c) {
    std::vector<double> out(c.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        acc += std::norm(c[k]);
        out[k] = acc;
    }
    return out;
}

std::vector<double> partial_energy_profile(std::span<const double> c) {
    const auto cc = to_complex(c);
    return partial_energy_profile(std::span<const Complex>(cc));
}

std::vector<Complex> weights_from_zeros(std::span<const Complex> zeros, Complex lead) {
    std::vector<Complex> p{lead};
    for (const Complex& r : zeros) {
        p.push_back(0.0);
        for (std::size_t k = p.size() - 1; k > 0; --k) p[k] -= r * p[k - 1];
    }
    return p;
}

std::vector<std::vector<Complex>> allpass_variants(std::span<const double> c, double unit_tol) {
    if (c.size() > 12) throw std::invalid_argument("allpass_variants: N must be <= 12");
    const auto cc = to_complex(c);
    std::vector<std::vector<Complex>> out{cc};
    const Trimmed t = trim(cc);
    if (t.coeffs.size() < 2) return out;

    const ZeroSet zs = polynomial_zeros(std::span<const Complex>(cc));
    std::vector<std::size_t> interior;
    for (std::size_t i = 0; i < zs.zeros.size(); ++i) {
        if (std::abs(zs.zeros[i]) < 1.0 - unit_tol && std::abs(zs.zeros[i]) > 0.0) {
            interior.push_back(i);
        }
    }
    const double energy = partial_energy_profile(std::span<const double>(c)).back();
    const std::size_t subsets = std::size_t{1} << interior.size();
    for (std::size_t mask = 1; mask < subsets; ++mask) {
        std::vector<Complex> moved = zs.zeros;
        for (std::size_t b = 0; b < interior.size(); ++b) {
            if ((mask >> b) & 1U) moved[interior[b]] = 1.0 / std::conj(moved[interior[b]]);
        }
        auto core = weights_from_zeros(moved, t.coeffs.front());
        std::vector<Complex> v(t.leading, Complex{});
        v.insert(v.end(), core.begin(), core.end());
        v.resize(v.size() + t.trailing, Complex{});
        const double e = partial_energy_profile(std::span<const Complex>(v)).back();
        const double s = std::sqrt(energy / e);
        for (auto& x : v) x *= s;
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Complex> apply_steering(std::span<const Complex> c, double u0) {
    std::vector<Complex> out(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        out[k] = c[k] * std::polar(1.0, -static_cast<double>(k) * u0);
    }
    return out;
}

std::vector<Complex> apply_steering(std::span<const double> c, double u0) {
    const auto cc = to_complex(c);
    return apply_steering(std::span<const Complex>(cc), u0);
}

}  // namespace minphase
