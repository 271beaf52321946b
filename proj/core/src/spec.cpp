#include "minphase/spec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace minphase {

namespace {

constexpr double kEdgeSnap = 1e-12;

std::string join_issues(const std::vector<SpecIssue>& issues) {
    std::ostringstream os;
    os << "invalid design spec:";
    for (const auto& issue : issues) {
        if (issue.band_index >= 0) {
            os << " [band " << issue.band_index << "] ";
        } else {
            os << " [spec] ";
        }
        os << issue.reason << ';';
    }
    return os.str();
}

double snap_edge(double u) {
    if (std::abs(u - kPi) <= kEdgeSnap) return kPi;
    if (std::abs(u) <= kEdgeSnap) return 0.0;
    return u;
}

}  // namespace

SpecError::SpecError(std::vector<SpecIssue> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

const BandSpec& DesignSpec::pass_band() const {
    auto it = std::find_if(bands.begin(), bands.end(),
                           [](const BandSpec& b) { return b.kind == BandKind::pass; });
    if (it == bands.end()) throw SpecError({{-1, "no pass band"}});
    return *it;
}

double theta_to_u(double theta, double spacing_wavelengths) {
    return 2.0 * kPi * spacing_wavelengths * std::sin(theta);
}

double u_to_theta(double u, double spacing_wavelengths) {
    if (!(spacing_wavelengths > 0.0)) throw DomainError("spacing must be positive");
    const double s = u / (2.0 * kPi * spacing_wavelengths);
    if (!(std::abs(s) <= 1.0 + 1e-15)) {
        std::ostringstream os;
        os << "u = " << u << " lies outside the visible region |u| <= "
           << 2.0 * kPi * spacing_wavelengths;
        throw DomainError(os.str());
    }
    return std::asin(std::clamp(s, -1.0, 1.0));
}

double db_to_amplitude(double level_db) noexcept { return std::pow(10.0, level_db / 20.0); }

double amplitude_to_db(double amplitude) noexcept {
    if (amplitude == 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(std::abs(amplitude));
}

double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

const char* to_string(BandKind kind) noexcept { return kind == BandKind::pass ? "pass" : "stop"; }

std::vector<SpecIssue> check_spec(const DesignSpec& spec) {
    std::vector<SpecIssue> issues;
    if (!(std::isfinite(spec.spacing_wavelengths) && spec.spacing_wavelengths > 0.0)) {
        issues.push_back({-1, "spacing_wavelengths must be finite and > 0"});
    }
    if (!(std::abs(spec.steering_angle_rad) < kPi / 2.0)) {
        issues.push_back({-1, "steering_angle_rad must lie in (-pi/2, pi/2)"});
    }
    if (spec.bands.empty()) {
        issues.push_back({-1, "band list is empty"});
        return issues;
    }

    int pass_count = 0;
    for (std::size_t i = 0; i < spec.bands.size(); ++i) {
        const auto& b = spec.bands[i];
        const int idx = static_cast<int>(i);
        if (!std::isfinite(b.u_lo) || !std::isfinite(b.u_hi)) {
            issues.push_back({idx, "band edges must be finite"});
            continue;
        }
        const double lo = snap_edge(b.u_lo);
        const double hi = snap_edge(b.u_hi);
        if (lo < 0.0 || hi > kPi) issues.push_back({idx, "band edges must lie in [0, pi]"});
        if (lo > hi) issues.push_back({idx, "u_lo exceeds u_hi"});
        if (b.kind == BandKind::pass) {
            ++pass_count;
            if (!std::isfinite(b.ripple_db) || b.ripple_db < 0.0 ||
                (b.ripple_db == 0.0 && lo != hi)) {
                issues.push_back({idx, "pass band ripple_db must be > 0"});
            }
        } else {
            if (!std::isfinite(b.max_level_db) || !(b.max_level_db < 0.0)) {
                issues.push_back({idx, "stop band max_level_db must be < 0"});
            }
        }
    }
    if (pass_count != 1) {
        issues.push_back({-1, "exactly one pass band is required (found " +
                                  std::to_string(pass_count) + ")"});
    }

    std::vector<std::size_t> order(spec.bands.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return spec.bands[a].u_lo < spec.bands[b].u_lo;
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto& prev = spec.bands[order[k - 1]];
        const auto& next = spec.bands[order[k]];
        if (prev.u_hi > next.u_lo) {
            issues.push_back({static_cast<int>(order[k]),
                              "overlaps band " + std::to_string(order[k - 1])});
        }
    }
    return issues;
}

DesignSpec validate_spec(DesignSpec spec) {
    auto issues = check_spec(spec);
    if (!issues.empty()) throw SpecError(std::move(issues));
    for (auto& b : spec.bands) {
        b.u_lo = snap_edge(b.u_lo);
        b.u_hi = snap_edge(b.u_hi);
    }
    std::stable_sort(spec.bands.begin(), spec.bands.end(),
                     [](const BandSpec& a, const BandSpec& b) { return a.u_lo < b.u_lo; });
    return spec;
}

}  // namespace minphase
