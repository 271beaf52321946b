#pragma once

// Reference computations used only by the tests. Each one takes a different
// route from the library code it checks.

#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace minphase::testing {

using Complex = std::complex<double>;

/// Real polynomial coefficients (descending powers) of Π (z - z_i).
std::vector<double> expand_real(std::span<const Complex> zeros, double lead = 1.0);

/// Random real minimum-phase vector of length n: zeros drawn with radius
/// uniform in [0, r_max], real or in conjugate pairs, c_0 > 0.
std::vector<double> random_min_phase(std::mt19937_64& rng, std::size_t n, double r_max,
                                     std::vector<Complex>* zeros_out = nullptr);

/// Full linear convolution of c with reversed c (coefficients of C(z) C(1/z)).
std::vector<double> convolve_with_reverse(std::span<const double> c);

/// Smallest eigenvalue of the dense (2Q+N)-square Toeplitz matrix of g.
double dense_lambda_min(std::span<const double> g, std::size_t expansion);

/// Weighted error E(u) = W (D - A(u)) of a cosine series on a uniform grid
/// across each band; returns (u, error) pairs.
struct ErrorSample {
    double u;
    double e;
    int band;
};
std::vector<ErrorSample> dense_error(std::span<const double> cosine_coeffs,
                                     std::span<const double> lo, std::span<const double> hi,
                                     std::span<const double> desired,
                                     std::span<const double> weight, std::size_t points);

/// Copy of `samples` with each local maximum of |e| replaced by the
/// golden-section maximum between its grid neighbours, clipped to the band.
std::vector<ErrorSample> refine_peaks(const std::vector<ErrorSample>& samples,
                                      std::span<const double> cosine_coeffs,
                                      std::span<const double> desired,
                                      std::span<const double> weight);

/// Number of sign alternations among local extrema with |e| >= level (1 - tol),
/// counting a same-sign run once.
std::size_t alternation_count(const std::vector<ErrorSample>& samples, double level, double tol);

/// |Σ c_k e^{jku}| by direct summation.
double direct_magnitude(std::span<const Complex> c, double u);

}  // namespace minphase::testing
