#pragma once

// Reference computations used by the tests. Each one avoids the code path it
// is compared against: high-precision arithmetic instead of double closed
// forms, Monte Carlo area estimates instead of tail-mass differences, brute
// force sums instead of recurrences.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using mp50 = boost::multiprecision::cpp_bin_float_50;

/// (1 + x)^(-alpha - 1) in 50-digit arithmetic.
inline double gamma_g(double alpha, double x) {
    return static_cast<double>(pow(mp50(1) + mp50(x), -(mp50(alpha) + 1)));
}

/// (1 + h)^(-alpha) / alpha in 50-digit arithmetic.
inline double gamma_G(double alpha, double h) {
    return static_cast<double>(pow(mp50(1) + mp50(h), -mp50(alpha)) / mp50(alpha));
}

/// Midpoint rule with `n` cells.
inline double midpoint(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    const double w = (b - a) / static_cast<double>(n);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) acc += f(a + (static_cast<double>(i) + 0.5) * w);
    return static_cast<double>(acc * w);
}

/// h_A(xi, s, t) by integrating the indicator of the trawl set along the
/// shifted time axis: (xi, s - u) lies in A iff s - u <= 0 and xi <= g(u - s).
inline double occupation_time(const std::function<double(double)>& g, double xi, double s, double t,
                              std::size_t n = 200000) {
    auto indicator = [&](double u) {
        const double lag = u - s;
        return (lag >= 0.0 && xi >= 0.0 && xi <= g(lag)) ? 1.0 : 0.0;
    };
    return midpoint(indicator, 0.0, t, n);
}

struct AreaEstimate {
    double value;
    double std_error;
};

/// Monte Carlo area of {(xi, s): s in [s_lo, s_hi], xi in [xi_lo, xi_hi], inside(xi, s)}.
inline AreaEstimate rejection_area(const std::function<bool(double, double)>& inside, double s_lo, double s_hi,
                                   double xi_lo, double xi_hi, std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> us(s_lo, s_hi), ux(xi_lo, xi_hi);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i)
        if (inside(ux(rng), us(rng))) ++hits;
    const double box = (s_hi - s_lo) * (xi_hi - xi_lo);
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

/// E[N^p] for N ~ Poisson(nu) by direct series summation.
inline double poisson_raw_moment(double nu, int p, int terms = 200) {
    long double acc = 0.0L, log_w = -nu;  // log of e^-nu nu^k / k!
    for (int k = 0; k < terms; ++k) {
        if (k > 0) log_w += std::log(nu) - std::log(static_cast<double>(k));
        acc += std::pow(static_cast<long double>(k), p) * std::exp(log_w);
    }
    return static_cast<double>(acc);
}

/// d^m/dz^m f(0) by fourth-order central differences, m = 1..4.
inline std::complex<double> derivative_at_zero(const std::function<std::complex<double>(double)>& f, int m,
                                               double h) {
    auto F = [&](int k) { return f(k * h); };
    switch (m) {
        case 1: return (-F(2) + 8.0 * F(1) - 8.0 * F(-1) + F(-2)) / (12.0 * h);
        case 2: return (-F(2) + 16.0 * F(1) - 30.0 * F(0) + 16.0 * F(-1) - F(-2)) / (12.0 * h * h);
        case 3: return (-F(3) + 8.0 * F(2) - 13.0 * F(1) + 13.0 * F(-1) - 8.0 * F(-2) + F(-3)) / (8.0 * h * h * h);
        case 4:
            return (-F(3) + 12.0 * F(2) - 39.0 * F(1) + 56.0 * F(0) - 39.0 * F(-1) + 12.0 * F(-2) - F(-3)) /
                   (6.0 * h * h * h * h);
        default: throw std::invalid_argument("derivative_at_zero: m must be 1..4");
    }
}

/// Var(delta * sum_{j<k} X(t_j)) expanded as the full double sum of
/// covariances kappa2 * G(|i - j| delta).
inline double riemann_variance_brute_force(const std::function<double(double)>& G, double kappa2, double delta,
                                           int k) {
    long double acc = 0.0L;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) acc += G(std::abs(i - j) * delta);
    return static_cast<double>(kappa2 * delta * delta * acc);
}

}  // namespace oracle
