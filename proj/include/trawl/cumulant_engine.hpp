#pragma once

// Cumulants of the integrated process X*(t) = int_0^t X(u) du.
//
// kappa_{X*}^{(m)}(t) = kappa_L^{(m)} * int int h_A(xi, s, t)^m dxi ds with
// h_A(xi, s, t) = int_0^t 1_A(xi, s - u) du, the time the point (xi, s)
// spends inside the moving trawl during [0, t]. Splitting the (xi, s) plane
// along the branches of h_A gives four integrals, all expressible through the
// moment integrals J_p(t) = int_0^t u^p g(u) du:
//
//   I1 = t^m G(t),  I2 = I3 = J_m(t),  I4 = t m J_{m-1}(t) - (m + 1) J_m(t).

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "trawl/errors.hpp"
#include "trawl/levy_seed.hpp"
#include "trawl/quadrature.hpp"
#include "trawl/trawl_geometry.hpp"

namespace trawl {

struct KernelPoint {
    double xi;
    double s;
    double t;
    double value;
};

/// h_A(xi, s, t), the occupation time of (xi, s) in A_u for u in [0, t].
inline double kernel_h(const TrawlGeometry& geom, double xi, double s, double t) {
    if (!(t >= 0.0)) throw DomainError("kernel_h: t must be nonnegative");
    if (xi < 0.0 || xi > geom.height() || s > t) return 0.0;
    const double g_exit = geom.g_unchecked(t - s);  // level below which the point outlives t
    if (s <= 0.0) {
        if (xi <= g_exit) return t;
        if (xi <= geom.g_unchecked(-s)) return geom.inverse(xi) + s;
        return 0.0;
    }
    if (xi <= g_exit) return t - s;
    return xi > 0.0 ? geom.inverse(xi) : 0.0;
}

inline KernelPoint kernel_point(const TrawlGeometry& geom, double xi, double s, double t) {
    return {xi, s, t, kernel_h(geom, xi, s, t)};
}

namespace detail {

inline double moment_integral_quadrature(const TrawlGeometry& geom, int p, double t) {
    const quad::Tolerance tol{0.0, 1e-12, 25};
    const double head = std::min(t, 1.0);
    double total = quad::integrate([&](double u) { return std::pow(u, p) * geom.g_unchecked(u); }, 0.0, head, tol).value;
    if (t > 1.0) {
        // u = e^y keeps the integrand smooth across decades
        auto f = [&](double y) {
            const double u = std::exp(y);
            return std::pow(u, p + 1) * geom.g_unchecked(u);
        };
        total += quad::integrate(f, 0.0, std::log(t), tol).value;
    }
    return total;
}

// int_0^t u^p (1 + u)^(-alpha - 1) du for t >= 1, by the integration-by-parts
// recurrence (p - alpha) J_p = t^p (1 + t)^(-alpha) - p J_{p-1}.
inline std::optional<double> gamma_moment_recurrence(double alpha, int p, double t) {
    const double log1pt = std::log1p(t);
    const double tail = std::exp(-alpha * log1pt);  // (1 + t)^(-alpha)
    double j = -std::expm1(-alpha * log1pt) / alpha;  // J_0
    for (int q = 1; q <= p; ++q) {
        const double gap = q - alpha;
        if (gap == 0.0) {
            // Integer alpha = q: expand (v - 1)^q v^(-q-1) over v in [1, 1 + t].
            double sum = 0.0;
            for (int k = 0; k <= q; ++k) {
                const double c = boost::math::binomial_coefficient<double>(q, k) * ((q - k) % 2 ? -1.0 : 1.0);
                sum += (k == q) ? c * log1pt : c * std::expm1((k - q) * log1pt) / (k - q);
            }
            j = sum;
            continue;
        }
        if (std::abs(gap) < 1e-6) return std::nullopt;
        j = (std::pow(t, q) * tail - q * j) / gap;
    }
    return j;
}

}  // namespace detail

/// J_p(t) = int_0^t u^p g(u) du.
inline double moment_integral(const TrawlGeometry& geom, int p, double t) {
    if (p < 0) throw DomainError("moment_integral: p must be nonnegative");
    if (!(t >= 0.0)) throw DomainError("moment_integral: t must be nonnegative");
    if (t == 0.0) return 0.0;
    if (const auto* e = std::get_if<ExponentialTrawl>(&geom.spec())) {
        // p! / lambda^(p+1) * P(p + 1, lambda t)
        return std::tgamma(p + 1.0) / std::pow(e->lambda, p + 1) * boost::math::gamma_p(p + 1.0, e->lambda * t);
    }
    const double alpha = std::get<GammaTrawl>(geom.spec()).alpha;
    // The recurrence loses relative accuracy once J_p is much smaller than t^p.
    if (t >= 1.0) {
        if (auto j = detail::gamma_moment_recurrence(alpha, p, t)) return *j;
    }
    return detail::moment_integral_quadrature(geom, p, t);
}

/// J_p(t) by adaptive quadrature only.
inline double moment_integral_quadrature(const TrawlGeometry& geom, int p, double t) {
    if (p < 0 || !(t >= 0.0)) throw DomainError("moment_integral_quadrature: invalid arguments");
    return detail::moment_integral_quadrature(geom, p, t);
}

struct IntegralComponents {
    double i1 = 0.0;
    double i2 = 0.0;
    double i3 = 0.0;
    double i4 = 0.0;

    double sum() const { return i1 + i2 + i3 + i4; }
};

inline IntegralComponents integral_components(const TrawlGeometry& geom, int m, double t) {
    if (m < 1) throw DomainError("integral_components: m must be at least 1");
    if (!(t >= 0.0)) throw DomainError("integral_components: t must be nonnegative");
    if (t == 0.0) return {};
    const double jm = moment_integral(geom, m, t);
    const double jm1 = moment_integral(geom, m - 1, t);
    IntegralComponents c;
    c.i1 = std::pow(t, m) * geom.tail_mass(t);
    c.i2 = jm;
    c.i3 = jm;
    c.i4 = t * m * jm1 - (m + 1) * jm;
    return c;
}

/// kappa_{X*}^{(m)}(t). For a centered seed the first cumulant is 0.
inline double integrated_cumulant(const TrawlGeometry& geom, const SeedSpec& seed, int m, double t) {
    if (m < 1) throw DomainError("integrated_cumulant: m must be at least 1");
    if (m == 1 && seed.centered) return 0.0;
    const double kl = cumulant(seed, m);
    if (kl == 0.0) return 0.0;
    return kl * integral_components(geom, m, t).sum();
}

struct CumulantCurve {
    int m = 0;
    std::vector<double> t;
    std::vector<double> kappa;
    std::vector<IntegralComponents> components;
};

inline CumulantCurve cumulant_curve(const TrawlGeometry& geom, const SeedSpec& seed, int m,
                                    std::span<const double> t_grid) {
    CumulantCurve curve;
    curve.m = m;
    for (double t : t_grid) {
        curve.t.push_back(t);
        curve.components.push_back(integral_components(geom, m, t));
        curve.kappa.push_back(integrated_cumulant(geom, seed, m, t));
    }
    return curve;
}

/// Large-t behavior of kappa^{(m)}(t) for a regularly varying trawl.
struct AsymptoticCumulant {
    enum class Kind { PowerLaw, LinearBound, NearLinearBound };
    Kind kind;
    /// Growth exponent: m - alpha for PowerLaw, 1 or 1 + epsilon for the bounds.
    double exponent;
    /// kappa^{(m)}(t) / t^exponent limit (PowerLaw only; L(t) -> 1 for the gamma trawl).
    std::optional<double> constant;
};

/// Epsilon reported in the t^(1 + epsilon) bound at m = alpha + 1.
inline constexpr double kBoundaryEpsilon = 0.01;

inline AsymptoticCumulant asymptotic_cumulant(const TrawlGeometry& geom, const SeedSpec& seed, int m) {
    const auto alpha = geom.tail_index();
    if (!alpha) throw UnsupportedFamily("asymptotic_cumulant: trawl function is not regularly varying");
    if (m < 2) throw DomainError("asymptotic_cumulant: not applicable for m < 2");
    const double a = *alpha;
    const double gap = m - a - 1.0;
    if (std::abs(gap) < 1e-12)
        return {AsymptoticCumulant::Kind::NearLinearBound, 1.0 + kBoundaryEpsilon, std::nullopt};
    if (gap < 0.0) return {AsymptoticCumulant::Kind::LinearBound, 1.0, std::nullopt};
    // I1 ~ t^(m-a)/a, I2 = I3 ~ t^(m-a)/(m-a), I4 ~ (a+1)/((m-a-1)(m-a)) t^(m-a)
    const double c = 1.0 / a + 2.0 / (m - a) + (a + 1.0) / (gap * (m - a));
    return {AsymptoticCumulant::Kind::PowerLaw, m - a, c * cumulant(seed, m)};
}

/// Raw moments E[Y^1..Y^m] from cumulants kappa_1..kappa_m via
/// E[Y^p] = sum_{j=1}^{p} C(p-1, j-1) kappa_j E[Y^{p-j}].
inline std::vector<double> moments_from_cumulants(std::span<const double> kappa) {
    const std::size_t m = kappa.size();
    std::vector<double> mu(m + 1, 0.0);
    mu[0] = 1.0;
    for (std::size_t p = 1; p <= m; ++p) {
        double acc = 0.0;
        double binom = 1.0;  // C(p-1, j-1)
        for (std::size_t j = 1; j <= p; ++j) {
            acc += binom * kappa[j - 1] * mu[p - j];
            binom = binom * static_cast<double>(p - j) / static_cast<double>(j);
        }
        mu[p] = acc;
    }
    return {mu.begin() + 1, mu.end()};
}

/// Smallest even integer strictly greater than 2 alpha.
inline int critical_order(double alpha) { return 2 * static_cast<int>(std::floor(alpha)) + 2; }

/// tau_{X*}(q) = q - alpha for q >= q*; nullopt below q*.
inline std::optional<double> theoretical_tau(const TrawlGeometry& geom, double q) {
    const auto alpha = geom.tail_index();
    if (!alpha) throw UnsupportedFamily("theoretical_tau: trawl function is not regularly varying");
    if (!(q > 0.0)) throw DomainError("theoretical_tau: q must be positive");
    if (q < critical_order(*alpha)) return std::nullopt;
    return q - *alpha;
}

}  // namespace trawl
