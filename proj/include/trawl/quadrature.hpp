#pragma once

// Thin checked wrappers over Boost.Math adaptive quadrature.

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "trawl/errors.hpp"

namespace trawl::quad {

struct Tolerance {
    double absolute = 1e-12;
    double relative = 1e-10;
    unsigned max_depth = 20;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

inline void check(const char* what, const Result& r, double l1, const Tolerance& tol) {
    const double allowed = std::max(tol.absolute, tol.relative * l1);
    if (!std::isfinite(r.value) || r.error > allowed) {
        throw QuadratureError(std::string(what) + ": no convergence", r.error, allowed);
    }
}

}  // namespace detail

/// Adaptive 61-point Gauss-Kronrod on a finite interval [a, b].
template <class F>
Result integrate(F&& f, double a, double b, const Tolerance& tol = {}) {
    if (a == b) return {};
    Result r;
    double l1 = 0.0;
    // Boost's recursive error estimate misbehaves on very short intervals, so
    // integrate over the unit interval and rescale.
    const double width = b - a;
    auto unit = [&](double u) { return f(a + width * u); };
    using rule = boost::math::quadrature::gauss_kronrod<double, 61>;
    // Single-panel pass first; Boost only knows a relative criterion, so the
    // absolute tolerance is translated through the panel's L1 estimate.
    r.value = width * rule::integrate(unit, 0.0, 1.0, 0, tol.relative, &r.error, &l1);
    const double allowed = std::max(tol.absolute, tol.relative * l1 * std::abs(width));
    if (r.error * std::abs(width) > allowed && tol.max_depth > 0) {
        const double rel = l1 > 0.0 ? std::max(tol.relative, tol.absolute / (l1 * std::abs(width))) : tol.relative;
        r.value = width * rule::integrate(unit, 0.0, 1.0, tol.max_depth, rel, &r.error, &l1);
    }
    r.error *= std::abs(width);
    l1 *= std::abs(width);
    detail::check("gauss_kronrod", r, l1, tol);
    return r;
}

/// Integral of f over [a, infinity) by the exp-sinh rule; suited to
/// algebraically or exponentially decaying integrands.
template <class F>
Result integrate_to_infinity(F&& f, double a, const Tolerance& tol = {}) {
    thread_local boost::math::quadrature::exp_sinh<double> rule(12);
    Result r;
    double l1 = 0.0;
    auto shifted = [&](double x) { return f(a + x); };
    r.value = rule.integrate(shifted, tol.relative, &r.error, &l1);
    detail::check("exp_sinh", r, l1, tol);
    return r;
}

}  // namespace trawl::quad
