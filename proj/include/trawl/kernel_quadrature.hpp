#pragma once

// Direct two-dimensional quadrature of int int h_A(xi, s, t)^m dxi ds.
//
// This evaluates the occupation kernel pointwise and integrates it
// numerically; it shares nothing with the I1..I4 reduction in
// cumulant_engine.hpp beyond the trawl function itself, so the two routes
// check each other.

#include <algorithm>
#include <cmath>
#include <limits>

#include "trawl/cumulant_engine.hpp"
#include "trawl/quadrature.hpp"
#include "trawl/trawl_geometry.hpp"

namespace trawl {

struct KernelQuadratureOptions {
    quad::Tolerance inner{0.0, 1e-12, 12};
    quad::Tolerance outer{0.0, 1e-10, 20};
};

/// int over xi in [0, g(0)] of h_A(xi, s, t)^m, split where h_A changes branch.
inline double kernel_slice_integral(const TrawlGeometry& geom, int m, double s, double t,
                                    const quad::Tolerance& tol) {
    auto f = [&](double xi) { return std::pow(kernel_h(geom, xi, s, t), m); };
    const double top = geom.height();
    const double b1 = geom.g_unchecked(t - s);
    const double b2 = s <= 0.0 ? geom.g_unchecked(-s) : top;
    // For s << 0 the branch value g^{-1}(xi) + s cancels; allow an absolute
    // error at the level of that rounding noise over the branch strip.
    // Every piece is judged against the size of the whole slice, t^m b2.
    const double scale = std::pow(t, m) * b2;
    quad::Tolerance piece = tol;
    piece.absolute = std::max(tol.absolute, scale * tol.relative);
    quad::Tolerance strip = piece;
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * m * (std::abs(s) + t) / t;
    strip.absolute = std::max(piece.absolute, (b2 - b1) * std::pow(t, m) * noise);
    double total = quad::integrate(f, 0.0, b1, piece).value;
    if (b1 > 0.0 && b2 > 100.0 * b1) {
        // the branch varies on a logarithmic scale in xi when the strip spans decades
        auto fy = [&](double y) {
            const double xi = std::exp(y);
            return f(xi) * xi;
        };
        total += quad::integrate(fy, std::log(b1), std::log(b2), strip).value;
    } else {
        total += quad::integrate(f, b1, b2, strip).value;
    }
    if (b2 < top) total += quad::integrate(f, b2, top, piece).value;
    return total;
}

/// int int h_A(xi, s, t)^m dxi ds over s in (-infinity, t].
inline double kernel_moment_integral(const TrawlGeometry& geom, int m, double t,
                                     const KernelQuadratureOptions& opt = {}) {
    if (m < 1) throw DomainError("kernel_moment_integral: m must be at least 1");
    if (!(t > 0.0)) throw DomainError("kernel_moment_integral: t must be positive");
    // past: s = -w, w >= 0
    auto past = [&](double w) { return kernel_slice_integral(geom, m, -w, t, opt.inner); };
    auto inside = [&](double s) { return kernel_slice_integral(geom, m, s, t, opt.inner); };
    return quad::integrate_to_infinity(past, 0.0, opt.outer).value +
           quad::integrate(inside, 0.0, t, opt.outer).value;
}

/// kappa_L^{(m)} times the kernel-route integral.
inline double kernel_route_cumulant(const TrawlGeometry& geom, const SeedSpec& seed, int m, double t,
                                    const KernelQuadratureOptions& opt = {}) {
    if (m == 1 && seed.centered) return 0.0;
    return cumulant(seed, m) * kernel_moment_integral(geom, m, t, opt);
}

}  // namespace trawl
