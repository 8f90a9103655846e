#pragma once

// Estimation of the scaling function tau(q) = lim log E|Y(t)|^q / log t and
// intermittency detection (tau(q)/q strictly increasing somewhere).

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "trawl/cumulant_engine.hpp"
#include "trawl/simulator.hpp"
#include "trawl/statistics.hpp"

namespace trawl {

/// Mean of |X*(t_k)|^q over replications, jackknife standard error.
inline stats::Estimate empirical_moment(const Ensemble& ens, double q, std::size_t k) {
    if (!(q > 0.0)) throw DomainError("empirical_moment: q must be positive");
    const std::size_t reps = ens.replications();
    if (reps == 0) throw DomainError("empirical_moment: empty ensemble");
    if (k >= ens.xstar.cols()) throw DomainError("empirical_moment: grid index out of range");
    std::vector<std::array<double, 2>> groups(reps);
    for (std::size_t r = 0; r < reps; ++r) groups[r] = {std::pow(std::abs(ens.xstar(r, k)), q), 1.0};
    if (reps == 1) return {groups[0][0], std::numeric_limits<double>::infinity()};
    return stats::jackknife<2>(std::span<const std::array<double, 2>>(groups),
                               [](const std::array<double, 2>& s) { return s[0] / s[1]; });
}

struct TauFit {
    double tau_hat = 0.0;
    double std_error = 0.0;
    double r2 = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t points = 0;
};

struct FitOptions {
    /// Fit over [t_max / 10^decades, t_max].
    double window_decades = 1.0;
    std::size_t min_points = 8;
};

/// OLS slope of log moment against log t over the top window of t.
inline TauFit fit_tau(std::span<const double> t, std::span<const double> moment, const FitOptions& opt = {}) {
    if (t.size() != moment.size()) throw std::invalid_argument("fit_tau: size mismatch");
    if (t.empty()) throw std::invalid_argument("fit_tau: no points");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !std::isfinite(t[i])) throw std::invalid_argument("fit_tau: t must be positive");
        if (!(moment[i] > 0.0) || !std::isfinite(moment[i]))
            throw std::invalid_argument("fit_tau: moments must be finite and positive");
    }
    const auto [lo_it, hi_it] = std::minmax_element(t.begin(), t.end());
    const double t_max = *hi_it;
    if (t_max / *lo_it < 10.0 * (1.0 - 1e-9)) throw std::invalid_argument("fit_tau: t-range spans less than a decade");
    const double t_lo = t_max / std::pow(10.0, opt.window_decades) * (1.0 - 1e-12);

    std::vector<double> lx, ly;
    double used_lo = t_max;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t_lo) {
            used_lo = std::min(used_lo, t[i]);
            lx.push_back(std::log(t[i]));
            ly.push_back(std::log(moment[i]));
        }
    }
    if (lx.size() < opt.min_points)
        throw std::invalid_argument("fit_tau: fewer than " + std::to_string(opt.min_points) + " points in the window");
    const auto fit = stats::ols(lx, ly);
    return {fit.slope, fit.slope_std_error, fit.r2, used_lo, t_max, lx.size()};
}

enum class ScalingSource { MonteCarlo, Analytic };

inline const char* to_string(ScalingSource s) { return s == ScalingSource::Analytic ? "analytic" : "monte_carlo"; }

struct ScalingCurve {
    std::vector<double> q;
    std::vector<double> tau_hat;
    std::vector<double> std_error;
    std::vector<double> r2;
    double t_lo = 0.0;
    double t_hi = 0.0;
    ScalingSource source = ScalingSource::Analytic;
    /// Smallest even integer above 2 alpha, when the trawl has a tail index.
    std::optional<int> q_star;

    std::size_t size() const { return q.size(); }
};

/// Log-spaced distinct grid indices in [k_lo, k_hi], at most `count` of them.
inline std::vector<std::size_t> log_spaced_indices(std::size_t k_lo, std::size_t k_hi, std::size_t count) {
    std::vector<std::size_t> out;
    if (k_lo == 0 || k_hi < k_lo) return out;
    const double a = std::log(static_cast<double>(k_lo)), b = std::log(static_cast<double>(k_hi));
    for (std::size_t i = 0; i < count; ++i) {
        const double f = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        const auto k = static_cast<std::size_t>(std::llround(std::exp(a + f * (b - a))));
        if (out.empty() || out.back() != k) out.push_back(k);
    }
    return out;
}

/// tau-hat from ensemble moments E|X*(t_k)|^q, at up to `points` log-spaced
/// grid indices covering the top `window_decades` of the simulated horizon.
inline ScalingCurve monte_carlo_scaling_curve(const Ensemble& ens, std::span<const double> q_grid,
                                              const FitOptions& opt = {}, std::size_t points = 20) {
    const std::size_t n = ens.xstar.cols() - 1;
    if (n < 1) throw std::invalid_argument("monte_carlo_scaling_curve: grid has no positive times");
    const auto k_lo = static_cast<std::size_t>(
        std::max(1.0, std::floor(static_cast<double>(n) / std::pow(10.0, opt.window_decades))));
    const auto ks = log_spaced_indices(k_lo, n, points);
    ScalingCurve curve;
    curve.source = ScalingSource::MonteCarlo;
    if (const auto a = TrawlGeometry(ens.config.trawl).tail_index()) curve.q_star = critical_order(*a);
    for (double q : q_grid) {
        std::vector<double> t, mom;
        for (std::size_t k : ks) {
            t.push_back(ens.time(k));
            mom.push_back(empirical_moment(ens, q, k).value);
        }
        const auto fit = fit_tau(t, mom, opt);
        curve.q.push_back(q);
        curve.tau_hat.push_back(fit.tau_hat);
        curve.std_error.push_back(fit.std_error);
        curve.r2.push_back(fit.r2);
        curve.t_lo = fit.t_lo;
        curve.t_hi = fit.t_hi;
    }
    return curve;
}

/// E[X*(t)^q] for even integer q from the analytic cumulants.
inline double analytic_moment(const TrawlGeometry& geom, const SeedSpec& seed, int q, double t) {
    std::vector<double> kappa;
    kappa.reserve(static_cast<std::size_t>(q));
    for (int m = 1; m <= q; ++m) kappa.push_back(integrated_cumulant(geom, seed, m, t));
    return moments_from_cumulants(kappa).back();
}

inline bool is_even_integer(double q) { return q > 0.0 && q == std::floor(q) && std::fmod(q, 2.0) == 0.0; }

/// tau-hat from analytic even moments over t_grid. Non-even q are rejected:
/// absolute moments of other orders are only reachable by simulation.
inline ScalingCurve analytic_scaling_curve(const TrawlGeometry& geom, const SeedSpec& seed,
                                           std::span<const double> q_grid, std::span<const double> t_grid,
                                           const FitOptions& opt = {}) {
    ScalingCurve curve;
    curve.source = ScalingSource::Analytic;
    if (const auto a = geom.tail_index()) curve.q_star = critical_order(*a);
    for (double q : q_grid) {
        if (!is_even_integer(q))
            throw std::invalid_argument("analytic_scaling_curve: q must be an even integer, got " + std::to_string(q));
        std::vector<double> mom;
        mom.reserve(t_grid.size());
        for (double t : t_grid) mom.push_back(analytic_moment(geom, seed, static_cast<int>(q), t));
        const auto fit = fit_tau(t_grid, mom, opt);
        curve.q.push_back(q);
        curve.tau_hat.push_back(fit.tau_hat);
        curve.std_error.push_back(fit.std_error);
        curve.r2.push_back(fit.r2);
        curve.t_lo = fit.t_lo;
        curve.t_hi = fit.t_hi;
    }
    return curve;
}

struct IntermittencyVerdict {
    bool intermittent = false;
    std::optional<std::pair<double, double>> witness;
    std::optional<int> q_star;
};

struct IntermittencyOptions {
    double sigmas = 3.0;
    /// Absolute floor on the required gap, for curves with vanishing fit error.
    double min_gap = 1e-9;
};

/// Intermittent iff tau(p)/p + sigmas * se < tau(r)/r for some p < r among the
/// q-points at or above q* (all points when q* is unknown). The first such
/// pair in (p, r) order is returned as witness.
inline IntermittencyVerdict intermittency_check(const ScalingCurve& curve, const IntermittencyOptions& opt = {}) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < curve.size(); ++i)
        if (!curve.q_star || curve.q[i] >= *curve.q_star) eligible.push_back(i);
    if (eligible.size() < 2) throw std::invalid_argument("intermittency_check: need at least two q-points at or above q*");
    std::sort(eligible.begin(), eligible.end(), [&](auto a, auto b) { return curve.q[a] < curve.q[b]; });

    IntermittencyVerdict v;
    v.q_star = curve.q_star;
    for (std::size_t a = 0; a < eligible.size(); ++a) {
        for (std::size_t b = a + 1; b < eligible.size(); ++b) {
            const std::size_t i = eligible[a], j = eligible[b];
            const double p = curve.q[i], r = curve.q[j];
            if (!(p < r)) continue;
            const double se = std::hypot(curve.std_error[i] / p, curve.std_error[j] / r);
            const double gap = std::max(opt.sigmas * se, opt.min_gap);
            if (curve.tau_hat[i] / p + gap < curve.tau_hat[j] / r) {
                v.intermittent = true;
                v.witness = std::make_pair(p, r);
                return v;
            }
        }
    }
    return v;
}

/// tau-hat convex in q up to `sigmas` standard errors: for every triple
/// q_i < q_j < q_k the middle value lies below the chord.
inline bool is_convex_within(const ScalingCurve& c, double sigmas = 3.0) {
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j)
            for (std::size_t k = 0; k < c.size(); ++k) {
                if (!(c.q[i] < c.q[j] && c.q[j] < c.q[k])) continue;
                const double w = (c.q[k] - c.q[j]) / (c.q[k] - c.q[i]);
                const double chord = w * c.tau_hat[i] + (1.0 - w) * c.tau_hat[k];
                const double se = std::sqrt(w * w * c.std_error[i] * c.std_error[i] +
                                            (1 - w) * (1 - w) * c.std_error[k] * c.std_error[k] +
                                            c.std_error[j] * c.std_error[j]);
                if (c.tau_hat[j] > chord + sigmas * se + 1e-12) return false;
            }
    return true;
}

/// tau-hat(q)/q nondecreasing up to `sigmas` standard errors.
inline bool ratio_nondecreasing_within(const ScalingCurve& c, double sigmas = 3.0) {
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (!(c.q[i] < c.q[j])) continue;
            const double se = std::hypot(c.std_error[i] / c.q[i], c.std_error[j] / c.q[j]);
            if (c.tau_hat[i] / c.q[i] > c.tau_hat[j] / c.q[j] + sigmas * se + 1e-12) return false;
        }
    return true;
}

}  // namespace trawl
