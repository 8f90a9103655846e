#pragma once

// Estimators shared by the simulator checks and the scaling estimator.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace trawl::stats {

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Delete-one-group jackknife. Each group contributes a vector of additive
/// sufficient statistics; `statistic` maps a total to the estimate.
template <std::size_t P, class F>
Estimate jackknife(std::span<const std::array<double, P>> groups, F&& statistic) {
    const std::size_t n = groups.size();
    if (n < 2) throw std::invalid_argument("jackknife: need at least two groups");
    std::array<double, P> total{};
    for (const auto& g : groups)
        for (std::size_t i = 0; i < P; ++i) total[i] += g[i];

    std::vector<double> leave_out(n);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        std::array<double, P> partial = total;
        for (std::size_t i = 0; i < P; ++i) partial[i] -= groups[j][i];
        leave_out[j] = statistic(partial);
        mean += leave_out[j];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : leave_out) ss += (v - mean) * (v - mean);
    const double nn = static_cast<double>(n);
    return {statistic(total), std::sqrt((nn - 1.0) / nn * ss)};
}

/// Power sums (count, sum y, sum y^2, sum y^3, sum y^4) of y = x - shift.
using PowerSums = std::array<double, 5>;

inline void accumulate(PowerSums& s, double x, double shift) {
    const double y = x - shift;
    const double y2 = y * y;
    s[0] += 1.0;
    s[1] += y;
    s[2] += y2;
    s[3] += y2 * y;
    s[4] += y2 * y2;
}

/// Plug-in cumulant of order 1..4 from shifted power sums.
inline double cumulant_from_sums(const PowerSums& s, int order, double shift) {
    const double n = s[0];
    const double mu = s[1] / n;
    const double r2 = s[2] / n, r3 = s[3] / n, r4 = s[4] / n;
    const double c2 = r2 - mu * mu;
    switch (order) {
        case 1:
            return mu + shift;
        case 2:
            return c2;
        case 3:
            return r3 - 3.0 * mu * r2 + 2.0 * mu * mu * mu;
        case 4: {
            const double c4 = r4 - 4.0 * mu * r3 + 6.0 * mu * mu * r2 - 3.0 * mu * mu * mu * mu;
            return c4 - 3.0 * c2 * c2;
        }
        default:
            throw std::invalid_argument("cumulant_from_sums: order must be 1..4");
    }
}

inline double mean_of(std::span<const double> xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    return xs.empty() ? 0.0 : m / static_cast<double>(xs.size());
}

/// Sample cumulant of order 1..4 of iid draws, jackknife standard error.
inline Estimate sample_cumulant(std::span<const double> xs, int order) {
    const double shift = mean_of(xs);
    std::vector<PowerSums> groups(xs.size(), PowerSums{});
    for (std::size_t i = 0; i < xs.size(); ++i) accumulate(groups[i], xs[i], shift);
    return jackknife<5>(std::span<const PowerSums>(groups),
                        [&](const PowerSums& s) { return cumulant_from_sums(s, order, shift); });
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_std_error = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
inline LinearFit ols(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("ols: need at least two paired points");
    const double mx = mean_of(x), my = mean_of(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols: abscissae are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        sse += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    if (n > 2) fit.slope_std_error = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
    return fit;
}

}  // namespace trawl::stats
