#pragma once

// Exact simulation of a trawl process on the grid t_k = k * delta, k = 0..n.
//
// A point (xi, s) of the Levy basis with lifetime l = g^{-1}(xi) belongs to
// A_{t_k} iff s <= t_k <= s + l, so its grid membership is a contiguous run
// of indices. Grouping points by (first index, last index) of that run splits
// the union of the A_{t_k} into finitely many disjoint cells whose measures
// are second differences of the tail mass G. Independent draws of Lambda on
// the cells then give (X(t_0), ..., X(t_n)) exactly in law.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "trawl/errors.hpp"
#include "trawl/levy_seed.hpp"
#include "trawl/statistics.hpp"
#include "trawl/trawl_geometry.hpp"

namespace trawl {

struct SlicePartition {
    double delta = 0.0;
    int n = 0;
    /// interior[d]: cell entered at step j >= 1 and last present at step j + d.
    std::vector<double> interior;
    /// boundary_exit[l]: points with s <= t_0 last present at step l < n.
    std::vector<double> boundary_exit;
    /// Points with s <= t_0 still present at t_n; equals G(n delta).
    double boundary_survivor = 0.0;
    /// interior_survivor[j - 1]: points entered at step j still present at t_n.
    std::vector<double> interior_survivor;

    /// Total measure of the cells whose membership run contains grid index k.
    double coverage(int k) const {
        if (k < 0 || k > n) throw DomainError("coverage: grid index out of range");
        double total = boundary_survivor;
        for (int l = k; l < n; ++l) total += boundary_exit[l];
        for (int j = 1; j <= k; ++j) {
            // interior cells (j, d) with j + d >= k and j + d <= n - 1
            for (int d = k - j; j + d <= n - 1; ++d) total += interior[d];
            total += interior_survivor[j - 1];
        }
        return total;
    }

    /// Number of independent cells sampled per trajectory.
    long long cell_count() const {
        const long long nn = n;
        return nn + 1 + nn * (nn - 1) / 2 + nn;
    }
};

inline SlicePartition build_slice_partition(const TrawlGeometry& geom, double delta, int n) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("slice partition: delta must be positive");
    if (n < 0) throw DomainError("slice partition: n must be nonnegative");

    // G at multiples of delta, G_[i] = G(i delta) for i = 0..n+1.
    std::vector<double> tail(static_cast<std::size_t>(n) + 2);
    for (int i = 0; i <= n + 1; ++i) tail[i] = geom.tail_mass(i * delta);

    SlicePartition part;
    part.delta = delta;
    part.n = n;
    part.boundary_exit.resize(n);
    part.interior.resize(n);
    part.interior_survivor.resize(n);
    // b_l = G(l delta) - G((l + 1) delta)
    for (int l = 0; l < n; ++l) part.boundary_exit[l] = tail[l] - tail[l + 1];
    part.boundary_survivor = tail[n];
    // m_d = b_d - b_{d+1}; convexity of G makes it nonnegative up to rounding.
    for (int d = 0; d < n; ++d) {
        const double next = tail[d + 1] - tail[d + 2];
        part.interior[d] = std::max(0.0, (tail[d] - tail[d + 1]) - next);
    }
    for (int j = 1; j <= n; ++j) part.interior_survivor[j - 1] = tail[n - j] - tail[n - j + 1];
    return part;
}

/// One exact draw of (X(t_0), ..., X(t_n)), uncentered.
///
/// Cells are visited in a fixed order (boundary cells, boundary survivor,
/// interior diagonals d = 0..n-2, interior survivors) so that a given stream
/// always produces the same trajectory. Runs are accumulated in a difference
/// array: O(n^2) draws, O(n) memory.
template <class Rng>
std::vector<double> simulate_trajectory(const SlicePartition& part, const SeedSpec& seed, Rng& rng) {
    const int n = part.n;
    std::vector<double> diff(static_cast<std::size_t>(n) + 2, 0.0);
    auto add_run = [&](int first, int last, double v) {
        diff[first] += v;
        diff[last + 1] -= v;
    };

    for (int l = 0; l < n; ++l) {
        PatchSampler sampler(seed, part.boundary_exit[l]);
        add_run(0, l, sampler(rng));
    }
    {
        PatchSampler sampler(seed, part.boundary_survivor);
        add_run(0, n, sampler(rng));
    }
    for (int d = 0; d + 1 < n; ++d) {
        PatchSampler sampler(seed, part.interior[d]);
        for (int j = 1; j + d <= n - 1; ++j) add_run(j, j + d, sampler(rng));
    }
    for (int j = 1; j <= n; ++j) {
        PatchSampler sampler(seed, part.interior_survivor[j - 1]);
        add_run(j, n, sampler(rng));
    }

    const bool nonnegative = std::holds_alternative<PoissonSeed>(seed.family) ||
                             std::holds_alternative<GammaSeed>(seed.family) ||
                             std::holds_alternative<InverseGaussianSeed>(seed.family);
    std::vector<double> x(static_cast<std::size_t>(n) + 1);
    double running = 0.0;
    for (int k = 0; k <= n; ++k) {
        running += diff[k];
        // subtraction in the difference array can leave -1 ulp residue
        x[k] = nonnegative ? std::max(0.0, running) : running;
    }
    return x;
}

/// Left-endpoint Riemann sum X*(t_k) = delta * sum_{j<k} (X(t_j) - c), where
/// c = G(0) kappa_1 when the seed is centered and 0 otherwise.
inline std::vector<double> integrate_trajectory(std::span<const double> x, const SeedSpec& seed,
                                                const TrawlGeometry& geom, double delta) {
    const double center = seed.centered ? patch_mean(seed, geom.leb()) : 0.0;
    std::vector<double> out(x.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = 1; k < x.size(); ++k) {
        acc += x[k - 1] - center;
        out[k] = delta * acc;
    }
    return out;
}

/// Var(delta * sum_{j<k} X(t_j)) = kappa_2 delta^2 sum_{i,j<k} G(|i - j| delta).
inline double discrete_sum_variance(const TrawlGeometry& geom, const SeedSpec& seed, double delta, int k) {
    if (k < 1) throw DomainError("discrete_sum_variance: k must be at least 1");
    if (!(delta > 0.0)) throw DomainError("discrete_sum_variance: delta must be positive");
    double s = k * geom.leb();
    for (int d = 1; d < k; ++d) s += 2.0 * (k - d) * geom.tail_mass(d * delta);
    return cumulant(seed, 2) * delta * delta * s;
}

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct EnsembleConfig {
    TrawlSpec trawl = GammaTrawl{0.5};
    SeedSpec seed{PoissonSeed{1.0}, true};
    double delta = 0.05;
    int n = 400;
    int replications = 1000;
    std::uint64_t master_seed = 20170101;
    /// Upper bound on n^2 * R.
    double cell_budget = 8589934592.0;  // 2^33
};

struct Ensemble {
    EnsembleConfig config;
    Matrix x;      // R x (n + 1) grid values, uncentered
    Matrix xstar;  // R x (n + 1) Riemann sums of the (optionally) centered process

    double time(std::size_t k) const { return static_cast<double>(k) * config.delta; }
    std::size_t replications() const { return x.rows(); }
};

/// Random stream for replication r. Depends only on (master_seed, r).
inline std::mt19937_64 replication_stream(std::uint64_t master_seed, std::uint64_t r) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(r >> 32), 0x74726177u};
    return std::mt19937_64(seq);
}

inline unsigned default_thread_count() {
    if (const char* env = std::getenv("TRAWL_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline Ensemble run_ensemble(const EnsembleConfig& config, unsigned threads = 0) {
    if (config.replications < 1) throw DomainError("ensemble: replications must be positive");
    if (!(config.delta > 0.0)) throw DomainError("ensemble: delta must be positive");
    if (config.n < 0) throw DomainError("ensemble: n must be nonnegative");
    validate(config.seed);
    const double cells = static_cast<double>(config.n) * config.n * config.replications;
    if (cells > config.cell_budget) {
        const auto suggested = static_cast<long long>(std::floor(std::sqrt(config.cell_budget / config.replications)));
        throw BudgetError("ensemble: n^2 * R = " + std::to_string(cells) + " exceeds the cell budget " +
                              std::to_string(config.cell_budget) + "; try n <= " + std::to_string(suggested),
                          suggested);
    }

    const TrawlGeometry geom(config.trawl);
    const SlicePartition part = build_slice_partition(geom, config.delta, config.n);
    const auto reps = static_cast<std::size_t>(config.replications);
    const auto cols = static_cast<std::size_t>(config.n) + 1;

    Ensemble ens{config, Matrix(reps, cols), Matrix(reps, cols)};
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < reps; r = next++) {
            auto rng = replication_stream(config.master_seed, r);
            const auto x = simulate_trajectory(part, config.seed, rng);
            const auto xs = integrate_trajectory(x, config.seed, geom, config.delta);
            std::copy(x.begin(), x.end(), ens.x.row(r).begin());
            std::copy(xs.begin(), xs.end(), ens.xstar.row(r).begin());
        }
    };

    if (threads == 0) threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    return ens;
}

/// Pooled sample correlation of X at lag d (time lag d * delta), with a
/// jackknife standard error over replications.
inline stats::Estimate empirical_acf(const Ensemble& ens, int d) {
    const int n = static_cast<int>(ens.x.cols()) - 1;
    if (d < 0) throw DomainError("empirical_acf: lag must be nonnegative");
    if (d > n) throw DomainError("empirical_acf: lag exceeds the grid length");
    if (ens.replications() < 2) throw DomainError("empirical_acf: need at least two replications");

    // per replication: sum x_k x_{k+d}, sum of leading x_k, sum of trailing x_{k+d},
    // pair count, sum x, sum x^2, count
    std::vector<std::array<double, 7>> groups(ens.replications());
    for (std::size_t r = 0; r < ens.replications(); ++r) {
        const auto row = ens.x.row(r);
        auto& g = groups[r];
        g = {};
        for (int k = 0; k + d <= n; ++k) {
            g[0] += row[k] * row[k + d];
            g[1] += row[k];
            g[2] += row[k + d];
            g[3] += 1.0;
        }
        for (double v : row) {
            g[4] += v;
            g[5] += v * v;
            g[6] += 1.0;
        }
    }
    return stats::jackknife<7>(std::span<const std::array<double, 7>>(groups), [](const std::array<double, 7>& s) {
        const double mu = s[4] / s[6];
        const double var = s[5] / s[6] - mu * mu;
        const double cov = (s[0] - mu * (s[1] + s[2]) + mu * mu * s[3]) / s[3];
        return cov / var;
    });
}

/// Cumulant of order 1..4 of X(t_k) pooled over all k and replications,
/// with a jackknife standard error over replications.
inline stats::Estimate pooled_cumulant(const Ensemble& ens, int order) {
    if (ens.replications() < 2) throw DomainError("pooled_cumulant: need at least two replications");
    double shift = 0.0;
    for (std::size_t r = 0; r < ens.replications(); ++r) shift += stats::mean_of(ens.x.row(r));
    shift /= static_cast<double>(ens.replications());
    std::vector<stats::PowerSums> groups(ens.replications(), stats::PowerSums{});
    for (std::size_t r = 0; r < ens.replications(); ++r)
        for (double v : ens.x.row(r)) stats::accumulate(groups[r], v, shift);
    return stats::jackknife<5>(std::span<const stats::PowerSums>(groups), [&](const stats::PowerSums& s) {
        return stats::cumulant_from_sums(s, order, shift);
    });
}

}  // namespace trawl
