// Acceptance run: one PASS/FAIL line per criterion, each followed by the
// measured quantities. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "trawl/commands.hpp"
#include "trawl/cumulant_engine.hpp"
#include "trawl/experiment.hpp"
#include "trawl/kernel_quadrature.hpp"
#include "trawl/scaling_estimator.hpp"
#include "trawl/simulator.hpp"

using namespace trawl;
namespace fs = std::filesystem;

namespace {

const SeedSpec kPoisson{PoissonSeed{1.0}, true};

struct Outcome {
    bool passed = true;
    std::vector<std::string> lines;

    void check(bool ok, std::string line) {
        passed = passed && ok;
        lines.push_back(fmt::format("    [{}] {}", ok ? "ok" : "FAIL", line));
    }
};

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> t;
    for (int i = 0; i < points; ++i) t.push_back(lo * std::pow(hi / lo, i / (points - 1.0)));
    t.back() = hi;
    return t;
}

double slope(const TrawlGeometry& g, int m, std::span<const double> t, double decades) {
    const auto curve = cumulant_curve(g, kPoisson, m, t);
    return fit_tau(t, curve.kappa, {decades, 8}).tau_hat;
}

Outcome long_memory_slope() {
    Outcome o;
    const TrawlGeometry g(GammaTrawl{0.5});
    const auto t = log_grid(1e3, 1e4, 20);
    for (int m : {2, 4}) {
        const double s = slope(g, m, t, 1.0);
        o.check(std::abs(s - (m - 0.5)) <= 0.02, fmt::format("m={} slope={:.6f} target={} tol=0.02", m, s, m - 0.5));
    }
    return o;
}

Outcome subcritical_bound() {
    Outcome o;
    const TrawlGeometry g(GammaTrawl{1.5});
    const auto t = log_grid(1e3, 1e5, 21);
    const double s2 = slope(g, 2, t, 2.0);
    o.check(s2 >= 0.95 && s2 <= 1.05, fmt::format("m=2 slope={:.6f} range=[0.95, 1.05]", s2));
    const double s4 = slope(g, 4, t, 2.0);
    o.check(std::abs(s4 - 2.5) <= 0.05, fmt::format("m=4 slope={:.6f} target=2.5 tol=0.05", s4));
    return o;
}

Outcome asymptotic_constant() {
    Outcome o;
    const double a = 0.5;
    const TrawlGeometry g(GammaTrawl{a});
    const double c4 = 1.0 / a + 2.0 / (4.0 - a) + (a + 1.0) / ((3.0 - a) * (4.0 - a));
    const double target = c4 * cumulant(kPoisson, 4);
    const double ratio = integrated_cumulant(g, kPoisson, 4, 1e4) / std::pow(1e4, 4.0 - a);
    const double rel = std::abs(ratio / target - 1.0);
    o.check(rel <= 0.02, fmt::format("kappa4(1e4)/1e4^3.5={:.6f} C4*kappa_L={:.6f} rel={:.2e} tol=0.02", ratio,
                                     target, rel));
    const auto reported = asymptotic_cumulant(g, kPoisson, 4);
    const bool same = reported.constant && std::abs(*reported.constant / target - 1.0) < 1e-12;
    o.check(same, fmt::format("engine constant={:.12f}", reported.constant.value_or(NAN)));
    return o;
}

Outcome kernel_equivalence() {
    Outcome o;
    const TrawlGeometry g(GammaTrawl{0.5});
    for (int m : {2, 3, 4})
        for (double t : {1.0, 5.0, 20.0}) {
            try {
                const double closed = integral_components(g, m, t).sum();
                const double kernel = kernel_moment_integral(g, m, t);
                const double rel = std::abs(kernel - closed) / std::abs(closed);
                o.check(rel <= 1e-6, fmt::format("m={} t={:g} closed={:.12g} kernel={:.12g} rel={:.2e}", m, t, closed,
                                                 kernel, rel));
            } catch (const QuadratureError& e) {
                o.check(false, fmt::format("m={} t={:g} {}", m, t, e.what()));
            }
        }
    return o;
}

Outcome simulator_laws() {
    Outcome o;
    EnsembleConfig c;
    c.trawl = GammaTrawl{0.5};
    c.seed = kPoisson;
    c.delta = 0.05;
    c.n = 400;
    c.replications = 10000;
    c.master_seed = 20170101;
    const TrawlGeometry g(c.trawl);
    const Ensemble ens = run_ensemble(c);
    auto stat = [&](const std::string& what, const stats::Estimate& e, double target) {
        const double z = std::abs(e.value - target) / e.std_error;
        o.check(z <= 4.0, fmt::format("{} est={:.6f} se={:.2e} target={:.6f} z={:.2f}", what, e.value, e.std_error,
                                      target, z));
    };
    stat("mean", pooled_cumulant(ens, 1), g.leb() * cumulant(c.seed, 1));
    stat("variance", pooled_cumulant(ens, 2), g.leb() * cumulant(c.seed, 2));
    for (int d : {1, 2, 5}) stat(fmt::format("acf lag {}*delta", d), empirical_acf(ens, d), g.correlation(d * c.delta));
    for (int h : {1, 2, 5}) {
        const int d = static_cast<int>(std::lround(h / c.delta));
        stat(fmt::format("acf lag t={}", h), empirical_acf(ens, d), g.correlation(h));
    }
    std::vector<double> last(ens.replications());
    for (std::size_t r = 0; r < last.size(); ++r) last[r] = ens.xstar(r, static_cast<std::size_t>(c.n));
    stat("var Xstar(t_n)", stats::sample_cumulant(last, 2), discrete_sum_variance(g, c.seed, c.delta, c.n));
    return o;
}

Outcome partition_geometry() {
    Outcome o;
    const TrawlGeometry g(GammaTrawl{1.0});
    const double delta = 1.0;
    const int n = 20;
    const auto p = build_slice_partition(g, delta, n);
    o.check(std::abs(p.interior[0] - 1.0 / 3.0) <= 1e-15, fmt::format("m0={:.17g}", p.interior[0]));
    o.check(std::abs(p.boundary_exit[0] - 0.5) <= 1e-15, fmt::format("b0={:.17g}", p.boundary_exit[0]));

    auto member = [&](double xi, double s, int k) {
        const double lag = k * delta - s;
        return lag >= 0.0 && xi * (1.0 + lag) * (1.0 + lag) <= 1.0;
    };
    std::mt19937_64 pick(6);
    for (int i = 0; i < 5; ++i) {
        // four interior cells and one cell that survives to t_n
        const bool survivor = i == 4;
        const int j = std::uniform_int_distribution<int>(1, survivor ? n : n - 1)(pick);
        const int d = survivor ? n - j : std::uniform_int_distribution<int>(0, n - 1 - j)(pick);
        const double exact = survivor ? p.interior_survivor[j - 1] : p.interior[d];
        const auto inside = [&](double xi, double s) {
            return member(xi, s, j + d) && (survivor || !member(xi, s, j + d + 1));
        };
        const double xi_lo = survivor ? 0.0 : oracle::gamma_g(1.0, (d + 2) * delta);
        const auto est = oracle::rejection_area(inside, (j - 1) * delta, j * delta, xi_lo,
                                                oracle::gamma_g(1.0, d * delta), 2000000, 100 + i);
        const double rel = std::abs(est.value / exact - 1.0);
        o.check(rel <= 1e-2, fmt::format("{} cell j={} d={} exact={:.6e} mc={:.6e} rel={:.2e}",
                                         survivor ? "survivor" : "interior", j, d, exact, est.value, rel));
    }
    double worst = 0.0;
    for (int k = 0; k <= n; ++k) worst = std::max(worst, std::abs(p.coverage(k) - g.leb()));
    o.check(worst <= 1e-10, fmt::format("coverage max deviation={:.2e}", worst));
    return o;
}

Outcome intermittency_verdict() {
    Outcome o;
    const TrawlGeometry g(GammaTrawl{0.5});
    const std::vector<double> q{2.0, 4.0};
    const auto t = log_grid(1e6, 1e7, 20);
    const auto poisson = analytic_scaling_curve(g, kPoisson, q, t);
    const auto v = intermittency_check(poisson);
    const double r2 = poisson.tau_hat[0] / 2.0, r4 = poisson.tau_hat[1] / 4.0;
    const bool witness = v.witness && v.witness->first == 2.0 && v.witness->second == 4.0;
    o.check(v.intermittent && witness,
            fmt::format("poisson tau(2)/2={:.5f} tau(4)/4={:.5f} intermittent={} witness=({},{})", r2, r4,
                        v.intermittent, v.witness ? v.witness->first : NAN, v.witness ? v.witness->second : NAN));
    o.check(std::abs(r2 - 0.75) <= 0.01 && std::abs(r4 - 0.875) <= 0.01, "ratios near 0.75 and 0.875");

    const auto gauss = analytic_scaling_curve(g, SeedSpec{GaussianSeed{0.0, 1.0}, true}, q, t);
    const auto vg = intermittency_check(gauss);
    const double g2 = gauss.tau_hat[0] / 2.0, g4 = gauss.tau_hat[1] / 4.0;
    o.check(!vg.intermittent, fmt::format("gaussian tau(2)/2={:.5f} tau(4)/4={:.5f} intermittent={}", g2, g4,
                                          vg.intermittent));
    o.check(std::abs(g2 - 0.75) <= 1e-3 && std::abs(g4 - 0.75) <= 1e-3, "gaussian ratio constant at (2 - alpha)/2");
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    Outcome o;
    ExperimentConfig c;
    c.ensemble.n = 200;
    c.ensemble.replications = 500;
    c.ensemble.master_seed = 8;
    const fs::path root = fs::temp_directory_path() / fmt::format("trawl_acceptance_{}", ::getpid());
    std::vector<std::string> csv, json;
    for (unsigned threads : {1u, 1u, 2u, 7u}) {
        const fs::path dir = root / std::to_string(csv.size());
        RunOptions opt;
        opt.out = dir;
        opt.threads = threads;
        opt.quiet = true;
        cmd_simulate(c, opt);
        csv.push_back(slurp(dir / "ensemble.csv"));
        json.push_back(slurp(dir / "ensemble.json"));
    }
    fs::remove_all(root);
    for (std::size_t i = 1; i < csv.size(); ++i) {
        const bool same = csv[i] == csv[0] && json[i] == json[0];
        o.check(same, fmt::format("run {} vs run 0: {} bytes, identical={}", i, csv[i].size(), same));
    }
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        std::string name;
        std::function<Outcome()> run;
        double budget_seconds;
    };
    const std::vector<Criterion> criteria{
        {"long-memory slope", long_memory_slope, 5.0},
        {"sub-critical cumulant growth", subcritical_bound, 5.0},
        {"asymptotic constant", asymptotic_constant, 1.0},
        {"kernel route equals component route", kernel_equivalence, 30.0},
        {"simulator laws", simulator_laws, 300.0},
        {"partition geometry", partition_geometry, 10.0},
        {"intermittency verdict", intermittency_verdict, 1.0},
        {"determinism across thread counts", determinism, INFINITY},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].run();
        } catch (const std::exception& e) {
            out.check(false, fmt::format("exception: {}", e.what()));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (std::isfinite(criteria[i].budget_seconds))
            out.check(secs < criteria[i].budget_seconds,
                      fmt::format("runtime {:.2f} s, limit {:g} s", secs, criteria[i].budget_seconds));
        if (!out.passed) ++failures;
        std::cout << fmt::format("criterion {}: {} {} ({:.2f} s)\n", i + 1, out.passed ? "PASS" : "FAIL",
                                 criteria[i].name, secs);
        for (const auto& line : out.lines) std::cout << line << '\n';
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
