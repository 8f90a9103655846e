#pragma once

// The four experiment commands behind the command-line tool. Each takes a
// validated ExperimentConfig, writes its files under the output directory and
// returns a process exit code; errors travel as exceptions and are mapped to
// exit codes by run_guarded().

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "trawl/cumulant_engine.hpp"
#include "trawl/errors.hpp"
#include "trawl/experiment.hpp"
#include "trawl/io.hpp"
#include "trawl/kernel_quadrature.hpp"
#include "trawl/scaling_estimator.hpp"
#include "trawl/simulator.hpp"
#include "trawl/statistics.hpp"

namespace trawl {

enum ExitCode : int {
    kExitSuccess = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitBudget = 3,
    kExitNumerical = 4,
};

struct RunOptions {
    /// Overrides output.directory when non-empty.
    std::filesystem::path out;
    /// 0 selects default_thread_count().
    unsigned threads = 0;
    bool quiet = false;
    std::ostream* log = &std::cout;
};

namespace detail {

inline std::filesystem::path output_dir(const ExperimentConfig& c, const RunOptions& o) {
    return o.out.empty() ? c.output.directory : o.out;
}

template <class... Args>
void say(const RunOptions& o, fmt::format_string<Args...> f, Args&&... args) {
    if (!o.quiet && o.log) *o.log << fmt::format(f, std::forward<Args>(args)...) << '\n';
}

inline io::json sidecar(const char* command, const ExperimentConfig& c) {
    io::json j;
    j["command"] = command;
    j["config"] = io::to_json(c);
    j["master_seed"] = c.ensemble.master_seed;
    return j;
}

}  // namespace detail

/// Maps the exception taxonomy onto exit codes, printing the message to `err`.
inline int run_guarded(const std::function<int()>& body, std::ostream& err = std::cerr) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const UnsupportedFamily& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BudgetError& e) {
        err << "budget error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const QuadratureError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInternal;
    }
}

// ---------------------------------------------------------------------------
// simulate

inline int cmd_simulate(const ExperimentConfig& c, const RunOptions& o = {}) {
    const auto dir = detail::output_dir(c, o);
    const Ensemble ens = run_ensemble(c.ensemble, o.threads);
    const std::size_t cols = ens.x.cols();

    auto meta = detail::sidecar("simulate", c);
    meta["rows"] = ens.replications() * cols;
    if (c.output.csv) {
        io::CsvBuilder csv{"replication", "k", "t", "X", "Xstar"};
        for (std::size_t r = 0; r < ens.replications(); ++r)
            for (std::size_t k = 0; k < cols; ++k) csv.row(r, k, ens.time(k), ens.x(r, k), ens.xstar(r, k));
        io::atomic_write(dir / "ensemble.csv", csv.text());
        meta["files"].push_back("ensemble.csv");
    }
    if (c.output.json) io::write_json(dir / "ensemble.json", meta);
    detail::say(o, "simulate: {} replications x {} grid points -> {}", ens.replications(), cols, dir.string());
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// cumulants

/// Log-log slope of |kappa| over the configured window; empty when the curve
/// vanishes or changes sign.
inline std::optional<TauFit> fit_cumulant_curve(const CumulantCurve& curve, double window_decades) {
    const bool positive = std::all_of(curve.kappa.begin(), curve.kappa.end(), [](double k) { return k > 0.0; });
    const bool negative = std::all_of(curve.kappa.begin(), curve.kappa.end(), [](double k) { return k < 0.0; });
    if (!positive && !negative) return std::nullopt;
    std::vector<double> mag(curve.kappa.size());
    std::transform(curve.kappa.begin(), curve.kappa.end(), mag.begin(), [](double k) { return std::abs(k); });
    return fit_tau(curve.t, mag, {window_decades, 8});
}

inline int cmd_cumulants(const ExperimentConfig& c, const RunOptions& o = {}) {
    const auto dir = detail::output_dir(c, o);
    const TrawlGeometry geom(c.ensemble.trawl);
    const auto& seed = c.ensemble.seed;
    const auto t_grid = c.analysis.t_grid();

    io::CsvBuilder csv{"m", "t", "I1", "I2", "I3", "I4", "kappa"};
    io::CsvBuilder fits{"m", "slope", "stderr", "r2", "t_lo", "t_hi", "theory_exponent"};
    auto meta = detail::sidecar("cumulants", c);
    meta["fits"] = io::json::array();

    for (int m : c.analysis.orders) {
        const auto curve = cumulant_curve(geom, seed, m, t_grid);
        for (std::size_t i = 0; i < curve.t.size(); ++i) {
            const auto& ic = curve.components[i];
            csv.row(m, curve.t[i], ic.i1, ic.i2, ic.i3, ic.i4, curve.kappa[i]);
        }
        const auto fit = fit_cumulant_curve(curve, c.analysis.fit_window_decades);
        std::optional<AsymptoticCumulant> theory;
        if (geom.tail_index() && m >= 2) theory = asymptotic_cumulant(geom, seed, m);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double exponent = theory ? theory->exponent : nan;
        fits.row(m, fit ? fit->tau_hat : nan, fit ? fit->std_error : nan, fit ? fit->r2 : nan,
                 fit ? fit->t_lo : nan, fit ? fit->t_hi : nan, exponent);

        io::json jf;
        jf["m"] = m;
        if (fit) {
            jf["slope"] = fit->tau_hat;
            jf["stderr"] = fit->std_error;
            jf["r2"] = fit->r2;
            jf["t_range"] = {fit->t_lo, fit->t_hi};
        } else {
            jf["slope"] = nullptr;
        }
        if (theory) {
            static const char* kinds[] = {"power_law", "linear_bound", "near_linear_bound"};
            jf["theory"] = {{"kind", kinds[static_cast<int>(theory->kind)]}, {"exponent", theory->exponent}};
            if (theory->constant) jf["theory"]["constant"] = *theory->constant;
        }
        meta["fits"].push_back(jf);

        if (fit) detail::say(o, "cumulants: m={} slope {:.6f} over [{:g}, {:g}]", m, fit->tau_hat, fit->t_lo, fit->t_hi);
        else detail::say(o, "cumulants: m={} curve is identically zero", m);
    }

    if (c.output.csv) {
        io::atomic_write(dir / "cumulants.csv", csv.text());
        io::atomic_write(dir / "cumulant_fits.csv", fits.text());
        meta["files"] = {"cumulants.csv", "cumulant_fits.csv"};
    }
    if (c.output.json) io::write_json(dir / "cumulants.json", meta);
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// scaling

inline io::json verdict_json(const ScalingCurve& curve) {
    io::json j;
    j["source"] = to_string(curve.source);
    j["q_star"] = curve.q_star ? io::json(*curve.q_star) : io::json(nullptr);
    try {
        const auto v = intermittency_check(curve);
        j["intermittent"] = v.intermittent;
        j["witness"] = v.witness ? io::json::array({v.witness->first, v.witness->second}) : io::json(nullptr);
        j["indeterminate"] = false;
    } catch (const std::invalid_argument&) {
        j["intermittent"] = false;
        j["witness"] = nullptr;
        j["indeterminate"] = true;
    }
    j["convex"] = is_convex_within(curve);
    j["ratio_nondecreasing"] = ratio_nondecreasing_within(curve);
    j["t_range"] = {curve.t_lo, curve.t_hi};
    return j;
}

inline int cmd_scaling(const ExperimentConfig& c, const RunOptions& o = {}) {
    const auto dir = detail::output_dir(c, o);
    const TrawlGeometry geom(c.ensemble.trawl);
    const FitOptions fit{c.analysis.fit_window_decades, 8};
    std::vector<ScalingCurve> curves;

    if (c.analysis.route != Route::MonteCarlo) {
        const auto t_grid = c.analysis.t_grid();
        curves.push_back(analytic_scaling_curve(geom, c.ensemble.seed, c.analysis.q_grid, t_grid, fit));
    }
    if (c.analysis.route != Route::Analytic) {
        const Ensemble ens = run_ensemble(c.ensemble, o.threads);
        try {
            curves.push_back(monte_carlo_scaling_curve(ens, c.analysis.q_grid, fit,
                                                       static_cast<std::size_t>(c.analysis.mc_points)));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: grid too short for the Monte Carlo fit: ") + e.what());
        }
    }

    io::CsvBuilder csv{"q", "tau_hat", "stderr", "r2", "source"};
    for (const auto& curve : curves)
        for (std::size_t i = 0; i < curve.size(); ++i)
            csv.row(curve.q[i], curve.tau_hat[i], curve.std_error[i], curve.r2[i], to_string(curve.source));

    // The analytic curve, when present, decides the headline verdict.
    io::json verdict = verdict_json(curves.front());
    if (curves.size() > 1) verdict["monte_carlo"] = verdict_json(curves.back());

    auto meta = detail::sidecar("scaling", c);
    if (c.output.csv) {
        io::atomic_write(dir / "scaling.csv", csv.text());
        meta["files"].push_back("scaling.csv");
    }
    // The verdict is the command's main result and is always written.
    io::write_json(dir / "verdict.json", verdict);
    meta["files"].push_back("verdict.json");
    if (c.output.json) io::write_json(dir / "scaling.json", meta);

    for (const auto& curve : curves)
        for (std::size_t i = 0; i < curve.size(); ++i)
            detail::say(o, "scaling: {} q={:g} tau_hat {:.6f} +- {:.2e}", to_string(curve.source), curve.q[i],
                        curve.tau_hat[i], curve.std_error[i]);
    detail::say(o, "scaling: intermittent={}", verdict["intermittent"].get<bool>());
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
    std::string name;
    double value = 0.0;
    double target = 0.0;
    /// Allowed |value - target|.
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<Check> checks;

    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
};

namespace detail {

inline Check within(std::string name, double value, double target, double tolerance) {
    const bool ok = std::isfinite(value) && std::abs(value - target) <= tolerance;
    return {std::move(name), value, target, tolerance, ok, {}};
}

inline Check statistical(std::string name, const stats::Estimate& e, double target, double sigmas) {
    auto c = within(std::move(name), e.value, target, sigmas * e.std_error);
    c.detail = fmt::format("se={:.3e}", e.std_error);
    return c;
}

}  // namespace detail

/// Partition coverage and positivity, marginal cumulants, ACF, Riemann-sum
/// variance and kernel-route agreement for the configured experiment.
inline VerifyReport run_verification(const ExperimentConfig& c, unsigned threads = 0) {
    VerifyReport report;
    const auto& ec = c.ensemble;
    const auto& vc = c.verify;
    const TrawlGeometry geom(ec.trawl);
    const double leb = geom.leb();
    const auto lags = acf_lag_indices(c);

    const auto part = build_slice_partition(geom, ec.delta, ec.n);
    double worst = 0.0;
    for (int k = 0; k <= part.n; ++k) worst = std::max(worst, std::abs(part.coverage(k) - leb));
    report.checks.push_back(detail::within("partition_coverage", worst, 0.0, 1e-10));
    double smallest = part.boundary_survivor;
    for (const auto* v : {&part.interior, &part.boundary_exit, &part.interior_survivor})
        for (double m : *v) smallest = std::min(smallest, m);
    auto pos = detail::within("partition_positivity", smallest, 0.0, 0.0);
    pos.passed = smallest >= 0.0;
    report.checks.push_back(pos);

    const Ensemble ens = run_ensemble(ec, threads);
    report.checks.push_back(
        detail::statistical("marginal_mean", pooled_cumulant(ens, 1), leb * cumulant(ec.seed, 1), vc.sigmas));
    report.checks.push_back(
        detail::statistical("marginal_variance", pooled_cumulant(ens, 2), leb * cumulant(ec.seed, 2), vc.sigmas));
    for (int d : lags) {
        report.checks.push_back(detail::statistical(fmt::format("acf_lag_{:g}", d * ec.delta), empirical_acf(ens, d),
                                                    geom.correlation(d * ec.delta), vc.sigmas));
    }
    {
        std::vector<double> last(ens.replications());
        for (std::size_t r = 0; r < last.size(); ++r) last[r] = ens.xstar(r, static_cast<std::size_t>(ec.n));
        report.checks.push_back(detail::statistical("riemann_variance", stats::sample_cumulant(last, 2),
                                                    discrete_sum_variance(geom, ec.seed, ec.delta, ec.n),
                                                    vc.sigmas));
    }

    for (int m : vc.kernel_orders)
        for (double t : vc.kernel_times) {
            const std::string name = fmt::format("kernel_vs_closed_form_m{}_t{:g}", m, t);
            try {
                const double closed = integral_components(geom, m, t).sum();
                const double kernel = kernel_moment_integral(geom, m, t);
                const double rel = std::abs(kernel - closed) / std::abs(closed);
                auto chk = detail::within(name, rel, 0.0, vc.kernel_tolerance);
                chk.detail = fmt::format("closed={:.17g} kernel={:.17g}", closed, kernel);
                report.checks.push_back(chk);
            } catch (const QuadratureError& e) {
                report.checks.push_back({name, e.achieved(), 0.0, vc.kernel_tolerance, false, e.what()});
            }
        }
    return report;
}

inline int cmd_verify(const ExperimentConfig& c, const RunOptions& o = {}) {
    const auto dir = detail::output_dir(c, o);
    const auto report = run_verification(c, o.threads);

    io::CsvBuilder csv{"check", "value", "target", "tolerance", "pass"};
    io::json checks = io::json::array();
    for (const auto& k : report.checks) {
        csv.row(k.name, k.value, k.target, k.tolerance, k.passed ? "true" : "false");
        checks.push_back({{"check", k.name},
                          {"value", k.value},
                          {"target", k.target},
                          {"tolerance", k.tolerance},
                          {"pass", k.passed},
                          {"detail", k.detail}});
        detail::say(o, "{:<28} {:>24.17g} {:>24.17g} {:>11.3e}  {}", k.name, k.value, k.target, k.tolerance,
                    k.passed ? "PASS" : "FAIL");
    }
    auto meta = detail::sidecar("verify", c);
    meta["all_passed"] = report.all_passed();
    meta["checks"] = checks;
    if (c.output.csv) io::atomic_write(dir / "verify.csv", csv.text());
    if (c.output.json) io::write_json(dir / "verify.json", meta);
    detail::say(o, "verify: {}", report.all_passed() ? "all checks passed" : "some checks FAILED");
    return report.all_passed() ? kExitSuccess : kExitNumerical;
}

}  // namespace trawl
