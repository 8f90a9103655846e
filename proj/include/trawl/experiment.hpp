#pragma once

// Experiment configuration: one INI file describes one experiment.
//
//   [trawl]     family = gamma | exponential, alpha = ..., lambda = ...
//   [seed]      family = poisson | gamma | gaussian | inverse_gaussian, parameters, centered
//   [grid]      delta, n
//   [ensemble]  replications, master_seed, cell_budget
//   [analysis]  q_grid, orders, t_min, t_max, t_points, fit_window_decades, route, mc_points
//   [output]    directory, formats
//   [verify]    sigmas, acf_lags, kernel_orders, kernel_times, kernel_tolerance
//
// Lists are comma separated. Unknown sections or keys are rejected.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "trawl/errors.hpp"
#include "trawl/levy_seed.hpp"
#include "trawl/scaling_estimator.hpp"
#include "trawl/simulator.hpp"
#include "trawl/trawl_geometry.hpp"

namespace trawl {

enum class Route { Analytic, MonteCarlo, Both };

inline const char* to_string(Route r) {
    switch (r) {
        case Route::Analytic: return "analytic";
        case Route::MonteCarlo: return "monte_carlo";
        default: return "both";
    }
}

struct AnalysisConfig {
    std::vector<double> q_grid{2.0, 4.0};
    std::vector<int> orders{2, 4};
    double t_min = 1e3;
    double t_max = 1e4;
    int t_points = 20;
    double fit_window_decades = 1.0;
    Route route = Route::Analytic;
    /// Number of log-spaced grid indices used by the Monte Carlo fit.
    int mc_points = 20;

    std::vector<double> t_grid() const {
        std::vector<double> t(static_cast<std::size_t>(t_points));
        const double a = std::log(t_min), b = std::log(t_max);
        for (int i = 0; i < t_points; ++i) t[i] = std::exp(a + (b - a) * i / (t_points - 1));
        t.front() = t_min;
        t.back() = t_max;
        return t;
    }
};

struct OutputConfig {
    std::filesystem::path directory = "out";
    bool csv = true;
    bool json = true;
};

struct VerifyConfig {
    double sigmas = 4.0;
    /// ACF lags in time units; each must be a whole number of grid steps.
    std::vector<double> acf_lags{1.0, 2.0, 5.0};
    std::vector<int> kernel_orders{2, 3, 4};
    std::vector<double> kernel_times{1.0, 5.0, 20.0};
    double kernel_tolerance = 1e-6;
};

struct ExperimentConfig {
    EnsembleConfig ensemble;
    AnalysisConfig analysis;
    OutputConfig output;
    VerifyConfig verify;
};

namespace detail {

using boost::property_tree::ptree;

inline const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"trawl", {"family", "alpha", "lambda"}},
        {"seed", {"family", "nu", "shape", "rate", "mean", "variance", "delta", "gamma", "centered"}},
        {"grid", {"delta", "n"}},
        {"ensemble", {"replications", "master_seed", "cell_budget"}},
        {"analysis", {"q_grid", "orders", "t_min", "t_max", "t_points", "fit_window_decades", "route", "mc_points"}},
        {"output", {"directory", "formats"}},
        {"verify", {"sigmas", "acf_lags", "kernel_orders", "kernel_times", "kernel_tolerance"}},
    };
    return keys;
}

inline std::string trim(std::string s) {
    const auto ws = " \t\r\n";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return {};
    return s.substr(a, s.find_last_not_of(ws) - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("config: " + key + " = '" + text + "' is not a valid number");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw ConfigError("config: " + key + " must be finite");
    }
    return value;
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, item));
    if (out.empty()) throw ConfigError("config: " + key + " must not be empty");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("config: " + key + " = '" + text + "' is not a boolean");
}

class Section {
public:
    Section(const ptree* node, std::string name) : node_(node), name_(std::move(name)) {}

    bool present() const { return node_ != nullptr; }
    bool has(const std::string& key) const { return node_ && node_->get_child_optional(key); }

    std::string raw(const std::string& key) const {
        if (!has(key)) throw ConfigError("config: missing " + name_ + "." + key);
        return trim(node_->get<std::string>(key));
    }

    template <class T>
    T number(const std::string& key) const {
        return parse_number<T>(name_ + "." + key, raw(key));
    }
    template <class T>
    T number(const std::string& key, T fallback) const {
        return has(key) ? number<T>(key) : fallback;
    }
    template <class T>
    std::vector<T> list(const std::string& key, std::vector<T> fallback) const {
        return has(key) ? parse_list<T>(name_ + "." + key, raw(key)) : fallback;
    }

private:
    const ptree* node_;
    std::string name_;
};

inline TrawlSpec parse_trawl(const Section& s) {
    if (!s.present()) throw ConfigError("config: missing [trawl] section");
    const std::string family = s.raw("family");
    if (family == "gamma") return GammaTrawl{s.number<double>("alpha")};
    if (family == "exponential") return ExponentialTrawl{s.number<double>("lambda")};
    throw ConfigError("config: unknown trawl.family '" + family + "' (expected gamma or exponential)");
}

inline SeedSpec parse_seed(const Section& s) {
    if (!s.present()) throw ConfigError("config: missing [seed] section");
    const std::string family = s.raw("family");
    SeedSpec seed;
    if (family == "poisson") seed.family = PoissonSeed{s.number<double>("nu")};
    else if (family == "gamma") seed.family = GammaSeed{s.number<double>("shape"), s.number<double>("rate")};
    else if (family == "gaussian") seed.family = GaussianSeed{s.number<double>("mean"), s.number<double>("variance")};
    else if (family == "inverse_gaussian")
        seed.family = InverseGaussianSeed{s.number<double>("delta"), s.number<double>("gamma")};
    else
        throw ConfigError("config: unknown seed.family '" + family +
                          "' (expected poisson, gamma, gaussian or inverse_gaussian)");
    if (s.has("centered")) seed.centered = parse_bool("seed.centered", s.raw("centered"));
    return seed;
}

inline Route parse_route(const std::string& text) {
    if (text == "analytic") return Route::Analytic;
    if (text == "monte_carlo") return Route::MonteCarlo;
    if (text == "both") return Route::Both;
    throw ConfigError("config: analysis.route must be analytic, monte_carlo or both");
}

}  // namespace detail

/// Throws ConfigError on any inconsistency.
inline void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    try {
        TrawlGeometry geom(c.ensemble.trawl);
        validate(c.ensemble.seed);
    } catch (const DomainError& e) {
        fail(e.what());
    }
    const auto& e = c.ensemble;
    if (!(e.delta > 0.0)) fail("grid.delta must be positive");
    if (e.n < 1) fail("grid.n must be at least 1");
    if (e.replications < 1) fail("ensemble.replications must be positive");
    if (!(e.cell_budget > 0.0)) fail("ensemble.cell_budget must be positive");

    const auto& a = c.analysis;
    if (a.q_grid.empty()) fail("analysis.q_grid must not be empty");
    for (std::size_t i = 0; i < a.q_grid.size(); ++i) {
        if (!(a.q_grid[i] > 0.0)) fail("analysis.q_grid entries must be positive");
        if (i > 0 && !(a.q_grid[i] > a.q_grid[i - 1])) fail("analysis.q_grid must be strictly increasing");
    }
    if (a.route != Route::MonteCarlo)
        for (double q : a.q_grid)
            if (!is_even_integer(q)) fail("analysis.q_grid must hold even integers for the analytic route");
    for (int m : a.orders)
        if (m < 1) fail("analysis.orders entries must be at least 1");
    if (!(a.t_min > 0.0)) fail("analysis.t_min must be positive");
    if (!(a.t_max > a.t_min)) fail("analysis.t_max must exceed analysis.t_min");
    if (a.t_points < 2) fail("analysis.t_points must be at least 2");
    if (!(a.fit_window_decades > 0.0)) fail("analysis.fit_window_decades must be positive");
    if (a.t_max / a.t_min < 10.0 * (1.0 - 1e-9)) fail("analysis t-range must span at least one decade");
    {
        const auto t = a.t_grid();
        const double lo = a.t_max / std::pow(10.0, a.fit_window_decades) * (1.0 - 1e-12);
        const auto in_window = std::count_if(t.begin(), t.end(), [&](double x) { return x >= lo; });
        if (in_window < 8) fail("analysis fit window must contain at least 8 t-points");
    }
    if (a.mc_points < 8) fail("analysis.mc_points must be at least 8");

    const auto& v = c.verify;
    if (!(v.sigmas > 0.0)) fail("verify.sigmas must be positive");
    if (!(v.kernel_tolerance > 0.0)) fail("verify.kernel_tolerance must be positive");
    for (double h : v.acf_lags)
        if (!(h >= 0.0)) fail("verify.acf_lags must be nonnegative");
    for (int m : v.kernel_orders)
        if (m < 1) fail("verify.kernel_orders entries must be at least 1");
    for (double t : v.kernel_times)
        if (!(t > 0.0)) fail("verify.kernel_times entries must be positive");
}

/// Grid index of each ACF lag; the lags must be whole multiples of delta
/// inside the simulated horizon. Only the verify command needs this.
inline std::vector<int> acf_lag_indices(const ExperimentConfig& c) {
    std::vector<int> out;
    for (double h : c.verify.acf_lags) {
        const double d = std::round(h / c.ensemble.delta);
        if (std::abs(d * c.ensemble.delta - h) > 1e-9 * std::max(1.0, h))
            throw ConfigError("config: verify.acf_lags must be multiples of grid.delta");
        if (d > c.ensemble.n) throw ConfigError("config: verify.acf_lags exceed the grid length n * delta");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

/// Parses INI text. `[trawl]` and `[seed]` are mandatory; other sections
/// fall back to the defaults above.
inline ExperimentConfig parse_config(std::istream& in) {
    using detail::ptree;
    ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    const auto& known = detail::known_keys();
    for (const auto& [name, node] : tree) {
        const auto it = known.find(name);
        if (it == known.end()) throw ConfigError("config: unknown section or top-level key '" + name + "'");
        if (node.empty()) throw ConfigError("config: '" + name + "' must be a section");
        for (const auto& [key, value] : node)
            if (!it->second.count(key)) throw ConfigError("config: unknown key " + name + "." + key);
    }
    auto section = [&](const std::string& name) {
        const auto child = tree.get_child_optional(name);
        return detail::Section(child ? &*child : nullptr, name);
    };

    ExperimentConfig c;
    c.ensemble.trawl = detail::parse_trawl(section("trawl"));
    c.ensemble.seed = detail::parse_seed(section("seed"));

    const auto grid = section("grid");
    c.ensemble.delta = grid.number<double>("delta", c.ensemble.delta);
    c.ensemble.n = grid.number<int>("n", c.ensemble.n);

    const auto ens = section("ensemble");
    c.ensemble.replications = ens.number<int>("replications", c.ensemble.replications);
    c.ensemble.master_seed = ens.number<std::uint64_t>("master_seed", c.ensemble.master_seed);
    c.ensemble.cell_budget = ens.number<double>("cell_budget", c.ensemble.cell_budget);

    const auto an = section("analysis");
    auto& a = c.analysis;
    a.q_grid = an.list<double>("q_grid", a.q_grid);
    a.orders = an.list<int>("orders", a.orders);
    a.t_min = an.number<double>("t_min", a.t_min);
    a.t_max = an.number<double>("t_max", a.t_max);
    a.t_points = an.number<int>("t_points", a.t_points);
    a.fit_window_decades = an.number<double>("fit_window_decades", a.fit_window_decades);
    if (an.has("route")) a.route = detail::parse_route(an.raw("route"));
    a.mc_points = an.number<int>("mc_points", a.mc_points);

    const auto out = section("output");
    if (out.has("directory")) c.output.directory = out.raw("directory");
    if (out.has("formats")) {
        c.output.csv = c.output.json = false;
        std::stringstream ss(out.raw("formats"));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = detail::trim(item);
            if (item == "csv") c.output.csv = true;
            else if (item == "json") c.output.json = true;
            else throw ConfigError("config: unknown output format '" + item + "'");
        }
    }

    const auto ver = section("verify");
    auto& v = c.verify;
    v.sigmas = ver.number<double>("sigmas", v.sigmas);
    v.acf_lags = ver.list<double>("acf_lags", v.acf_lags);
    v.kernel_orders = ver.list<int>("kernel_orders", v.kernel_orders);
    v.kernel_times = ver.list<double>("kernel_times", v.kernel_times);
    v.kernel_tolerance = ver.number<double>("kernel_tolerance", v.kernel_tolerance);

    validate(c);
    return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    return parse_config(in);
}

}  // namespace trawl
