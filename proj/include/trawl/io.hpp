#pragma once

// CSV and JSON output. Floats are printed with 17 significant digits and
// every file is written to a temporary sibling first, then renamed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "trawl/errors.hpp"
#include "trawl/experiment.hpp"

namespace trawl::io {

using json = nlohmann::ordered_json;

inline std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

/// Writes `content` to `path` via a temporary file in the same directory and
/// an atomic rename, so readers never observe a partial file.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

inline void write_json(const std::filesystem::path& path, const json& doc) { atomic_write(path, doc.dump(2) + "\n"); }

/// Incremental CSV text with a fixed column order.
class CsvBuilder {
public:
    explicit CsvBuilder(std::initializer_list<std::string_view> header) {
        bool first = true;
        for (auto h : header) {
            if (!first) buf_.push_back(',');
            buf_.append(h.begin(), h.end());
            first = false;
        }
        buf_.push_back('\n');
    }

    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((append(cells, first)), ...);
        buf_.push_back('\n');
        ++rows_;
    }

    std::string_view text() const { return {buf_.data(), buf_.size()}; }
    std::size_t rows() const { return rows_; }

private:
    template <class T>
    void append(const T& cell, bool& first) {
        if (!first) buf_.push_back(',');
        first = false;
        if constexpr (std::is_floating_point_v<T>) fmt::format_to(std::back_inserter(buf_), "{:.17g}", cell);
        else fmt::format_to(std::back_inserter(buf_), "{}", cell);
    }

    fmt::memory_buffer buf_;
    std::size_t rows_ = 0;
};

inline json to_json(const TrawlSpec& spec) {
    json j;
    j["family"] = family_name(spec);
    std::visit(overloaded{[&](const GammaTrawl& g) { j["alpha"] = g.alpha; },
                          [&](const ExponentialTrawl& e) { j["lambda"] = e.lambda; }},
               spec);
    return j;
}

inline json to_json(const SeedSpec& seed) {
    json j;
    j["family"] = family_name(seed);
    std::visit(overloaded{[&](const PoissonSeed& p) { j["nu"] = p.nu; },
                          [&](const GammaSeed& p) {
                              j["shape"] = p.shape;
                              j["rate"] = p.rate;
                          },
                          [&](const GaussianSeed& p) {
                              j["mean"] = p.mean;
                              j["variance"] = p.variance;
                          },
                          [&](const InverseGaussianSeed& p) {
                              j["delta"] = p.delta;
                              j["gamma"] = p.gamma;
                          }},
               seed.family);
    j["centered"] = seed.centered;
    return j;
}

/// Echo of the experiment. Thread count and output directory are left out so
/// that the sidecar depends only on what determines the results.
inline json to_json(const ExperimentConfig& c) {
    json j;
    j["trawl"] = to_json(c.ensemble.trawl);
    j["seed"] = to_json(c.ensemble.seed);
    j["grid"] = {{"delta", c.ensemble.delta}, {"n", c.ensemble.n}};
    j["ensemble"] = {{"replications", c.ensemble.replications},
                     {"master_seed", c.ensemble.master_seed},
                     {"cell_budget", c.ensemble.cell_budget}};
    const auto& a = c.analysis;
    j["analysis"] = {{"q_grid", a.q_grid},
                     {"orders", a.orders},
                     {"t_min", a.t_min},
                     {"t_max", a.t_max},
                     {"t_points", a.t_points},
                     {"fit_window_decades", a.fit_window_decades},
                     {"route", to_string(a.route)},
                     {"mc_points", a.mc_points}};
    const auto& v = c.verify;
    j["verify"] = {{"sigmas", v.sigmas},
                   {"acf_lags", v.acf_lags},
                   {"kernel_orders", v.kernel_orders},
                   {"kernel_times", v.kernel_times},
                   {"kernel_tolerance", v.kernel_tolerance}};
    return j;
}

}  // namespace trawl::io
