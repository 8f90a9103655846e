#pragma once

// Infinitely divisible seed laws L(1) of a homogeneous Levy basis.
// Lambda(C) for a cell of Lebesgue measure v has cumulant function v * kappa(zeta),
// so every admitted family is closed under convolution in v.

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "trawl/errors.hpp"

namespace trawl {

struct PoissonSeed {
    double nu;
};

struct GammaSeed {
    double shape;
    double rate;
};

/// Brownian seed with drift a and variance b per unit measure. b = 0 is
/// accepted (degenerate but still infinitely divisible).
struct GaussianSeed {
    double mean;
    double variance;
};

/// Inverse Gaussian IG(delta, gamma) with kappa(zeta) = delta (gamma - sqrt(gamma^2 - 2 i zeta)).
struct InverseGaussianSeed {
    double delta;
    double gamma;
};

using SeedFamily = std::variant<PoissonSeed, GammaSeed, GaussianSeed, InverseGaussianSeed>;

struct SeedSpec {
    SeedFamily family;
    /// Subtract the mean G(0) kappa_1 in downstream trajectories.
    bool centered = true;
};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string family_name(const SeedSpec& seed) {
    return std::visit(overloaded{[](const PoissonSeed&) { return std::string("poisson"); },
                                 [](const GammaSeed&) { return std::string("gamma"); },
                                 [](const GaussianSeed&) { return std::string("gaussian"); },
                                 [](const InverseGaussianSeed&) {
                                     return std::string("inverse_gaussian");
                                 }},
                      seed.family);
}

inline bool is_gaussian(const SeedSpec& seed) {
    return std::holds_alternative<GaussianSeed>(seed.family);
}

inline void validate(const SeedSpec& seed) {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    std::visit(overloaded{
                   [&](const PoissonSeed& p) {
                       if (!positive(p.nu)) throw DomainError("poisson seed: nu must be positive");
                   },
                   [&](const GammaSeed& p) {
                       if (!positive(p.shape) || !positive(p.rate))
                           throw DomainError("gamma seed: shape and rate must be positive");
                   },
                   [&](const GaussianSeed& p) {
                       if (!std::isfinite(p.mean) || !(p.variance >= 0.0) ||
                           !std::isfinite(p.variance))
                           throw DomainError("gaussian seed: variance must be nonnegative");
                   },
                   [&](const InverseGaussianSeed& p) {
                       if (!positive(p.delta) || !positive(p.gamma))
                           throw DomainError("inverse gaussian seed: delta and gamma must be positive");
                   }},
               seed.family);
}

/// log E exp(i zeta L(1)).
inline std::complex<double> cumulant_function(const SeedSpec& seed, double zeta) {
    using namespace std::complex_literals;
    return std::visit(
        overloaded{
            [&](const PoissonSeed& p) -> std::complex<double> {
                return p.nu * (std::exp(1i * zeta) - 1.0);
            },
            [&](const GammaSeed& p) -> std::complex<double> {
                return -p.shape * std::log(1.0 - 1i * zeta / p.rate);
            },
            [&](const GaussianSeed& p) -> std::complex<double> {
                return 1i * p.mean * zeta - 0.5 * p.variance * zeta * zeta;
            },
            [&](const InverseGaussianSeed& p) -> std::complex<double> {
                return p.delta * (p.gamma - std::sqrt(p.gamma * p.gamma - 2.0i * zeta));
            }},
        seed.family);
}

/// m-th cumulant of L(1).
inline double cumulant(const SeedSpec& seed, int m) {
    if (m < 1) throw DomainError("cumulant: order must be positive");
    return std::visit(
        overloaded{
            [&](const PoissonSeed& p) { return p.nu; },
            [&](const GammaSeed& p) {
                return p.shape * std::tgamma(static_cast<double>(m)) / std::pow(p.rate, m);
            },
            [&](const GaussianSeed& p) {
                if (m == 1) return p.mean;
                if (m == 2) return p.variance;
                return 0.0;
            },
            [&](const InverseGaussianSeed& p) {
                // (2m - 3)!! delta gamma^(1 - 2m)
                double dfact = 1.0;
                for (int k = 2 * m - 3; k > 1; k -= 2) dfact *= k;
                return dfact * p.delta * std::pow(p.gamma, 1 - 2 * m);
            }},
        seed.family);
}

/// kappa_1 .. kappa_m of L(1).
inline std::vector<double> cumulants(const SeedSpec& seed, int m) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(m, 0)));
    for (int k = 1; k <= m; ++k) out.push_back(cumulant(seed, k));
    return out;
}

/// E Lambda(C) for Leb(C) = leb.
inline double patch_mean(const SeedSpec& seed, double leb) { return leb * cumulant(seed, 1); }

/// Inverse Gaussian with mean mu and shape lambda, sampled by the
/// transformation-with-multiple-roots method of Michael, Schucany and Haas.
class inverse_gaussian_distribution {
public:
    inverse_gaussian_distribution(double mu, double lambda) : mu_(mu), lambda_(lambda) {}

    template <class Rng>
    double operator()(Rng& rng) {
        const double n = normal_(rng);
        const double a = mu_ * n * n;
        // x = mu + mu a/(2 lambda) - mu/(2 lambda) sqrt(4 mu lambda y + a^2), without cancellation.
        const double x = mu_ - 2.0 * mu_ * a / (a + std::sqrt(a * a + 4.0 * lambda_ * a));
        if (uniform_(rng) * (mu_ + x) <= mu_) return x;
        return mu_ * mu_ / x;
    }

private:
    double mu_;
    double lambda_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Draws Lambda(C) for a fixed cell measure; parameters are set up once so
/// the simulator can reuse one sampler along a whole diagonal of cells.
class PatchSampler {
public:
    PatchSampler(const SeedSpec& seed, double leb) {
        if (!(leb >= 0.0) || !std::isfinite(leb)) throw DomainError("patch sampler: measure must be nonnegative");
        if (leb == 0.0) return;  // empty cell, dist_ stays Empty
        std::visit(overloaded{
                       [&](const PoissonSeed& p) {
                           dist_ = std::poisson_distribution<long long>(p.nu * leb);
                       },
                       [&](const GammaSeed& p) {
                           dist_ = std::gamma_distribution<double>(p.shape * leb, 1.0 / p.rate);
                       },
                       [&](const GaussianSeed& p) {
                           if (p.variance == 0.0)
                               dist_ = Constant{p.mean * leb};
                           else
                               dist_ = std::normal_distribution<double>(p.mean * leb,
                                                                        std::sqrt(p.variance * leb));
                       },
                       [&](const InverseGaussianSeed& p) {
                           const double d = p.delta * leb;
                           dist_ = inverse_gaussian_distribution(d / p.gamma, d * d);
                       }},
                   seed.family);
    }

    template <class Rng>
    double operator()(Rng& rng) {
        return std::visit(overloaded{[](Empty) { return 0.0; },
                                     [](Constant c) { return c.value; },
                                     [&](auto& d) { return static_cast<double>(d(rng)); }},
                          dist_);
    }

private:
    struct Empty {};
    struct Constant {
        double value;
    };
    std::variant<Empty, Constant, std::poisson_distribution<long long>, std::gamma_distribution<double>,
                 std::normal_distribution<double>, inverse_gaussian_distribution>
        dist_;
};

/// One draw of Lambda(C) for a cell of Lebesgue measure leb (uncentered).
template <class Rng>
double sample_patch(const SeedSpec& seed, double leb, Rng& rng) {
    if (!(leb >= 0.0)) throw DomainError("sample_patch: measure must be nonnegative");
    PatchSampler sampler(seed, leb);
    return sampler(rng);
}

}  // namespace trawl
