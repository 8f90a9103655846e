#pragma once

// Trawl functions g and the deterministic geometry of the trawl set
// A = {(xi, s) : s <= 0, 0 <= xi <= g(-s)}.

#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "trawl/errors.hpp"
#include "trawl/quadrature.hpp"

namespace trawl {

/// g(x) = (1 + x)^(-alpha - 1); regularly varying of index -(alpha + 1),
/// long memory for alpha in (0, 1).
struct GammaTrawl {
    double alpha;
};

/// g(x) = exp(-lambda x); short-memory control.
struct ExponentialTrawl {
    double lambda;
};

using TrawlSpec = std::variant<GammaTrawl, ExponentialTrawl>;

inline std::string family_name(const TrawlSpec& spec) {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GammaTrawl>) return "gamma";
            else return "exponential";
        },
        spec);
}

class TrawlGeometry {
public:
    explicit TrawlGeometry(TrawlSpec spec, quad::Tolerance tol = {1e-12, 1e-10, 20})
        : spec_(spec), tol_(tol) {
        std::visit(
            [](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, GammaTrawl>) {
                    if (!(f.alpha > 0.0) || !std::isfinite(f.alpha))
                        throw DomainError("gamma trawl: alpha must be positive and finite");
                } else {
                    if (!(f.lambda > 0.0) || !std::isfinite(f.lambda))
                        throw DomainError("exponential trawl: lambda must be positive and finite");
                }
            },
            spec_);
        leb_ = tail_mass(0.0);
    }

    const TrawlSpec& spec() const noexcept { return spec_; }
    const quad::Tolerance& tolerance() const noexcept { return tol_; }

    /// Lebesgue measure of the trawl set, G(0).
    double leb() const noexcept { return leb_; }

    /// g(0), the height of the trawl.
    double height() const noexcept { return 1.0; }

    /// Tail index alpha when g is regularly varying with index -(alpha + 1).
    std::optional<double> tail_index() const noexcept {
        if (auto* f = std::get_if<GammaTrawl>(&spec_)) return f->alpha;
        return std::nullopt;
    }

    double g(double x) const {
        if (!(x >= 0.0)) throw DomainError("trawl function: argument must be nonnegative");
        return g_unchecked(x);
    }

    /// Solves g(x) = xi for xi in (0, g(0)].
    double inverse(double xi) const {
        if (!(xi > 0.0) || xi > height())
            throw DomainError("trawl inverse: level must lie in (0, g(0)]");
        if (xi == height()) return 0.0;
        return std::visit(
            [xi](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, GammaTrawl>)
                    return std::pow(xi, -1.0 / (f.alpha + 1.0)) - 1.0;
                else
                    return -std::log(xi) / f.lambda;
            },
            spec_);
    }

    /// G(h) = integral of g over [h, infinity).
    double tail_mass(double h) const {
        if (!(h >= 0.0)) throw DomainError("tail mass: lag must be nonnegative");
        return tail_mass_unchecked(h);
    }

    /// G(h) by adaptive quadrature; cross-check for the closed form.
    double tail_mass_quadrature(double h) const {
        if (!(h >= 0.0)) throw DomainError("tail mass: lag must be nonnegative");
        return quad::integrate_to_infinity([this](double x) { return g_unchecked(x); }, h, tol_)
            .value;
    }

    /// r(h) = G(h) / G(0).
    double correlation(double h) const {
        if (!(h >= 0.0)) throw DomainError("correlation: lag must be nonnegative");
        if (auto* f = std::get_if<GammaTrawl>(&spec_)) return std::pow(1.0 + h, -f->alpha);
        return tail_mass_unchecked(h) / leb_;
    }

    /// Karamata asymptote L(h) h^(-alpha) / (alpha G(0)) of the correlation,
    /// with L(h) = h^(alpha + 1) g(h) the slowly varying part of g.
    double karamata_asymptote(double h) const {
        const auto alpha = tail_index();
        if (!alpha)
            throw UnsupportedFamily("karamata asymptote: trawl function is not regularly varying");
        if (!(h > 0.0)) throw DomainError("karamata asymptote: lag must be positive");
        const double slowly_varying = std::pow(h, *alpha + 1.0) * g_unchecked(h);
        return slowly_varying * std::pow(h, -*alpha) / (*alpha * leb_);
    }

    double g_unchecked(double x) const noexcept {
        return std::visit(
            [x](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, GammaTrawl>)
                    return std::pow(1.0 + x, -f.alpha - 1.0);
                else
                    return std::exp(-f.lambda * x);
            },
            spec_);
    }

    double tail_mass_unchecked(double h) const noexcept {
        return std::visit(
            [h](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, GammaTrawl>)
                    return std::pow(1.0 + h, -f.alpha) / f.alpha;
                else
                    return std::exp(-f.lambda * h) / f.lambda;
            },
            spec_);
    }

private:
    TrawlSpec spec_;
    quad::Tolerance tol_;
    double leb_ = 0.0;
};

}  // namespace trawl
