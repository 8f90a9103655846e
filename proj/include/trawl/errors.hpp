#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace trawl {

/// Argument outside the mathematical domain of an operation (negative lag,
/// level above g(0), nonpositive grid step, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Operation requested for a family that does not support it.
class UnsupportedFamily : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved, double requested)
        : std::runtime_error(what + " (achieved error " + sci(achieved) + ", requested " + sci(requested) + ")"),
          achieved_(achieved),
          requested_(requested) {}

    double achieved() const noexcept { return achieved_; }
    double requested() const noexcept { return requested_; }

private:
    static std::string sci(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", v);
        return buf;
    }

    double achieved_;
    double requested_;
};

/// Ensemble size exceeds the configured cell budget (n^2 * R).
class BudgetError : public std::runtime_error {
public:
    BudgetError(const std::string& what, long long suggested_n)
        : std::runtime_error(what), suggested_n_(suggested_n) {}

    long long suggested_n() const noexcept { return suggested_n_; }

private:
    long long suggested_n_;
};

/// Invalid or incomplete experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace trawl
