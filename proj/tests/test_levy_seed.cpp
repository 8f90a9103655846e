#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trawl/levy_seed.hpp"
#include "trawl/statistics.hpp"

using namespace trawl;

namespace {

std::vector<SeedSpec> all_families() {
    return {SeedSpec{PoissonSeed{1.5}}, SeedSpec{GammaSeed{2.0, 1.5}}, SeedSpec{GaussianSeed{0.3, 2.0}},
            SeedSpec{InverseGaussianSeed{1.2, 2.0}}};
}

}  // namespace

TEST(CumulantFunction, VanishesAtZero) {
    for (const auto& s : all_families()) EXPECT_EQ(std::abs(cumulant_function(s, 0.0)), 0.0) << family_name(s);
}

TEST(CumulantFunction, Examples) {
    const auto k = cumulant_function(SeedSpec{PoissonSeed{1.0}}, std::numbers::pi);
    EXPECT_NEAR(k.real(), -2.0, 1e-15);
    EXPECT_NEAR(k.imag(), 0.0, 1e-15);
    const auto g = cumulant_function(SeedSpec{GaussianSeed{0.0, 1.0}}, 2.0);
    EXPECT_EQ(g.real(), -2.0);
    EXPECT_EQ(g.imag(), 0.0);
}

TEST(CumulantFunction, MatchesEmpiricalCharacteristicFunction) {
    // log of the sample mean of exp(i zeta N), N ~ Poisson(1), at zeta = pi.
    std::mt19937_64 rng(3);
    std::poisson_distribution<int> pois(1.0);
    std::complex<double> acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += std::exp(std::complex<double>(0.0, std::numbers::pi * pois(rng)));
    const auto emp = std::log(acc / static_cast<double>(n));
    EXPECT_NEAR(emp.real(), -2.0, 0.05);
}

TEST(CumulantFunction, NonpositiveRealPart) {
    for (const auto& s : all_families())
        for (double z = -20.0; z <= 20.0; z += 0.37) EXPECT_LE(cumulant_function(s, z).real(), 1e-15) << family_name(s);
}

TEST(Cumulant, Examples) {
    EXPECT_EQ(cumulant(SeedSpec{PoissonSeed{1.0}}, 4), 1.0);
    EXPECT_NEAR(cumulant(SeedSpec{GammaSeed{2.0, 1.0}}, 3), 4.0, 1e-14);
    EXPECT_EQ(cumulant(SeedSpec{GaussianSeed{0.0, 1.0}}, 3), 0.0);
}

TEST(Cumulant, KnownClosedForms) {
    const SeedSpec ig{InverseGaussianSeed{2.0, 3.0}};
    EXPECT_NEAR(cumulant(ig, 1), 2.0 / 3.0, 1e-15);              // delta / gamma
    EXPECT_NEAR(cumulant(ig, 2), 2.0 / 27.0, 1e-15);             // delta / gamma^3
    EXPECT_NEAR(cumulant(ig, 3), 3.0 * 2.0 / 243.0, 1e-15);      // 3 delta / gamma^5
    EXPECT_NEAR(cumulant(ig, 4), 15.0 * 2.0 / 2187.0, 1e-15);    // 15 delta / gamma^7
    EXPECT_THROW(cumulant(ig, 0), DomainError);
}

TEST(Cumulant, GaussianHigherOrdersVanish) {
    const SeedSpec g{GaussianSeed{1.0, 4.0}};
    for (int m = 3; m <= 12; ++m) EXPECT_EQ(cumulant(g, m), 0.0);
    EXPECT_EQ(cumulants(g, 2), (std::vector<double>{1.0, 4.0}));
}

TEST(Property, FiniteDifferencesReproduceCumulants) {
    using namespace std::complex_literals;
    for (const auto& s : all_families()) {
        auto f = [&](double z) { return cumulant_function(s, z); };
        std::complex<double> factor = 1.0;
        for (int m = 1; m <= 4; ++m) {
            factor *= -1i;  // (-i)^m
            const double fd = (factor * oracle::derivative_at_zero(f, m, 0.01)).real();
            const double exact = cumulant(s, m);
            if (exact == 0.0) EXPECT_NEAR(fd, 0.0, 1e-6) << family_name(s) << " m=" << m;
            else EXPECT_NEAR(fd, exact, 1e-5 * std::abs(exact)) << family_name(s) << " m=" << m;
        }
    }
}

TEST(Property, AnalyticityRadiusBounded) {
    // An analytic cumulant function has Taylor coefficients kappa_m / m! whose
    // m-th roots stay bounded (by the reciprocal convergence radius).
    for (const auto& s : all_families()) {
        double worst = 0.0;
        for (int m = 1; m <= 12; ++m)
            worst = std::max(worst, std::pow(std::abs(cumulant(s, m)) / std::tgamma(m + 1.0), 1.0 / m));
        EXPECT_LT(worst, 10.0) << family_name(s);
        EXPECT_TRUE(std::isfinite(worst));
    }
}

TEST(Validate, RejectsBadParameters) {
    EXPECT_THROW(validate(SeedSpec{PoissonSeed{0.0}}), DomainError);
    EXPECT_THROW(validate(SeedSpec{GammaSeed{1.0, -1.0}}), DomainError);
    EXPECT_THROW(validate(SeedSpec{GaussianSeed{0.0, -1.0}}), DomainError);
    EXPECT_THROW(validate(SeedSpec{InverseGaussianSeed{0.0, 1.0}}), DomainError);
    EXPECT_NO_THROW(validate(SeedSpec{GaussianSeed{0.0, 0.0}}));  // b = 0 is admitted
}

TEST(SamplePatch, EmptyCellIsZero) {
    std::mt19937_64 rng(1);
    for (const auto& s : all_families())
        for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_patch(s, 0.0, rng), 0.0);
}

TEST(SamplePatch, NegativeMeasureIsDomainError) {
    std::mt19937_64 rng(1);
    EXPECT_THROW(sample_patch(SeedSpec{PoissonSeed{1.0}}, -1.0, rng), DomainError);
}

TEST(SamplePatch, PoissonMean) {
    std::mt19937_64 rng(2);
    const int n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_patch(SeedSpec{PoissonSeed{2.0}}, 3.0, rng);
    const double se = std::sqrt(6.0 / n);
    EXPECT_NEAR(stats::mean_of(xs), 6.0, 4.0 * se);
}

TEST(SamplePatch, GammaVariance) {
    std::mt19937_64 rng(4);
    const int n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_patch(SeedSpec{GammaSeed{1.0, 1.0}}, 2.0, rng);
    const auto var = stats::sample_cumulant(xs, 2);
    EXPECT_NEAR(var.value, 2.0, 4.0 * var.std_error);
}

TEST(SamplePatch, DegenerateGaussianIsDeterministic) {
    std::mt19937_64 rng(5);
    EXPECT_EQ(sample_patch(SeedSpec{GaussianSeed{1.5, 0.0}}, 2.0, rng), 3.0);
}

TEST(SamplePatch, InverseGaussianMoments) {
    std::mt19937_64 rng(6);
    const SeedSpec s{InverseGaussianSeed{1.2, 2.0}};
    const double leb = 0.7;
    const int n = 200000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_patch(s, leb, rng);
    for (int m = 1; m <= 3; ++m) {
        const auto est = stats::sample_cumulant(xs, m);
        EXPECT_NEAR(est.value, leb * cumulant(s, m), 4.0 * est.std_error) << "m=" << m;
    }
    for (double x : xs) ASSERT_GT(x, 0.0);
}

TEST(PatchMean, Examples) {
    EXPECT_EQ(patch_mean(SeedSpec{PoissonSeed{1.0}}, 5.0), 5.0);
    EXPECT_EQ(patch_mean(SeedSpec{GaussianSeed{0.0, 1.0}}, 3.7), 0.0);
    EXPECT_DOUBLE_EQ(patch_mean(SeedSpec{GammaSeed{2.0, 4.0}}, 2.0), 1.0);
}

TEST(Property, ConvolutionClosure) {
    // Lambda(C1 u C2) against Lambda(C1) + Lambda(C2): first four sample
    // cumulants agree within 4 combined standard errors.
    const double l1 = 0.6, l2 = 1.1;
    const int n = 100000;
    std::uint64_t seed = 100;
    for (const auto& s : all_families()) {
        std::mt19937_64 rng(++seed);
        std::vector<double> whole(n), parts(n);
        for (int i = 0; i < n; ++i) {
            whole[i] = sample_patch(s, l1 + l2, rng);
            parts[i] = sample_patch(s, l1, rng) + sample_patch(s, l2, rng);
        }
        for (int m = 1; m <= 4; ++m) {
            const auto a = stats::sample_cumulant(whole, m), b = stats::sample_cumulant(parts, m);
            const double se = std::hypot(a.std_error, b.std_error);
            EXPECT_NEAR(a.value, b.value, 4.0 * se + 1e-12) << family_name(s) << " m=" << m;
        }
    }
}
