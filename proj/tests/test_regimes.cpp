#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "gatedpore/errors.hpp"
#include "gatedpore/regimes.hpp"
#include "support/families.hpp"

using namespace gatedpore;
using namespace gatedpore::regimes;

namespace {

// Example family: eps = sqrt(D1 tau), D1 = tau^(1/2), sigma_tau = tau^2,
// sigma_eps = tau so that sigma_eps / sqrt(D1 sigma_tau) = tau^(-1/4).
ScalingFamily example_family()
{
    ScalingFamily fam;
    fam.N = 2;
    fam.D1 = {1.0, Rational(1, 2)};
    fam.eps = {1.0, Rational(3, 4)};
    fam.sigma_tau = {1.0, Rational(2)};
    fam.sigma_eps = {1.0, Rational(1)};
    return fam;
}

// Numeric slope of log(f) against log(tau) between tau = 1e-4 and 1e-8.
template <class F>
double numeric_exponent(F f)
{
    return (std::log(f(1e-8)) - std::log(f(1e-4))) / (std::log(1e-8) - std::log(1e-4));
}

} // namespace

TEST(Rational, ParseAndArithmetic)
{
    EXPECT_EQ(Rational::parse("3"), Rational(3));
    EXPECT_EQ(Rational::parse("-1/4"), Rational(-1, 4));
    EXPECT_EQ(Rational::parse("0.25"), Rational(1, 4));
    EXPECT_EQ(Rational::parse("-.5"), Rational(-1, 2));
    EXPECT_EQ(Rational::parse("6/-8"), Rational(-3, 4));
    EXPECT_THROW(Rational::parse("abc"), ConfigError);
    EXPECT_THROW(Rational::parse("1x"), ConfigError);
    EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
    EXPECT_EQ(Rational(1, 3) - Rational(1, 2), Rational(-1, 6));
    EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
    EXPECT_EQ(Rational(2, 3) / Rational(4, 9), Rational(3, 2));
    EXPECT_LT(Rational(1, 3), Rational(1, 2));
    EXPECT_EQ(Rational(-3, 4).str(), "-3/4");
    EXPECT_THROW(Rational(1, 0), NumericalError);
    EXPECT_THROW(Rational(1) / Rational(0), NumericalError);
    EXPECT_THROW(Rational(std::numeric_limits<std::int64_t>::max(), 1) + Rational(1), NumericalError);
}

TEST(Classify, ExampleFamilyIsFastForPotassium)
{
    const auto fam = example_family();
    const auto rep = classify(fam, Species::Potassium);
    EXPECT_EQ(rep.pore_case, PoreCase::Fast);
    EXPECT_EQ(rep.pore_ratio.exponent, Rational(-1, 4));
    const double slope = numeric_exponent([&](double t) {
        return fam.sigma_eps.at(t) / std::sqrt(fam.D1.at(t) * fam.sigma_tau.at(t));
    });
    EXPECT_NEAR(slope, -0.25, 1e-9);
    EXPECT_EQ(rep.l_name, "l_fK");
}

TEST(Classify, ExampleFamilyIsSmallForSodium)
{
    const auto fam = example_family();
    const auto rep = classify(fam, Species::Sodium);
    EXPECT_EQ(rep.pore_case, PoreCase::Small);
    EXPECT_EQ(rep.pore_ratio.exponent, Rational(0));
    const double slope = numeric_exponent([&](double t) { return fam.sigma_eps.at(t) / std::sqrt(fam.sigma_tau.at(t)); });
    EXPECT_NEAR(slope, 0.0, 1e-9);
    EXPECT_EQ(rep.l_name, "l_sNa");
}

TEST(Classify, LimitKinds)
{
    // fast pores with l_fK = sqrt(sigma_tau) / (sqrt(D1) tau) * sigma_eps / eps
    ScalingFamily fam;
    fam.N = 2;
    fam.D1 = {1.0, Rational(1, 2)};
    fam.eps = {1.0, Rational(3, 4)};
    fam.sigma_tau = {4.0, Rational(2)};
    fam.sigma_eps = {0.5, Rational(1)}; // l exponent 1 - 1/4 - 1 + 1 - 3/4 = 0
    auto rep = classify(fam, Species::Potassium);
    EXPECT_EQ(rep.regime, Regime::Fast);
    EXPECT_EQ(rep.l.kind, LimitKind::Finite);
    EXPECT_DOUBLE_EQ(rep.l.value, 2.0 * 0.5);
    EXPECT_FALSE(rep.rho.has_value());

    fam.sigma_eps.exponent = Rational(9, 8); // still fast, l -> 0
    rep = classify(fam, Species::Potassium);
    EXPECT_EQ(rep.regime, Regime::DegenerateNeumann);
    EXPECT_EQ(*rep.rho, 0.0);

    fam.sigma_eps.exponent = Rational(7, 8); // l -> infinity
    rep = classify(fam, Species::Potassium);
    EXPECT_EQ(rep.regime, Regime::DegenerateDirichlet);
    EXPECT_TRUE(std::isinf(*rep.rho));
}

TEST(Classify, GeometryGivesRho)
{
    ScalingFamily fam = example_family();
    fam.sigma_tau = {4.0, Rational(2)};
    fam.sigma_eps = {0.5, Rational(1)};
    ClassifyOptions opts;
    opts.geometry = PoreGeometry{1.5, 1.0, 1.0};
    const auto rep = classify(fam, Species::Potassium, opts);
    EXPECT_NEAR(*rep.rho, 2.0 / std::sqrt(std::numbers::pi) * 1.5 * 1.0, 1e-14);
}

TEST(Classify, LimitHypothesis)
{
    ClassifyOptions opts;
    opts.require_limit_hypothesis = true;
    EXPECT_NO_THROW(classify(example_family(), Species::Potassium, opts));
    ScalingFamily bad = example_family();
    bad.eps.exponent = Rational(2, 3);
    EXPECT_THROW(classify(bad, Species::Potassium, opts), ConfigError);
    EXPECT_NO_THROW(classify(bad, Species::Potassium));
}

TEST(Classify, RejectsInadmissibleFamilies)
{
    ScalingFamily fam = example_family();
    fam.sigma_tau = {2.0, Rational(1)};
    EXPECT_THROW(classify(fam, Species::Potassium), ConfigError);
    fam = example_family();
    fam.eps.exponent = Rational(0);
    EXPECT_THROW(classify(fam, Species::Potassium), ConfigError);
    fam = example_family();
    fam.N = 1;
    EXPECT_THROW(classify(fam, Species::Potassium), ConfigError);
}

TEST(Rho, Examples)
{
    const PoreGeometry unit{1.0, 1.0, 1.0};
    EXPECT_DOUBLE_EQ(rho(PoreCase::Small, Species::Potassium, Limit::finite(1.0), unit, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(rho(PoreCase::Small, Species::Sodium, Limit::finite(1.0), unit, 1.0), 1.0);
    EXPECT_NEAR(rho(PoreCase::Fast, Species::Sodium, Limit::finite(1.0), unit, 4.0), 0.5641895835477563, 1e-15);
    const PoreGeometry two{2.0, 1.0, 1.0};
    EXPECT_THROW(rho(PoreCase::Fast, Species::Potassium, Limit::zero(), two, 1.0), NumericalError);
    EXPECT_THROW(rho(PoreCase::Fast, Species::Potassium, Limit::infinite(), two, 1.0), NumericalError);
}

TEST(Rho1D, Examples)
{
    const auto robin = rho_1d(1.0);
    EXPECT_EQ(robin.kind, BoundaryKind::Robin);
    EXPECT_NEAR(robin.rho1, 1.1283791670955126, 1e-15);
    EXPECT_NEAR(robin.effective_ratio(1.0, 0.1), 3.568, 5e-4);
    EXPECT_EQ(rho_1d(0.0).kind, BoundaryKind::Neumann);
    EXPECT_EQ(rho_1d(0.0).effective_ratio(1.0, 0.1), 0.0);
    EXPECT_EQ(rho_1d(std::numeric_limits<double>::infinity()).kind, BoundaryKind::Dirichlet);
    EXPECT_THROW(rho_1d(-1.0), ConfigError);
    const double mu = 1.7;
    EXPECT_NEAR(rho_1d(mu).rho1, 2.0 * mu / std::sqrt(std::numbers::pi), 1e-15);
}

TEST(Rho1D, PotassiumOverSodiumIsDiffusivityRatio)
{
    for (double D1 : {0.1, 0.25, 0.5}) {
        const auto r = rho_1d(1.0);
        EXPECT_NEAR(r.effective_ratio(1.0, D1) / r.effective_ratio(1.0, 1.0), std::sqrt(1.0 / D1), 1e-12);
    }
}

TEST(SodiumComparison, SodiumVanishesUnderPotassiumFast)
{
    std::mt19937_64 rng(11);
    int checked = 0;
    while (checked < 200) {
        const auto fam = testsupport::random_fast(rng);
        if (!fam) continue;
        const auto k = classify(*fam, Species::Potassium);
        ASSERT_EQ(k.pore_case, PoreCase::Fast);
        ASSERT_EQ(k.l.kind, LimitKind::Finite);
        EXPECT_EQ(classify(*fam, Species::Sodium).l.kind, LimitKind::Zero);
        ++checked;
    }
}

TEST(SodiumComparison, SmallPoresGiveEqualLimits)
{
    std::mt19937_64 rng(12);
    int checked = 0;
    while (checked < 200) {
        const auto fam = testsupport::random_small(rng);
        if (!fam) continue;
        const auto k = classify(*fam, Species::Potassium);
        ASSERT_EQ(k.pore_case, PoreCase::Small);
        ASSERT_EQ(k.l.kind, LimitKind::Finite);
        const auto na = classify(*fam, Species::Sodium);
        EXPECT_EQ(na.pore_case, PoreCase::Small);
        EXPECT_EQ(na.l_law.exponent, k.l_law.exponent);
        EXPECT_EQ(na.l.value, k.l.value);
        ++checked;
    }
}

TEST(Report, KeyValueLines)
{
    const std::string text = format_report(classify(example_family(), Species::Potassium));
    EXPECT_NE(text.find("pore_case=fast\n"), std::string::npos);
    EXPECT_NE(text.find("rho=unset\n"), std::string::npos);
}
