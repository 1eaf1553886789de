#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gatedpore/engine.hpp"
#include "gatedpore/errors.hpp"
#include "gatedpore/exact.hpp"
#include "support/chain.hpp"

using namespace gatedpore;

namespace {

DiscreteParams lattice(std::int64_t n0, std::int64_t n1, double r, std::int64_t tau_bar, std::int64_t sigma_bar,
                       std::int64_t M = 1)
{
    DiscreteParams d;
    d.n0 = n0;
    d.n1 = n1;
    d.r = r;
    d.tau_bar = tau_bar;
    d.sigma_bar = sigma_bar;
    d.M = M;
    return d;
}

} // namespace

TEST(Propagate, FirstRowFromSiteOne)
{
    for (double r : {0.0, 0.5, 0.9}) {
        const auto d = lattice(4, 2, r, 10, 2);
        const auto next = exact::propagate(exact::point_mass(d, 1), Phase::Closed, d);
        EXPECT_DOUBLE_EQ(next.mass[0], 0.5);
        EXPECT_DOUBLE_EQ(next.mass[1], 0.5);
        EXPECT_EQ(next.step, 1);
    }
}

TEST(Propagate, OpenBoundaryAbsorbsHalf)
{
    const auto d = lattice(4, 0, 0.0, 10, 2);
    const auto next = exact::propagate(exact::point_mass(d, 4), Phase::Open, d);
    EXPECT_DOUBLE_EQ(next.absorbed, 0.5);
    EXPECT_DOUBLE_EQ(next.mass[2], 0.5);
}

TEST(Propagate, StationaryIsClosedFixedPoint)
{
    for (double r : {0.0, 0.5, 0.9})
        for (std::int64_t n1 : {1, 3, 17}) {
            const auto d = lattice(11, n1, r, 10, 2);
            const auto start = exact::closed_stationary(d);
            auto dist = start;
            for (int k = 0; k < 500; ++k) dist = exact::propagate(dist, Phase::Closed, d);
            double residual = 0.0;
            for (std::size_t i = 0; i < start.mass.size(); ++i)
                residual = std::max(residual, std::fabs(dist.mass[i] - start.mass[i]));
            EXPECT_LE(residual, 1e-12) << "r=" << r << " n1=" << n1;
        }
}

TEST(Propagate, ConservesMassAndMatchesDenseChain)
{
    const testsupport::Lattice lat{6, 3, 0.75, 12, 3};
    const auto d = lattice(6, 3, 0.75, 12, 3);
    const auto po = testsupport::transition(lat, true);
    const auto pc = testsupport::transition(lat, false);
    auto dist = exact::point_mass(d, 2);
    std::vector<double> v(10, 0.0);
    v[1] = 1.0;
    double absorbed_prev = 0.0;
    for (int t = 0; t < 200; ++t) {
        const bool open = t % 12 < 3;
        dist = exact::propagate(dist, open ? Phase::Open : Phase::Closed, d);
        const auto& p = open ? po : pc;
        std::vector<double> w(v.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j) w[j] += v[i] * p[i][j];
        v = w;
        EXPECT_NEAR(dist.total(), 1.0, 1e-12);
        EXPECT_GE(dist.absorbed, absorbed_prev);
        absorbed_prev = dist.absorbed;
        for (std::size_t i = 0; i < dist.mass.size(); ++i) {
            EXPECT_GE(dist.mass[i], 0.0);
            EXPECT_NEAR(dist.mass[i], v[i], 1e-14);
        }
        EXPECT_NEAR(dist.absorbed, v.back(), 1e-14);
    }
    EXPECT_THROW(exact::propagate(exact::point_mass(lattice(5, 3, 0.75, 12, 3), 1), Phase::Open, d), ConfigError);
}

TEST(Observables, FrozenFixture)
{
    // Rational evaluation of the chain by an independent script:
    // E[F_1] = 7/40 exactly per walker.
    const auto d = lattice(3, 1, 0.5, 16, 2, 1);
    const auto rows = exact::expected_cycle_observables(d, 3);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_NEAR(rows[0].EF, 7.0 / 40.0, 1e-15);
    EXPECT_NEAR(rows[0].EU, 2.6696016676723957, 1e-13);
    EXPECT_NEAR(rows[1].EF, 0.14348275251686574, 1e-14);
    EXPECT_NEAR(rows[1].EU, 2.2045509120872424, 1e-13);
    EXPECT_NEAR(rows[2].EF, 0.11851519519905496, 1e-14);
    EXPECT_NEAR(rows[2].EU, 1.8211703890754842, 1e-13);

    const auto scaled = exact::expected_cycle_observables(lattice(3, 1, 0.5, 16, 2, 1000), 1);
    EXPECT_NEAR(scaled[0].EF, 175.0, 1e-11);
    EXPECT_NEAR(scaled[0].residual, 825.0, 1e-11);
}

TEST(Observables, MatchDenseChainOnTinyMatrix)
{
    for (int n0 : {1, 2, 5, 8})
        for (int n1 : {0, 1, 3})
            for (double r : {0.0, 0.5, 0.9}) {
                if (n1 == 0 && r != 0.0) continue;
                if (n0 + n1 < 2) continue;
                const testsupport::Lattice lat{n0, n1, r, 24, 5};
                const auto mine = exact::expected_cycle_observables(lattice(n0, n1, r, 24, 5), 6);
                const auto ref = testsupport::cycle_moments(lat, 6);
                for (std::size_t c = 0; c < ref.size(); ++c) {
                    EXPECT_NEAR(mine[c].EF, ref[c].F, 1e-13);
                    EXPECT_NEAR(mine[c].EU, ref[c].U, 1e-12);
                }
            }
}

TEST(Observables, NeverOpenAbsorbsNothing)
{
    for (const auto& row : exact::expected_cycle_observables(lattice(5, 2, 0.5, 20, 0, 100), 4)) {
        EXPECT_EQ(row.EF, 0.0);
        EXPECT_NEAR(row.residual, 100.0, 1e-12);
    }
}

TEST(Observables, AbsorptionEventuallyTakesEveryone)
{
    const auto rows = exact::expected_cycle_observables(lattice(4, 2, 0.5, 8, 4, 1), 3000);
    double total = 0.0;
    for (const auto& row : rows) total += row.EF;
    EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(Observables, SizeCap)
{
    EXPECT_THROW(exact::expected_cycle_observables(lattice(2000, 49, 0.5, 8, 4), 1), NumericalError);
    EXPECT_NO_THROW(exact::expected_cycle_observables(lattice(2000, 48, 0.5, 8, 4), 1));
}

TEST(Alpha, Basics)
{
    EXPECT_EQ(exact::alpha_estimate(lattice(10, 40, 0.5, 200, 0)), 0.0);
    // a nearly frozen layer releases almost nothing
    const double lazy = exact::alpha_estimate(lattice(10, 40, 0.9999, 200, 50));
    const double brisk = exact::alpha_estimate(lattice(10, 40, 0.5, 200, 50));
    EXPECT_LT(lazy, 0.05 * brisk);
    EXPECT_GT(brisk, 0.0);
}

TEST(Alpha, SquareRootGrowth)
{
    // log-log slope over sigma_bar = 64..1024; rough estimate sqrt(sigma_bar (1 - r) / 2)
    std::vector<double> xs, ys;
    for (std::int64_t sb = 64; sb <= 1024; sb *= 2) {
        const double a = exact::alpha_estimate(lattice(50, 400, 0.5, 2048, sb));
        xs.push_back(std::log(static_cast<double>(sb)));
        ys.push_back(std::log(a));
        EXPECT_NEAR(a / std::sqrt(static_cast<double>(sb) * 0.25), 1.0, 0.5);
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    EXPECT_GE(slope, 0.4);
    EXPECT_LE(slope, 0.6);
}
