#include "gatedpore/exact.hpp"

#include <numeric>

#include "gatedpore/errors.hpp"

namespace gatedpore::exact {

namespace {

void check_size(const DiscreteParams& disc)
{
    disc.validate();
    if (disc.sites() > kMaxSites)
        throw NumericalError("exact oracle: n0 + n1 = " + std::to_string(disc.sites()) +
                             " exceeds the cap of " + std::to_string(kMaxSites) + " sites");
}

// out = in * P(phase); returns the mass moved to the absorbing site.
// Written directly from the kernel's row definitions, independently of
// the engine's sampler.
double apply(const std::vector<double>& in, std::vector<double>& out, Phase phase,
             const DiscreteParams& disc)
{
    const std::int64_t n = disc.sites();
    std::fill(out.begin(), out.end(), 0.0);
    auto lazy = [&](std::int64_t site) { return site > disc.n0 ? disc.r : 0.0; };

    // p(1,1) = 1/2, p(x,x+1) = (1 - r(x))/2 for x < n
    out[0] += 0.5 * in[0];
    for (std::int64_t x = 1; x < n; ++x) out[x] += 0.5 * (1.0 - lazy(x)) * in[x - 1];
    // p(x,x-1) = (1 - r(x))/2 for x >= 2
    for (std::int64_t x = 2; x <= n; ++x) out[x - 2] += 0.5 * (1.0 - lazy(x)) * in[x - 1];
    // interior holding
    for (std::int64_t x = 2; x < n; ++x) out[x - 1] += lazy(x) * in[x - 1];

    const double rn = lazy(n);
    if (phase == Phase::Open) {
        out[n - 1] += rn * in[n - 1];
        return 0.5 * (1.0 - rn) * in[n - 1];
    }
    out[n - 1] += 0.5 * (1.0 + rn) * in[n - 1];
    return 0.0;
}

} // namespace

double DistributionVector::total() const
{
    return std::accumulate(mass.begin(), mass.end(), absorbed);
}

DistributionVector point_mass(const DiscreteParams& disc, std::int64_t site)
{
    check_size(disc);
    if (site < 1 || site > disc.sites()) throw ConfigError("site: out of range");
    DistributionVector dist;
    dist.mass.assign(static_cast<std::size_t>(disc.sites()), 0.0);
    dist.mass[site - 1] = 1.0;
    return dist;
}

DistributionVector closed_stationary(const DiscreteParams& disc)
{
    check_size(disc);
    const double z = (1.0 - disc.r) * static_cast<double>(disc.n0) + static_cast<double>(disc.n1);
    DistributionVector dist;
    dist.mass.assign(static_cast<std::size_t>(disc.sites()), 1.0 / z);
    for (std::int64_t x = 0; x < disc.n0; ++x) dist.mass[x] = (1.0 - disc.r) / z;
    return dist;
}

DistributionVector propagate(const DistributionVector& dist, Phase phase, const DiscreteParams& disc)
{
    check_size(disc);
    if (static_cast<std::int64_t>(dist.mass.size()) != disc.sites())
        throw ConfigError("distribution: dimension mismatch with lattice");
    DistributionVector next;
    next.mass.resize(dist.mass.size());
    next.absorbed = dist.absorbed + apply(dist.mass, next.mass, phase, disc);
    next.step = dist.step + 1;
    next.phase = phase;
    return next;
}

std::vector<ExpectedCycle> expected_cycle_observables(const DiscreteParams& disc, std::int64_t cycles)
{
    check_size(disc);
    if (cycles < 1) throw ConfigError("cycles: must be at least 1");
    const Schedule schedule = schedule_of(disc);
    const double walkers = static_cast<double>(disc.M);

    std::vector<double> cur = closed_stationary(disc).mass;
    std::vector<double> nxt(cur.size());
    double absorbed = 0.0;
    std::vector<ExpectedCycle> out;
    out.reserve(static_cast<std::size_t>(cycles));
    std::int64_t step = 0;
    for (std::int64_t c = 0; c < cycles; ++c) {
        ExpectedCycle rec;
        rec.cycle_index = c + 1;
        double cycle_absorbed = 0.0;
        double interface = 0.0;
        for (std::int64_t k = 0; k < disc.tau_bar; ++k, ++step) {
            cycle_absorbed += apply(cur, nxt, schedule.phase_at(step), disc);
            cur.swap(nxt);
            interface += cur[disc.n0 - 1];
        }
        absorbed += cycle_absorbed;
        rec.EF = walkers * cycle_absorbed;
        rec.EU = walkers * interface;
        rec.residual = walkers * (1.0 - absorbed);
        out.push_back(rec);
    }
    return out;
}

double alpha_estimate(const DiscreteParams& disc)
{
    check_size(disc);
    DistributionVector dist = closed_stationary(disc);
    const double edge_mass = dist.mass.back();
    for (std::int64_t k = 0; k < disc.sigma_bar; ++k) dist = propagate(dist, Phase::Open, disc);
    return dist.absorbed / edge_mass;
}

} // namespace gatedpore::exact
