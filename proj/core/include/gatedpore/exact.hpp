#pragma once

#include <cstdint>
#include <vector>

#include "gatedpore/engine.hpp"
#include "gatedpore/params.hpp"

namespace gatedpore::exact {

/// Largest lattice the oracle accepts.
inline constexpr std::int64_t kMaxSites = 2048;

/// Single-walker law: mass on sites 1..n (index 0 -> site 1) plus the mass
/// already absorbed through the pore.
struct DistributionVector {
    std::vector<double> mass;
    double absorbed = 0.0;
    std::int64_t step = 0;
    Phase phase = Phase::Closed; ///< phase of the last applied step

    double total() const;
};

DistributionVector point_mass(const DiscreteParams& disc, std::int64_t site);

/// Closed-pore stationary law, built from its closed form.
DistributionVector closed_stationary(const DiscreteParams& disc);

/// Apply one step of the transition operator for `phase`.
DistributionVector propagate(const DistributionVector& dist, Phase phase, const DiscreteParams& disc);

struct ExpectedCycle {
    std::int64_t cycle_index = 0;
    double EF = 0.0;       ///< expected absorptions in the cycle, times M
    double EU = 0.0;       ///< expected occupancy-steps at site n0, times M
    double residual = 0.0; ///< expected walkers left at cycle end
    double ratio() const { return EU > 0.0 ? EF / EU : 0.0; }
};

/// Exact per-cycle expectations for M walkers started in the closed-pore
/// stationary state, with occupancy sampled after each step.
std::vector<ExpectedCycle> expected_cycle_observables(const DiscreteParams& disc, std::int64_t cycles);

/// Expected absorptions during sigma_bar open steps from the closed-pore
/// stationary state, per unit of mass on the last site.
double alpha_estimate(const DiscreteParams& disc);

} // namespace gatedpore::exact
