#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gatedpore/params.hpp"

namespace gatedpore {

enum class Phase { Open, Closed };

/// Deterministic gate: step t (0-based, units of s) is open iff
/// t mod tau_bar < sigma_bar.
struct Schedule {
    std::int64_t tau_bar = 1;
    std::int64_t sigma_bar = 0;

    Phase phase_at(std::int64_t step) const
    {
        return step % tau_bar < sigma_bar ? Phase::Open : Phase::Closed;
    }
    /// First step index after `step` at which the phase may change.
    std::int64_t phase_end(std::int64_t step) const
    {
        const std::int64_t start = step - step % tau_bar;
        return step % tau_bar < sigma_bar ? start + sigma_bar : start + tau_bar;
    }
    std::int64_t cycle_of(std::int64_t step) const { return step / tau_bar; }
};

inline Schedule schedule_of(const DiscreteParams& disc) { return {disc.tau_bar, disc.sigma_bar}; }

/// Sites are numbered 1..n0+n1; the absorbing site is n0+n1+1.
inline std::int64_t absorbed_site(const DiscreteParams& disc) { return disc.sites() + 1; }

/// One row of the transition kernel. `absorb` is only non-zero at the last
/// site during an open step.
struct KernelRow {
    double left = 0.0;
    double stay = 0.0;
    double right = 0.0;
    double absorb = 0.0;
};

KernelRow kernel_row(std::int64_t site, Phase phase, const DiscreteParams& disc);

/// Next site for a walker at `site`, given a uniform draw in [0, 1).
/// Returns absorbed_site(disc) when the walker leaves through the pore.
std::int64_t step_kernel(std::int64_t site, Phase phase, const DiscreteParams& disc, double uniform);

/// Per-site probability of the closed-pore stationary state, index 0 -> site 1.
std::vector<double> closed_stationary_measure(const DiscreteParams& disc);

/// Counter-style stream: every walker owns a generator seeded from
/// (master seed, walker index), so trajectories do not depend on which
/// worker simulates them or in what order.
class WalkerStream {
public:
    WalkerStream(std::uint64_t master_seed, std::uint64_t walker_index);

    std::mt19937_64& engine() { return engine_; }
    /// Uniform draw in [0, 1).
    double uniform()
    {
        const double u = std::generate_canonical<double, 53>(engine_);
        return u < 1.0 ? u : 0x1.fffffffffffffp-1;
    }

private:
    std::mt19937_64 engine_;
};

struct WalkerState {
    std::int64_t position = 1;
    std::uint64_t stream = 0; ///< walker index used to derive its stream
};

/// Site drawn from the closed-pore stationary measure by inverse transform.
std::int64_t draw_stationary_site(const DiscreteParams& disc, double uniform);

std::vector<WalkerState> initial_state(const DiscreteParams& disc, std::uint64_t seed);

struct CycleRecord {
    std::int64_t cycle_index = 0; ///< 1-based
    std::int64_t F = 0;           ///< walkers absorbed during the cycle
    std::int64_t U = 0;           ///< sum over the cycle's steps of occupancy at site n0
    std::int64_t residual = 0;    ///< walkers still inside at cycle end
    double v_mean = 0.0;          ///< mean per-site occupancy of the affinity layer
};

enum class Stepping {
    Leap,    ///< exact multi-step leaps between special sites (default)
    Stepwise ///< one kernel draw per walker per step; reference path
};

struct EngineOptions {
    unsigned workers = 1;
    Stepping stepping = Stepping::Leap;
};

struct RunResult {
    std::vector<CycleRecord> cycles;
    bool truncated = false; ///< population hit zero before the requested cycle count
    /// Walkers on each site after the last simulated step, index 0 -> site 1.
    std::vector<std::int64_t> final_sites;
};

/// Simulate disc.M independent walkers for `cycles` full cycles.
/// Output is a pure function of (disc, cycles, seed, stepping).
RunResult run(const DiscreteParams& disc, std::int64_t cycles, std::uint64_t seed,
              const EngineOptions& options = {});

} // namespace gatedpore
