#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gatedpore/engine.hpp"
#include "gatedpore/params.hpp"

namespace gatedpore {

enum class ZeroUPolicy {
    Skip,  ///< drop cycles with U = 0 and count them
    Reject ///< treat a U = 0 cycle among the retained window as an error
};

struct EstimatorConfig {
    double burn_in_fraction = 0.1;
    double min_population = 100.0;
    ZeroUPolicy zero_u = ZeroUPolicy::Skip;

    /// burn-in 0.1 and min_population = max(0.01 M, 100).
    static EstimatorConfig defaults_for(std::int64_t walkers);
    void validate() const;
};

struct KEstimate {
    double K = 0.0;
    double std_error = 0.0; ///< standard error of the trimmed mean, scaled by ell/s
    std::int64_t cycles_used = 0;
    std::int64_t zero_u_skipped = 0;
    std::vector<double> k_series; ///< retained k_i, unscaled
    std::vector<std::int64_t> cycle_indices;
};

/// k_i = F_i / U_i, or nullopt when U_i = 0.
std::optional<double> k_per_cycle(const CycleRecord& rec);

/// K = (ell / s) * mean of retained k_i. Throws NumericalError with fewer
/// than three retained cycles.
KEstimate estimate_K(std::span<const CycleRecord> records, const DiscreteParams& disc,
                     const EstimatorConfig& cfg);

struct SweepPoint {
    double tau = 0.0;
    double K = 0.0;
};

struct Extrapolation {
    double intercept = 0.0; ///< K extrapolated to tau = 0
    double slope = 0.0;
    double intercept_std_error = 0.0;
    double rms_residual = 0.0;
    std::vector<double> residuals;
};

/// Least-squares line K = intercept + slope * tau. Needs at least three
/// distinct tau values.
Extrapolation sweep_convergence(std::span<const SweepPoint> points);

} // namespace gatedpore
