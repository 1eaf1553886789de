#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gatedpore/engine.hpp"
#include "gatedpore/params.hpp"

namespace gatedpore::pde {

/// Discretization controls. The bulk [0, L0] and the layer [L0, L0 + delta]
/// are meshed separately so the interface is always a node.
struct GridSpec {
    int bulk_intervals = 200;
    int layer_intervals = 8; ///< at least 8
    int open_steps = 8;      ///< implicit steps per open phase, at least 8
    int closed_steps = 64;   ///< implicit steps per closed phase
    double max_dt = 1e-4;    ///< step for the Robin problem when run on its own

    void validate() const;
};

/// Open iff t mod tau < sigma_tau.
struct GateClock {
    double tau = 1.0;
    double sigma_tau = 0.0;

    Phase phase_at(double t) const;
};

/// Nodal values of v = D u, continuous across the interface.
struct Field1D {
    std::vector<double> x;
    std::vector<double> D; ///< D at each node; the interface node carries D0
    std::vector<double> v;
    double t = 0.0;
    std::size_t interface_index = 0; ///< node at x = a - delta (last node for Robin)

    /// u = v / D; at the interface this is the bulk-side limit.
    double u(std::size_t j) const { return v[j] / D[j]; }
    /// u just inside the layer at the interface (v / D1).
    double u_layer_side() const;
    /// Finite-volume mass, i.e. the integral of u.
    double mass() const;
};

struct PdeSample {
    double t = 0.0;
    double mass = 0.0;
    double boundary_ratio = 0.0; ///< outflux / bulk-side density at the interface
};

struct CycleRatio {
    std::int64_t cycle = 0;
    double outflux = 0.0;          ///< mass lost during the cycle
    double density_integral = 0.0; ///< time integral of u(a - delta, bulk side)
    double ratio() const { return density_integral > 0.0 ? outflux / density_integral : 0.0; }
};

struct PdeOptions {
    double u0 = 1.0;
    std::vector<double> snapshot_times;
};

struct AlternatingResult {
    std::vector<PdeSample> series; ///< one row per completed cycle
    std::vector<CycleRatio> cycles;
    std::vector<Field1D> snapshots;
    Field1D final_field;
    double initial_mass = 0.0;
    double v_min = 0.0; ///< over every node and step
    double v_max = 0.0;
    std::int64_t steps = 0;
};

/// Gated problem on [0, L0 + delta] with D = D0 on the bulk and D1 on the
/// layer; the pore at the right end is Dirichlet while open and no-flux
/// while closed. Requires cont.tau; sigma_tau defaults to mu^2 tau^2.
AlternatingResult solve_alternating(const ContinuumParams& cont, const GridSpec& grid, double T_final,
                                    const PdeOptions& options = {});

struct RobinResult {
    std::vector<PdeSample> series;
    std::vector<Field1D> snapshots;
    Field1D final_field;
    double final_ratio = 0.0; ///< -(D0 u)_x / u at x = L0 from the one-sided gradient
};

/// Homogenized problem on [0, L0]: u_t = D0 u_xx, no flux at 0 and
/// (D0 u)_x = -rho_effective u at L0.
RobinResult solve_robin(const ContinuumParams& cont, double rho_effective, const GridSpec& grid,
                        double T_final, const PdeOptions& options = {});

struct RichardsonRatio {
    double coarse = 0.0;
    double fine = 0.0;
    double extrapolated = 0.0;
};

/// Boundary ratio at T_final on bulk_intervals and 2 * bulk_intervals, and
/// the first-order Richardson combination 2 fine - coarse.
RichardsonRatio richardson_robin_ratio(const ContinuumParams& cont, double rho_effective,
                                       const GridSpec& grid, double T_final);

struct ConvergenceRow {
    double tau = 0.0;
    double delta = 0.0;
    double sigma_tau = 0.0;
    double distance = 0.0; ///< L2 distance over (0, L0) x (0, T)
    std::int64_t steps = 0;
};

/// For each tau: alternating problem with delta = sqrt(D1 tau) and
/// sigma_tau = mu^2 tau^2 against the Robin problem with ratio
/// 2 mu D0 / sqrt(pi D1), both advanced on the same time grid.
std::vector<ConvergenceRow> convergence_study(const ContinuumParams& base, std::span<const double> taus,
                                              const GridSpec& grid, double T_final);

/// L2 distance over space (x < x_max, trapezoid in x) and time (piecewise
/// constant between snapshot times) of two snapshot sequences.
double l2_distance(std::span<const Field1D> a, std::span<const Field1D> b, double x_max);

} // namespace gatedpore::pde
