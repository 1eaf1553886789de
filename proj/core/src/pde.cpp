#include "gatedpore/pde.hpp"

#include <algorithm>
#include <cmath>

#include "gatedpore/errors.hpp"

namespace gatedpore::pde {

namespace {

enum class RightBoundary { NoFlux, Dirichlet, Robin };

// Finite-volume implicit Euler for c(x) v_t = v_xx with c = 1/D, which is
// u_t = (D u)_xx written in the flux-continuous variable v.
class Stepper {
public:
    explicit Stepper(Field1D field) : field_(std::move(field))
    {
        const std::size_t n = field_.x.size();
        capacity_.assign(n, 0.0);
        conductance_.assign(n - 1, 0.0);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double h = field_.x[j + 1] - field_.x[j];
            const double d = interval_diffusivity(field_, j);
            conductance_[j] = 1.0 / h;
            capacity_[j] += 0.5 * h / d;
            capacity_[j + 1] += 0.5 * h / d;
        }
        lower_.resize(n);
        diag_.resize(n);
        upper_.resize(n);
        rhs_.resize(n);
    }

    static double interval_diffusivity(const Field1D& f, std::size_t j)
    {
        return j + 1 <= f.interface_index ? f.D[j] : f.D[j + 1];
    }

    const Field1D& field() const { return field_; }
    const std::vector<double>& capacity() const { return capacity_; }

    double mass() const
    {
        double m = 0.0;
        for (std::size_t j = 0; j < capacity_.size(); ++j) m += capacity_[j] * field_.v[j];
        return m;
    }

    // Returns the mass that left through x = a during the step.
    double step(double dt, RightBoundary bc, double beta = 0.0)
    {
        const double before = mass();
        const std::size_t n = field_.v.size();
        const std::size_t last = n - 1;
        for (std::size_t j = 0; j < n; ++j) {
            const double gl = j > 0 ? conductance_[j - 1] : 0.0;
            const double gr = j < last ? conductance_[j] : 0.0;
            lower_[j] = -gl;
            upper_[j] = -gr;
            diag_[j] = capacity_[j] / dt + gl + gr;
            rhs_[j] = capacity_[j] / dt * field_.v[j];
        }
        if (bc == RightBoundary::Robin) diag_[last] += beta;
        if (bc == RightBoundary::Dirichlet) {
            lower_[last] = 0.0;
            diag_[last] = 1.0;
            rhs_[last] = 0.0;
        }
        solve_tridiagonal();
        field_.t += dt;
        return before - mass();
    }

private:
    void solve_tridiagonal()
    {
        const std::size_t n = diag_.size();
        for (std::size_t j = 1; j < n; ++j) {
            const double w = lower_[j] / diag_[j - 1];
            diag_[j] -= w * upper_[j - 1];
            rhs_[j] -= w * rhs_[j - 1];
        }
        std::vector<double>& v = field_.v;
        v[n - 1] = rhs_[n - 1] / diag_[n - 1];
        for (std::size_t j = n - 1; j-- > 0;) v[j] = (rhs_[j] - upper_[j] * v[j + 1]) / diag_[j];
    }

    Field1D field_;
    std::vector<double> capacity_;
    std::vector<double> conductance_;
    std::vector<double> lower_, diag_, upper_, rhs_;
};

Field1D layered_field(const ContinuumParams& cont, double delta, const GridSpec& grid)
{
    Field1D f;
    const double h0 = cont.L0 / grid.bulk_intervals;
    const double h1 = delta / grid.layer_intervals;
    for (int j = 0; j <= grid.bulk_intervals; ++j) {
        f.x.push_back(j == grid.bulk_intervals ? cont.L0 : j * h0);
        f.D.push_back(cont.D0);
    }
    f.interface_index = f.x.size() - 1;
    for (int k = 1; k <= grid.layer_intervals; ++k) {
        f.x.push_back(cont.L0 + k * h1);
        f.D.push_back(cont.D1);
    }
    f.v.assign(f.x.size(), 0.0);
    return f;
}

Field1D bulk_field(const ContinuumParams& cont, int intervals)
{
    Field1D f;
    const double h = cont.L0 / intervals;
    for (int j = 0; j <= intervals; ++j) {
        f.x.push_back(j == intervals ? cont.L0 : j * h);
        f.D.push_back(cont.D0);
    }
    f.interface_index = f.x.size() - 1;
    f.v.assign(f.x.size(), 0.0);
    return f;
}

// v = D u0 cell by cell so that the discrete mass equals u0 * length.
void fill_constant(Stepper& stepper, Field1D& f, double u0)
{
    const auto& cap = stepper.capacity();
    for (std::size_t j = 0; j < f.x.size(); ++j) {
        double len = 0.0;
        if (j > 0) len += 0.5 * (f.x[j] - f.x[j - 1]);
        if (j + 1 < f.x.size()) len += 0.5 * (f.x[j + 1] - f.x[j]);
        f.v[j] = u0 * len / cap[j];
    }
}

Stepper make_stepper(Field1D field, double u0)
{
    Stepper probe(field);
    fill_constant(probe, field, u0);
    return Stepper(std::move(field));
}

struct TimeStep {
    double dt;
    Phase phase;
    bool cycle_end;
};

std::vector<TimeStep> gated_time_grid(double tau, double sigma_tau, const GridSpec& grid, double T_final)
{
    std::vector<TimeStep> steps;
    double t = 0.0;
    const double closed = tau - sigma_tau;
    auto push = [&](double dt, Phase phase, bool end) {
        if (t >= T_final * (1.0 - 1e-12)) return false;
        dt = std::min(dt, T_final - t);
        t += dt;
        steps.push_back({dt, phase, end || t >= T_final * (1.0 - 1e-12)});
        return true;
    };
    while (t < T_final * (1.0 - 1e-12)) {
        if (sigma_tau > 0.0) {
            for (int k = 0; k < grid.open_steps; ++k)
                if (!push(sigma_tau / grid.open_steps, Phase::Open, closed <= 0.0 && k + 1 == grid.open_steps))
                    return steps;
        }
        if (closed > 0.0) {
            for (int k = 0; k < grid.closed_steps; ++k)
                if (!push(closed / grid.closed_steps, Phase::Closed, k + 1 == grid.closed_steps)) return steps;
        }
    }
    return steps;
}

void take_snapshots(std::vector<Field1D>& out, const std::vector<double>& times, std::size_t& next,
                    const Field1D& f)
{
    while (next < times.size() && f.t >= times[next] * (1.0 - 1e-12)) {
        out.push_back(f);
        ++next;
    }
}

double robin_gradient_ratio(const Field1D& f, double D0)
{
    const std::size_t J = f.v.size() - 1;
    const double h = f.x[J] - f.x[J - 1];
    if (!(f.v[J] > 0.0)) return 0.0;
    return D0 * (f.v[J - 1] - f.v[J]) / (h * f.v[J]);
}

ContinuumParams with_tau(const ContinuumParams& cont)
{
    cont.validate();
    if (!cont.tau) throw ConfigError("tau: required for the alternating problem");
    return cont;
}

} // namespace

void GridSpec::validate() const
{
    if (bulk_intervals < 2) throw ConfigError("bulk_intervals: must be at least 2");
    if (layer_intervals < 8) throw ConfigError("layer_intervals: the layer needs at least 8 intervals");
    if (open_steps < 8) throw ConfigError("open_steps: the open phase needs at least 8 time steps");
    if (closed_steps < 1) throw ConfigError("closed_steps: must be at least 1");
    if (!(max_dt > 0.0)) throw ConfigError("max_dt: must be positive");
}

Phase GateClock::phase_at(double t) const
{
    return std::fmod(t, tau) < sigma_tau ? Phase::Open : Phase::Closed;
}

double Field1D::u_layer_side() const
{
    const std::size_t j = interface_index + 1 < D.size() ? interface_index + 1 : interface_index;
    return v[interface_index] / D[j];
}

double Field1D::mass() const
{
    double m = 0.0;
    for (std::size_t j = 0; j + 1 < x.size(); ++j) {
        const double h = x[j + 1] - x[j];
        const double d = j + 1 <= interface_index ? D[j] : D[j + 1];
        m += 0.5 * h * (v[j] + v[j + 1]) / d;
    }
    return m;
}

AlternatingResult solve_alternating(const ContinuumParams& in, const GridSpec& grid, double T_final,
                                    const PdeOptions& options)
{
    const ContinuumParams cont = with_tau(in);
    grid.validate();
    if (!(T_final > 0.0)) throw ConfigError("T_final: must be positive");
    const double tau = *cont.tau;
    const double sigma_tau = cont.open_duration();
    if (sigma_tau < 0.0 || sigma_tau > tau) throw ConfigError("sigma_tau: must lie in [0, tau]");

    Stepper stepper = make_stepper(layered_field(cont, cont.delta(), grid), options.u0);
    const std::size_t iface = stepper.field().interface_index;

    AlternatingResult res;
    res.initial_mass = stepper.mass();
    res.v_min = *std::min_element(stepper.field().v.begin(), stepper.field().v.end());
    res.v_max = *std::max_element(stepper.field().v.begin(), stepper.field().v.end());
    std::size_t next_snapshot = 0;
    take_snapshots(res.snapshots, options.snapshot_times, next_snapshot, stepper.field());

    CycleRatio cycle{1, 0.0, 0.0};
    for (const TimeStep& ts : gated_time_grid(tau, sigma_tau, grid, T_final)) {
        const RightBoundary bc = ts.phase == Phase::Open ? RightBoundary::Dirichlet : RightBoundary::NoFlux;
        cycle.outflux += stepper.step(ts.dt, bc);
        const Field1D& f = stepper.field();
        cycle.density_integral += ts.dt * f.u(iface);
        ++res.steps;
        const auto [lo, hi] = std::minmax_element(f.v.begin(), f.v.end());
        res.v_min = std::min(res.v_min, *lo);
        res.v_max = std::max(res.v_max, *hi);
        take_snapshots(res.snapshots, options.snapshot_times, next_snapshot, f);
        if (ts.cycle_end) {
            res.cycles.push_back(cycle);
            res.series.push_back({f.t, stepper.mass(), cycle.ratio()});
            cycle = CycleRatio{cycle.cycle + 1, 0.0, 0.0};
        }
    }
    res.final_field = stepper.field();
    return res;
}

RobinResult solve_robin(const ContinuumParams& cont, double rho_effective, const GridSpec& grid,
                        double T_final, const PdeOptions& options)
{
    if (!(cont.L0 > 0.0) || !(cont.D0 > 0.0)) throw ConfigError("L0, D0: must be positive");
    if (!(rho_effective >= 0.0) || !std::isfinite(rho_effective))
        throw ConfigError("rho_effective: must be finite and non-negative");
    if (grid.bulk_intervals < 2) throw ConfigError("bulk_intervals: must be at least 2");
    if (!(grid.max_dt > 0.0)) throw ConfigError("max_dt: must be positive");
    if (!(T_final > 0.0)) throw ConfigError("T_final: must be positive");

    Stepper stepper = make_stepper(bulk_field(cont, grid.bulk_intervals), options.u0);
    const auto steps = static_cast<std::int64_t>(std::ceil(T_final / grid.max_dt - 1e-9));
    const double dt = T_final / static_cast<double>(steps);
    const std::int64_t stride = std::max<std::int64_t>(1, steps / 2000);
    const double beta = rho_effective / cont.D0;

    RobinResult res;
    std::size_t next_snapshot = 0;
    take_snapshots(res.snapshots, options.snapshot_times, next_snapshot, stepper.field());
    res.series.push_back({0.0, stepper.mass(), robin_gradient_ratio(stepper.field(), cont.D0)});
    for (std::int64_t k = 1; k <= steps; ++k) {
        stepper.step(dt, RightBoundary::Robin, beta);
        const Field1D& f = stepper.field();
        take_snapshots(res.snapshots, options.snapshot_times, next_snapshot, f);
        if (k % stride == 0 || k == steps)
            res.series.push_back({f.t, stepper.mass(), robin_gradient_ratio(f, cont.D0)});
    }
    res.final_field = stepper.field();
    res.final_ratio = robin_gradient_ratio(res.final_field, cont.D0);
    return res;
}

RichardsonRatio richardson_robin_ratio(const ContinuumParams& cont, double rho_effective,
                                       const GridSpec& grid, double T_final)
{
    GridSpec fine = grid;
    fine.bulk_intervals *= 2;
    RichardsonRatio out;
    out.coarse = solve_robin(cont, rho_effective, grid, T_final).final_ratio;
    out.fine = solve_robin(cont, rho_effective, fine, T_final).final_ratio;
    out.extrapolated = 2.0 * out.fine - out.coarse;
    return out;
}

std::vector<ConvergenceRow> convergence_study(const ContinuumParams& base, std::span<const double> taus,
                                              const GridSpec& grid, double T_final)
{
    grid.validate();
    if (!(T_final > 0.0)) throw ConfigError("T_final: must be positive");
    const double rho_eff = k_theory(base);
    const double beta = rho_eff / base.D0;

    std::vector<ConvergenceRow> rows;
    for (double tau : taus) {
        ContinuumParams cont = base;
        cont.tau = tau;
        cont.sigma_tau = base.mu * base.mu * tau * tau;
        cont.validate();
        if (*cont.sigma_tau > tau) throw ConfigError("tau: mu^2 tau^2 exceeds tau");

        Stepper gated = make_stepper(layered_field(cont, cont.delta(), grid), 1.0);
        Stepper robin = make_stepper(bulk_field(cont, grid.bulk_intervals), 1.0);
        const auto nb = static_cast<std::size_t>(grid.bulk_intervals);
        const double h0 = cont.L0 / grid.bulk_intervals;

        ConvergenceRow row;
        row.tau = tau;
        row.delta = cont.delta();
        row.sigma_tau = *cont.sigma_tau;
        double acc = 0.0;
        for (const TimeStep& ts : gated_time_grid(tau, *cont.sigma_tau, grid, T_final)) {
            gated.step(ts.dt, ts.phase == Phase::Open ? RightBoundary::Dirichlet : RightBoundary::NoFlux);
            robin.step(ts.dt, RightBoundary::Robin, beta);
            double s = 0.0;
            for (std::size_t j = 0; j < nb; ++j) {
                const double d = gated.field().u(j) - robin.field().u(j);
                s += (j == 0 ? 0.5 : 1.0) * h0 * d * d;
            }
            acc += ts.dt * s;
            ++row.steps;
        }
        row.distance = std::sqrt(acc);
        rows.push_back(row);
    }
    return rows;
}

double l2_distance(std::span<const Field1D> a, std::span<const Field1D> b, double x_max)
{
    if (a.size() != b.size()) throw ConfigError("l2_distance: snapshot counts differ");
    double acc = 0.0;
    double t_prev = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const Field1D& fa = a[k];
        const Field1D& fb = b[k];
        const double dt = fa.t - t_prev;
        t_prev = fa.t;
        if (fa.x.size() != fb.x.size()) throw ConfigError("l2_distance: grids differ");
        double s = 0.0;
        for (std::size_t j = 0; j + 1 < fa.x.size() && fa.x[j + 1] < x_max * (1.0 + 1e-12); ++j) {
            const double h = fa.x[j + 1] - fa.x[j];
            const double d0 = fa.u(j) - fb.u(j);
            const double d1 = fa.u(j + 1) - fb.u(j + 1);
            s += 0.5 * h * (d0 * d0 + d1 * d1);
        }
        acc += dt * s;
    }
    return std::sqrt(acc);
}

} // namespace gatedpore::pde
