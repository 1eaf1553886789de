#include "gatedpore/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gatedpore/errors.hpp"

namespace gatedpore {

EstimatorConfig EstimatorConfig::defaults_for(std::int64_t walkers)
{
    EstimatorConfig cfg;
    cfg.min_population = std::max(0.01 * static_cast<double>(walkers), 100.0);
    return cfg;
}

void EstimatorConfig::validate() const
{
    if (!(burn_in_fraction >= 0.0 && burn_in_fraction < 0.5))
        throw ConfigError("burn_in_fraction: must lie in [0, 0.5)");
    if (!(min_population >= 0.0)) throw ConfigError("min_population: must be non-negative");
}

std::optional<double> k_per_cycle(const CycleRecord& rec)
{
    if (rec.U == 0) return std::nullopt;
    return static_cast<double>(rec.F) / static_cast<double>(rec.U);
}

KEstimate estimate_K(std::span<const CycleRecord> records, const DiscreteParams& disc,
                     const EstimatorConfig& cfg)
{
    cfg.validate();
    const auto n = static_cast<std::int64_t>(records.size());
    const auto burn_in = static_cast<std::int64_t>(std::ceil(cfg.burn_in_fraction * static_cast<double>(n)));

    KEstimate est;
    for (std::int64_t i = burn_in; i < n; ++i) {
        const CycleRecord& rec = records[static_cast<std::size_t>(i)];
        if (static_cast<double>(rec.residual) < cfg.min_population) continue;
        const auto k = k_per_cycle(rec);
        if (!k) {
            if (cfg.zero_u == ZeroUPolicy::Reject)
                throw NumericalError("cycle " + std::to_string(rec.cycle_index) + ": U = 0");
            ++est.zero_u_skipped;
            continue;
        }
        est.k_series.push_back(*k);
        est.cycle_indices.push_back(rec.cycle_index);
    }
    est.cycles_used = static_cast<std::int64_t>(est.k_series.size());
    if (est.cycles_used < 3)
        throw NumericalError("estimate_K: only " + std::to_string(est.cycles_used) +
                             " cycles retained after trimming (need 3)");

    const double scale = disc.ell / disc.s;
    const double count = static_cast<double>(est.cycles_used);
    double mean = 0.0;
    for (double k : est.k_series) mean += k;
    mean /= count;
    double ss = 0.0;
    for (double k : est.k_series) ss += (k - mean) * (k - mean);
    est.K = scale * mean;
    est.std_error = scale * std::sqrt(ss / (count - 1.0) / count);
    return est;
}

Extrapolation sweep_convergence(std::span<const SweepPoint> points)
{
    std::set<double> distinct;
    for (const auto& p : points) distinct.insert(p.tau);
    if (distinct.size() < 3)
        throw NumericalError("sweep_convergence: need at least three distinct tau values, got " +
                             std::to_string(distinct.size()));

    const double n = static_cast<double>(points.size());
    double mt = 0.0, mk = 0.0;
    for (const auto& p : points) {
        mt += p.tau;
        mk += p.K;
    }
    mt /= n;
    mk /= n;
    double stt = 0.0, stk = 0.0;
    for (const auto& p : points) {
        stt += (p.tau - mt) * (p.tau - mt);
        stk += (p.tau - mt) * (p.K - mk);
    }
    Extrapolation ex;
    ex.slope = stk / stt;
    ex.intercept = mk - ex.slope * mt;

    double sse = 0.0;
    for (const auto& p : points) {
        const double res = p.K - (ex.intercept + ex.slope * p.tau);
        ex.residuals.push_back(res);
        sse += res * res;
    }
    ex.rms_residual = std::sqrt(sse / n);
    if (points.size() > 2) {
        const double sigma2 = sse / (n - 2.0);
        ex.intercept_std_error = std::sqrt(sigma2 * (1.0 / n + mt * mt / stt));
    }
    return ex;
}

} // namespace gatedpore
