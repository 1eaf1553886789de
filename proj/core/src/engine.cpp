#include "gatedpore/engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "gatedpore/errors.hpp"

namespace gatedpore {

namespace {

double laziness_at(std::int64_t site, const DiscreteParams& disc)
{
    return site > disc.n0 ? disc.r : 0.0;
}

// Per-cycle integer tallies over step indices [0, horizon).
class Tally {
public:
    Tally(const Schedule& schedule, std::int64_t cycles, std::int64_t sites)
        : schedule_(schedule), horizon_(cycles * schedule.tau_bar),
          absorbed_(cycles, 0), interface_(cycles, 0), layer_(cycles, 0), final_(sites, 0)
    {}

    std::int64_t horizon() const { return horizon_; }

    void absorb(std::int64_t step) { ++absorbed_[schedule_.cycle_of(step)]; }
    void finish(std::int64_t site) { ++final_[site - 1]; }

    // Walker sits at `site` after each of the steps from..from+count-1.
    void occupy(std::int64_t site, std::int64_t n0, std::int64_t from, std::int64_t count)
    {
        if (site == n0) add(interface_, from, count);
        else if (site > n0) add(layer_, from, count);
    }

    void merge(const Tally& other)
    {
        for (std::size_t i = 0; i < absorbed_.size(); ++i) {
            absorbed_[i] += other.absorbed_[i];
            interface_[i] += other.interface_[i];
            layer_[i] += other.layer_[i];
        }
        for (std::size_t i = 0; i < final_.size(); ++i) final_[i] += other.final_[i];
    }

    const std::vector<std::int64_t>& absorbed() const { return absorbed_; }
    const std::vector<std::int64_t>& interface_occupancy() const { return interface_; }
    const std::vector<std::int64_t>& layer_occupancy() const { return layer_; }
    const std::vector<std::int64_t>& final_sites() const { return final_; }

private:
    void add(std::vector<std::int64_t>& bins, std::int64_t from, std::int64_t count)
    {
        std::int64_t end = std::min(from + count, horizon_);
        while (from < end) {
            const std::int64_t cycle = schedule_.cycle_of(from);
            const std::int64_t stop = std::min(end, (cycle + 1) * schedule_.tau_bar);
            bins[cycle] += stop - from;
            from = stop;
        }
    }

    Schedule schedule_;
    std::int64_t horizon_;
    std::vector<std::int64_t> absorbed_;
    std::vector<std::int64_t> interface_;
    std::vector<std::int64_t> layer_;
    std::vector<std::int64_t> final_;
};

void simulate_stepwise(const DiscreteParams& disc, std::int64_t pos, WalkerStream& stream,
                       Tally& tally)
{
    const Schedule schedule = schedule_of(disc);
    const std::int64_t out = absorbed_site(disc);
    for (std::int64_t t = 0; t < tally.horizon(); ++t) {
        const std::int64_t next = step_kernel(pos, schedule.phase_at(t), disc, stream.uniform());
        if (next == out) {
            tally.absorb(t);
            return;
        }
        pos = next;
        tally.occupy(pos, disc.n0, t, 1);
    }
    tally.finish(pos);
}

// Heads in k fair coin flips: popcount over raw 64-bit engine words.
std::int64_t fair_heads(std::mt19937_64& eng, std::int64_t k)
{
    std::int64_t heads = 0;
    for (; k >= 64; k -= 64) heads += std::popcount(eng());
    if (k > 0) heads += std::popcount(eng() >> (64 - k));
    return heads;
}

// Waiting steps (failures) before m moves of a lazy walk that moves with
// probability 1 - r per step, i.e. NegBin(m, 1 - r), sampled by indexed
// inversion of a precomputed CDF. One table per power-of-two m.
class LazyWaitTable {
public:
    LazyWaitTable(std::int64_t moves, double r) : moves_(moves), r_(r)
    {
        const double log_move = std::log1p(-r);
        const double log_stay = std::log(r);
        const double m = static_cast<double>(moves);
        double acc = 0.0;
        for (std::int64_t k = 0; acc < 1.0 - 0x1p-53; ++k) {
            const double kd = static_cast<double>(k);
            const double logp = std::lgamma(m + kd) - std::lgamma(kd + 1.0) - std::lgamma(m) +
                                m * log_move + kd * log_stay;
            const double next = acc + std::exp(logp);
            if (next == acc && kd > m * r / (1.0 - r)) break; // past the mean, no more resolution
            acc = next;
            cdf_.push_back(acc);
        }
        guide_.resize(cdf_.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < guide_.size(); ++i) {
            const double level = static_cast<double>(i) / static_cast<double>(guide_.size());
            while (k + 1 < cdf_.size() && cdf_[k] <= level) ++k;
            guide_[i] = k;
        }
    }

    std::int64_t sample(WalkerStream& stream) const
    {
        const double u = stream.uniform();
        if (u >= cdf_.back()) // beyond double resolution of the table
            return std::negative_binomial_distribution<std::int64_t>(moves_, 1.0 - r_)(stream.engine());
        std::size_t k = guide_[static_cast<std::size_t>(u * static_cast<double>(guide_.size()))];
        while (cdf_[k] <= u) ++k;
        return static_cast<std::int64_t>(k);
    }

private:
    std::int64_t moves_;
    double r_;
    std::vector<double> cdf_;
    std::vector<std::size_t> guide_;
};

std::int64_t floor_pow2(std::int64_t d)
{
    return std::int64_t{1} << (63 - std::countl_zero(static_cast<std::uint64_t>(d)));
}

// Exact leaping. Between the special sites (n0, the last site, and the
// H0/H1 boundary) the walk is homogeneous, so a walker at distance d from
// the nearest special site can be advanced up to d moves in one draw:
//   H0:  plain symmetric walk; the reflecting site 1 is the fold of the
//        free walk on Z about 1/2, so d steps are one binomial draw.
//   H1:  lazy walk; m = 2^k <= d moves take m + NegBin(m, 1-r) steps.
//   last site: geometric holding time inside each gate phase.
class LeapSimulator {
public:
    static constexpr std::int64_t kMaxLayerLeap = 256;

    explicit LeapSimulator(const DiscreteParams& disc)
        : disc_(disc), schedule_(schedule_of(disc)),
          stay_open_(disc.n1 > 0 ? disc.r : 0.0), stay_closed_(0.5 * (1.0 + stay_open_))
    {
        if (disc.n1 > 0 && disc.r > 0.0)
            for (std::int64_t m = 1; m <= std::min(kMaxLayerLeap, disc.n1); m *= 2)
                waits_.emplace_back(m, disc.r);
    }

    void simulate(std::int64_t pos, WalkerStream& stream, Tally& tally) const
    {
        const std::int64_t n0 = disc_.n0;
        const std::int64_t n = disc_.sites();
        const std::int64_t horizon = tally.horizon();
        auto& eng = stream.engine();
        // an open boundary site with no laziness never holds; 0.5 is a placeholder
        std::geometric_distribution<std::int64_t> hold_open(stay_open_ > 0.0 ? 1.0 - stay_open_ : 0.5);
        std::geometric_distribution<std::int64_t> hold_closed(1.0 - stay_closed_);

        std::int64_t t = 0;
        while (t < horizon) {
            if (pos == n) {
                const bool open = schedule_.phase_at(t) == Phase::Open;
                const std::int64_t phase_end = std::min(schedule_.phase_end(t), horizon);
                std::int64_t holds = 0;
                if (!open) holds = hold_closed(eng);
                else if (stay_open_ > 0.0) holds = hold_open(eng);
                if (holds >= phase_end - t) {
                    tally.occupy(n, n0, t, phase_end - t);
                    t = phase_end;
                    continue;
                }
                tally.occupy(n, n0, t, holds);
                const std::int64_t move_step = t + holds;
                t = move_step + 1;
                if (open && (eng() & 1u)) {
                    tally.absorb(move_step);
                    return;
                }
                pos = n - 1;
                tally.occupy(pos, n0, move_step, 1);
            } else if (pos < n0) {
                const std::int64_t steps = std::min(n0 - pos, horizon - t);
                std::int64_t y = pos + 2 * fair_heads(eng, steps) - steps;
                if (y <= 0) y = 1 - y;
                t += steps;
                pos = y;
                if (pos == n0) tally.occupy(pos, n0, t - 1, 1);
            } else if (pos == n0) {
                pos = (eng() & 1u) ? n0 + 1 : std::max<std::int64_t>(1, n0 - 1);
                ++t;
                tally.occupy(pos, n0, t - 1, 1);
            } else {
                const std::int64_t reach = std::min({pos - n0, n - pos, kMaxLayerLeap});
                const std::int64_t moves = floor_pow2(reach);
                std::int64_t steps = moves;
                if (!waits_.empty()) steps += waits_[std::countr_zero(static_cast<std::uint64_t>(moves))].sample(stream);
                if (t + steps > horizon) {
                    tally.occupy(pos, n0, t, horizon - t);
                    tally.finish(pos + layer_drift(horizon - t, moves, stream));
                    return;
                }
                tally.occupy(pos, n0, t, steps - 1);
                t += steps;
                pos += 2 * fair_heads(eng, moves) - moves;
                tally.occupy(pos, n0, t - 1, 1);
            }
        }
        tally.finish(pos);
    }

private:
    // Displacement over the final `window` steps, given that the sampled
    // leap overshot the horizon, i.e. fewer than `moves` moves fit in it.
    std::int64_t layer_drift(std::int64_t window, std::int64_t moves, WalkerStream& stream) const
    {
        std::int64_t made = window; // r = 0: every step moves and window < moves
        if (disc_.r > 0.0) {
            std::binomial_distribution<std::int64_t> count(window, 1.0 - disc_.r);
            do made = count(stream.engine());
            while (made >= moves);
        }
        return 2 * fair_heads(stream.engine(), made) - made;
    }

    const DiscreteParams& disc_;
    Schedule schedule_;
    double stay_open_;
    double stay_closed_;
    std::vector<LazyWaitTable> waits_;
};

} // namespace

KernelRow kernel_row(std::int64_t site, Phase phase, const DiscreteParams& disc)
{
    const std::int64_t n = disc.sites();
    if (site < 1 || site > n)
        throw ConfigError("site: " + std::to_string(site) + " outside 1.." + std::to_string(n));
    const double r = laziness_at(site, disc);
    KernelRow row;
    if (site == n) {
        row.left = 0.5 * (1.0 - r);
        if (phase == Phase::Open) {
            row.stay = r;
            row.absorb = 0.5 * (1.0 - r);
        } else {
            row.stay = 0.5 * (1.0 + r);
        }
    } else if (site == 1) {
        row.stay = 0.5;
        row.right = 0.5 * (1.0 - r);
    } else {
        row.left = 0.5 * (1.0 - r);
        row.right = 0.5 * (1.0 - r);
        row.stay = r;
    }
    return row;
}

std::int64_t step_kernel(std::int64_t site, Phase phase, const DiscreteParams& disc, double uniform)
{
    const KernelRow row = kernel_row(site, phase, disc);
    double acc = row.left;
    if (uniform < acc) return site == 1 ? 1 : site - 1;
    acc += row.stay;
    if (uniform < acc) return site;
    acc += row.right;
    if (uniform < acc) return site + 1;
    if (row.absorb > 0.0) return absorbed_site(disc);
    // uniform rounding at the top of [0, 1): fall back to the last nonzero entry
    if (row.right > 0.0) return site + 1;
    return site;
}

std::vector<double> closed_stationary_measure(const DiscreteParams& disc)
{
    disc.validate();
    const double norm = (1.0 - disc.r) * static_cast<double>(disc.n0) + static_cast<double>(disc.n1);
    std::vector<double> measure(static_cast<std::size_t>(disc.sites()));
    for (std::int64_t site = 1; site <= disc.sites(); ++site)
        measure[site - 1] = (site <= disc.n0 ? 1.0 - disc.r : 1.0) / norm;
    return measure;
}

WalkerStream::WalkerStream(std::uint64_t master_seed, std::uint64_t walker_index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(walker_index),
                      static_cast<std::uint32_t>(walker_index >> 32), 0x9e3779b9u};
    engine_.seed(seq);
}

std::int64_t draw_stationary_site(const DiscreteParams& disc, double uniform)
{
    const double bulk_weight = (1.0 - disc.r) * static_cast<double>(disc.n0);
    const double p_bulk = bulk_weight / (bulk_weight + static_cast<double>(disc.n1));
    if (uniform < p_bulk || disc.n1 == 0) {
        const auto k = static_cast<std::int64_t>(uniform / p_bulk * static_cast<double>(disc.n0));
        return 1 + std::clamp<std::int64_t>(k, 0, disc.n0 - 1);
    }
    const double w = (uniform - p_bulk) / (1.0 - p_bulk);
    const auto k = static_cast<std::int64_t>(w * static_cast<double>(disc.n1));
    return disc.n0 + 1 + std::clamp<std::int64_t>(k, 0, disc.n1 - 1);
}

std::vector<WalkerState> initial_state(const DiscreteParams& disc, std::uint64_t seed)
{
    disc.validate();
    std::vector<WalkerState> walkers(static_cast<std::size_t>(disc.M));
    for (std::int64_t w = 0; w < disc.M; ++w) {
        WalkerStream stream(seed, static_cast<std::uint64_t>(w));
        walkers[w].stream = static_cast<std::uint64_t>(w);
        walkers[w].position = draw_stationary_site(disc, stream.uniform());
    }
    return walkers;
}

RunResult run(const DiscreteParams& disc, std::int64_t cycles, std::uint64_t seed,
              const EngineOptions& options)
{
    disc.validate();
    if (cycles < 1) throw ConfigError("cycles: must be at least 1");
    const Schedule schedule = schedule_of(disc);

    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers,
                                                              static_cast<unsigned>(disc.M)));
    std::vector<Tally> tallies(workers, Tally(schedule, cycles, disc.sites()));
    const LeapSimulator leaper(disc);
    auto simulate_range = [&](unsigned worker) {
        const std::int64_t begin = disc.M * worker / workers;
        const std::int64_t end = disc.M * (worker + 1) / workers;
        Tally& tally = tallies[worker];
        for (std::int64_t w = begin; w < end; ++w) {
            WalkerStream stream(seed, static_cast<std::uint64_t>(w));
            const std::int64_t start = draw_stationary_site(disc, stream.uniform());
            if (options.stepping == Stepping::Leap) leaper.simulate(start, stream, tally);
            else simulate_stepwise(disc, start, stream, tally);
        }
    };
    if (workers == 1) {
        simulate_range(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(simulate_range, i);
    }
    for (unsigned i = 1; i < workers; ++i) tallies[0].merge(tallies[i]);
    const Tally& total = tallies[0];

    RunResult result;
    result.final_sites = total.final_sites();
    std::int64_t residual = disc.M;
    const double layer_norm = static_cast<double>(disc.tau_bar) * static_cast<double>(disc.n1);
    for (std::int64_t c = 0; c < cycles; ++c) {
        CycleRecord rec;
        rec.cycle_index = c + 1;
        rec.F = total.absorbed()[c];
        rec.U = total.interface_occupancy()[c];
        residual -= rec.F;
        rec.residual = residual;
        rec.v_mean = disc.n1 > 0 ? static_cast<double>(total.layer_occupancy()[c]) / layer_norm : 0.0;
        result.cycles.push_back(rec);
        if (residual == 0 && c + 1 < cycles) {
            result.truncated = true;
            break;
        }
    }
    return result;
}

} // namespace gatedpore
