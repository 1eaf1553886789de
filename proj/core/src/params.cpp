#include "gatedpore/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gatedpore/errors.hpp"

namespace gatedpore {

std::string to_string(Species species)
{
    return species == Species::Potassium ? "potassium" : "sodium";
}

Species parse_species(const std::string& text)
{
    if (text == "potassium" || text == "K") return Species::Potassium;
    if (text == "sodium" || text == "Na") return Species::Sodium;
    throw ConfigError("species: expected potassium or sodium, got '" + text + "'");
}

double ContinuumParams::delta() const
{
    if (!tau) throw ConfigError("tau: required to derive the layer width");
    return std::sqrt(D1 * *tau);
}

double ContinuumParams::domain_length() const { return L0 + delta(); }

double ContinuumParams::open_duration() const
{
    if (sigma_tau) return *sigma_tau;
    if (!tau) throw ConfigError("tau: required to derive sigma_tau");
    return mu * mu * *tau * *tau;
}

void ContinuumParams::validate() const
{
    if (!(L0 > 0.0)) throw ConfigError("L0: must be positive");
    if (!(D0 > 0.0)) throw ConfigError("D0: must be positive");
    if (!(D1 > 0.0) || D1 > D0) throw ConfigError("D1: must satisfy 0 < D1 <= D0");
    if (!(mu > 0.0)) throw ConfigError("mu: must be positive");
    if (tau && !(*tau > 0.0)) throw ConfigError("tau: must be positive");
    if (sigma_tau) {
        if (*sigma_tau < 0.0) throw ConfigError("sigma_tau: must be non-negative");
        if (tau && *sigma_tau > *tau) throw ConfigError("sigma_tau: must not exceed tau");
    }
}

void DiscreteParams::validate() const
{
    if (n0 < 1) throw ConfigError("n0: must be at least 1");
    if (n1 < 0) throw ConfigError("n1: must be non-negative");
    if (sites() < 2) throw ConfigError("n0 + n1: the lattice needs at least two sites");
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("r: must lie in [0, 1)");
    if (n1 == 0 && r != 0.0) throw ConfigError("r: must be 0 when n1 = 0");
    if (tau_bar < 1) throw ConfigError("tau_bar: must be at least 1");
    if (sigma_bar < 0 || sigma_bar > tau_bar)
        throw ConfigError("sigma_bar: must satisfy 0 <= sigma_bar <= tau_bar");
    if (M < 1) throw ConfigError("M: must be at least 1");
    if (!(ell > 0.0) || !(s > 0.0)) throw ConfigError("ell, s: must be positive");
}

ValidityFlags check_validity(const DiscreteParams& disc)
{
    ValidityFlags flags;
    flags.open_phase_short = disc.tau_bar > 10 * disc.sigma_bar;
    flags.layer_relaxes = disc.tau_bar > disc.n1 * disc.n1;
    return flags;
}

BridgeResult bridge(const ContinuumParams& cont, std::int64_t n0, std::int64_t sigma_bar,
                    std::int64_t walkers, Species species)
{
    if (n0 < 1) throw ConfigError("n0: must be at least 1");
    if (sigma_bar < 1) throw ConfigError("sigma_bar: must be at least 1");
    if (walkers < 1) throw ConfigError("M: must be at least 1");
    ContinuumParams base = cont;
    base.tau.reset();
    base.sigma_tau.reset();
    base.validate();

    BridgeResult out;
    DiscreteParams& d = out.disc;
    d.n0 = n0;
    d.sigma_bar = sigma_bar;
    d.M = walkers;
    d.ell = cont.L0 / static_cast<double>(n0);
    d.s = d.ell * d.ell / (2.0 * cont.D0);
    d.r = species == Species::Sodium ? 0.0 : 1.0 - cont.D1 / cont.D0;

    const double tau_real = std::sqrt(static_cast<double>(sigma_bar) / d.s) / cont.mu;
    const double tau_floor = std::floor(tau_real);
    d.tau_bar = static_cast<std::int64_t>(tau_floor);
    out.floor_remainder = tau_real - tau_floor;
    if (d.tau_bar < sigma_bar)
        throw ConfigError("sigma_bar: parameters give tau_bar = " + std::to_string(d.tau_bar) +
                          " < sigma_bar");

    if (species == Species::Sodium) {
        d.n1 = 0;
    } else {
        const double n1 = std::sqrt((1.0 - d.r) / 2.0) * std::sqrt(static_cast<double>(d.tau_bar));
        d.n1 = std::max<std::int64_t>(1, std::llround(n1));
    }
    out.tau = d.s * static_cast<double>(d.tau_bar);
    d.validate();
    out.flags = check_validity(d);
    return out;
}

double k_theory(const ContinuumParams& cont)
{
    if (!(cont.D1 > 0.0)) throw ConfigError("D1: must be positive");
    return 2.0 * cont.mu * cont.D0 / std::sqrt(std::numbers::pi * cont.D1);
}

double k_theory(const ContinuumParams& cont, Species species)
{
    if (species == Species::Potassium) return k_theory(cont);
    ContinuumParams na = cont;
    na.D1 = cont.D0;
    return k_theory(na);
}

std::string format_bridge(const BridgeResult& result)
{
    const DiscreteParams& d = result.disc;
    std::ostringstream os;
    os.precision(10);
    os << "n0=" << d.n0 << " n1=" << d.n1 << " ell=" << d.ell << " s=" << d.s << " r=" << d.r
       << " tau_bar=" << d.tau_bar << " sigma_bar=" << d.sigma_bar << " M=" << d.M
       << " tau=" << result.tau << " b=" << result.floor_remainder
       << " open_phase_short=" << (result.flags.open_phase_short ? 1 : 0)
       << " layer_relaxes=" << (result.flags.layer_relaxes ? 1 : 0);
    return os.str();
}

} // namespace gatedpore
