#include "gatedpore/regimes.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gatedpore/errors.hpp"

namespace gatedpore::regimes {

namespace {

std::int64_t mul(std::int64_t a, std::int64_t b)
{
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw NumericalError("rational exponent overflow");
    return out;
}

std::int64_t add(std::int64_t a, std::int64_t b)
{
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw NumericalError("rational exponent overflow");
    return out;
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den)
{
    if (den_ == 0) throw NumericalError("rational exponent with zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational Rational::parse(const std::string& text)
{
    try {
        if (auto slash = text.find('/'); slash != std::string::npos)
            return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
        if (auto dot = text.find('.'); dot != std::string::npos) {
            const std::string frac = text.substr(dot + 1);
            if (frac.size() > 12) throw ConfigError("exponent: too many decimals in '" + text + "'");
            std::int64_t den = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
            std::string whole = text.substr(0, dot);
            const bool negative = !whole.empty() && whole[0] == '-';
            if (whole.empty() || whole == "-" || whole == "+") whole += "0";
            const std::int64_t ip = std::stoll(whole);
            const std::int64_t fp = frac.empty() ? 0 : std::stoll(frac);
            const std::int64_t mag = (ip < 0 ? -ip : ip) * den + fp;
            return Rational(negative ? -mag : mag, den);
        }
        std::size_t used = 0;
        const std::int64_t v = std::stoll(text, &used);
        if (used != text.size()) throw ConfigError("exponent: cannot parse '" + text + "'");
        return Rational(v);
    } catch (const std::logic_error&) {
        throw ConfigError("exponent: cannot parse '" + text + "'");
    }
}

std::string Rational::str() const
{
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(Rational a, Rational b)
{
    const std::int64_t g = std::gcd(a.den_, b.den_);
    return Rational(add(mul(a.num_, b.den_ / g), mul(b.num_, a.den_ / g)), mul(a.den_ / g, b.den_));
}
Rational operator-(Rational a, Rational b) { return a + Rational(-b.num_, b.den_); }
Rational operator*(Rational a, Rational b)
{
    const Rational x(a.num_, b.den_);
    const Rational y(b.num_, a.den_);
    return Rational(mul(x.num_, y.num_), mul(x.den_, y.den_));
}
Rational operator/(Rational a, Rational b)
{
    if (b.num_ == 0) throw NumericalError("rational exponent division by zero");
    return a * Rational(b.den_, b.num_);
}

double PowerLaw::at(double tau) const { return coef * std::pow(tau, exponent.value()); }

PowerLaw PowerLaw::operator*(const PowerLaw& o) const { return {coef * o.coef, exponent + o.exponent}; }

PowerLaw PowerLaw::operator/(const PowerLaw& o) const { return {coef / o.coef, exponent - o.exponent}; }

PowerLaw PowerLaw::pow(Rational p) const { return {std::pow(coef, p.value()), exponent * p}; }

void ScalingFamily::validate() const
{
    if (N < 2) throw ConfigError("N: spatial dimension must be at least 2");
    auto positive = [](const PowerLaw& law, const char* name) {
        if (!(law.coef > 0.0) || !std::isfinite(law.coef))
            throw ConfigError(std::string(name) + ": coefficient must be positive");
        if (law.exponent.sign() <= 0)
            throw ConfigError(std::string(name) + ": must vanish as tau -> 0 (exponent > 0)");
    };
    positive(eps, "eps");
    positive(sigma_eps, "sigma_eps");
    positive(sigma_tau, "sigma_tau");
    if (!(D1.coef > 0.0) || !std::isfinite(D1.coef)) throw ConfigError("D1: coefficient must be positive");
    if (D1.exponent.sign() < 0) throw ConfigError("D1: exponent must be non-negative");
    const Rational one(1);
    if (sigma_tau.exponent < one || (sigma_tau.exponent == one && sigma_tau.coef > 1.0))
        throw ConfigError("sigma_tau: must not exceed tau for small tau");
}

void PoreGeometry::validate(int N) const
{
    if (!(measure_P0 > 0.0)) throw ConfigError("measure_P0: must be positive");
    if (measure_P0 > std::pow(2.0, N - 1)) throw ConfigError("measure_P0: P0 must fit in (-1,1)^(N-1)");
    if (!(Phi > 0.0)) throw ConfigError("Phi: must be positive");
    if (!(M_total > 0.0)) throw ConfigError("M_total: must be positive");
}

std::string to_string(PoreCase c) { return c == PoreCase::Fast ? "fast" : "small"; }

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::Fast: return "fast";
    case Regime::Small: return "small";
    case Regime::DegenerateNeumann: return "degenerate-neumann";
    case Regime::DegenerateDirichlet: return "degenerate-dirichlet";
    }
    return "unknown";
}

std::string to_string(LimitKind k)
{
    switch (k) {
    case LimitKind::Zero: return "zero";
    case LimitKind::Finite: return "finite";
    case LimitKind::Infinite: return "infinite";
    }
    return "unknown";
}

Limit Limit::infinite() { return {LimitKind::Infinite, std::numeric_limits<double>::infinity()}; }

Limit Limit::of(const PowerLaw& law)
{
    const int s = law.exponent.sign();
    if (s > 0) return zero();
    if (s < 0) return infinite();
    return finite(law.coef);
}

RegimeReport classify(const ScalingFamily& family, Species species, const ClassifyOptions& options)
{
    family.validate();
    if (options.require_limit_hypothesis) {
        // eps = c0 sqrt(D1 tau) for some constant c0, and D1 / tau -> infinity
        const Rational expected = (Rational(1) + family.D1.exponent) / Rational(2);
        if (!(family.eps.exponent == expected))
            throw ConfigError("eps: limit hypothesis needs eps = c0 sqrt(D1 tau), exponent " +
                              expected.str() + ", got " + family.eps.exponent.str());
        if (!(family.D1.exponent < Rational(1)))
            throw ConfigError("D1: limit hypothesis needs D1 / tau -> infinity (exponent < 1)");
    }
    if (options.geometry) options.geometry->validate(family.N);

    const PowerLaw D1 = species == Species::Sodium ? PowerLaw{1.0, Rational(0)} : family.D1;
    const Rational half(1, 2);
    const Rational nm1(family.N - 1);
    const Rational nm2(family.N - 2);
    const PowerLaw tau{1.0, Rational(1)};

    RegimeReport rep;
    rep.species = species;
    rep.pore_ratio = family.sigma_eps / (D1 * family.sigma_tau).pow(half);
    rep.pore_case = rep.pore_ratio.exponent.sign() < 0 ? PoreCase::Fast : PoreCase::Small;

    if (rep.pore_case == PoreCase::Fast) {
        rep.l_law = family.sigma_tau.pow(half) / (D1.pow(half) * tau) * (family.sigma_eps / family.eps).pow(nm1);
        rep.l_name = species == Species::Potassium ? "l_fK" : "l_fNa";
    } else {
        rep.l_law = family.sigma_tau / tau * family.sigma_eps.pow(nm2) / family.eps.pow(nm1);
        rep.l_name = species == Species::Potassium ? "l_sK" : "l_sNa";
    }
    rep.l = Limit::of(rep.l_law);

    switch (rep.l.kind) {
    case LimitKind::Zero:
        rep.regime = Regime::DegenerateNeumann;
        rep.rho = 0.0;
        break;
    case LimitKind::Infinite:
        rep.regime = Regime::DegenerateDirichlet;
        rep.rho = std::numeric_limits<double>::infinity();
        break;
    case LimitKind::Finite:
        rep.regime = rep.pore_case == PoreCase::Fast ? Regime::Fast : Regime::Small;
        if (options.geometry) rep.rho = rho(rep.pore_case, species, rep.l, *options.geometry, options.D0);
        break;
    }
    return rep;
}

double rho(PoreCase pore_case, Species species, const Limit& l, const PoreGeometry& geometry, double D0)
{
    if (l.kind != LimitKind::Finite || !(l.value > 0.0) || !std::isfinite(l.value))
        throw NumericalError("rho: degenerate limit l = " + to_string(l.kind) + " carries no Robin constant");
    if (!(D0 > 0.0)) throw ConfigError("D0: must be positive");
    const double two_over_sqrt_pi = 2.0 / std::sqrt(std::numbers::pi);
    if (pore_case == PoreCase::Small) {
        if (!(geometry.Phi > 0.0)) throw ConfigError("Phi: must be positive");
        return geometry.Phi * l.value;
    }
    if (!(geometry.measure_P0 > 0.0)) throw ConfigError("measure_P0: must be positive");
    const double base = two_over_sqrt_pi * geometry.measure_P0 * l.value;
    return species == Species::Potassium ? base : base / std::sqrt(D0);
}

double Rho1D::effective_ratio(double D0, double D1) const
{
    switch (kind) {
    case BoundaryKind::Neumann: return 0.0;
    case BoundaryKind::Dirichlet: return std::numeric_limits<double>::infinity();
    case BoundaryKind::Robin: break;
    }
    return rho1 * D0 / std::sqrt(D1);
}

Rho1D rho_1d(double l_1K)
{
    if (std::isnan(l_1K) || l_1K < 0.0) throw ConfigError("l_1K: must lie in [0, +inf]");
    if (l_1K == 0.0) return {BoundaryKind::Neumann, 0.0};
    if (std::isinf(l_1K)) return {BoundaryKind::Dirichlet, std::numeric_limits<double>::infinity()};
    return {BoundaryKind::Robin, 2.0 / std::sqrt(std::numbers::pi) * l_1K};
}

std::string format_report(const RegimeReport& rep)
{
    std::ostringstream os;
    os.precision(12);
    os << "species=" << to_string(rep.species) << '\n'
       << "pore_case=" << to_string(rep.pore_case) << '\n'
       << "regime=" << to_string(rep.regime) << '\n'
       << "pore_ratio_coef=" << rep.pore_ratio.coef << '\n'
       << "pore_ratio_exponent=" << rep.pore_ratio.exponent.str() << '\n'
       << "l_name=" << rep.l_name << '\n'
       << "l_exponent=" << rep.l_law.exponent.str() << '\n'
       << "l_kind=" << to_string(rep.l.kind) << '\n'
       << "l=" << rep.l.value << '\n';
    if (rep.rho) os << "rho=" << *rep.rho << '\n';
    else os << "rho=unset\n";
    return os.str();
}

} // namespace gatedpore::regimes
