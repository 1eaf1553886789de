#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include "gatedpore/params.hpp"

namespace gatedpore::regimes {

/// Exact rational exponent; keeps the exponent arithmetic decidable.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    int sign() const { return (num_ > 0) - (num_ < 0); }

    /// Accepts "3", "-1/4" or a finite decimal such as "0.25".
    static Rational parse(const std::string& text);
    std::string str() const;

    friend Rational operator+(Rational a, Rational b);
    friend Rational operator-(Rational a, Rational b);
    friend Rational operator*(Rational a, Rational b);
    friend Rational operator/(Rational a, Rational b);
    friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend std::strong_ordering operator<=>(Rational a, Rational b) { return (a - b).sign() <=> 0; }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// coef * tau^exponent
struct PowerLaw {
    double coef = 1.0;
    Rational exponent;

    double at(double tau) const;
    PowerLaw operator*(const PowerLaw& o) const;
    PowerLaw operator/(const PowerLaw& o) const;
    PowerLaw pow(Rational p) const;
};

/// Parameter family indexed by the period tau, each entry a power law.
struct ScalingFamily {
    PowerLaw eps;       ///< pore spacing
    PowerLaw sigma_eps; ///< pore diameter
    PowerLaw sigma_tau; ///< open-phase duration
    PowerLaw D1;        ///< affinity-layer diffusivity; exponent 0 means constant
    int N = 2;          ///< spatial dimension

    void validate() const;
};

struct PoreGeometry {
    double measure_P0 = 1.0; ///< (N-1)-measure of the reference pore
    double Phi = 1.0;        ///< small-pore capacity constant, user supplied
    double M_total = 1.0;    ///< integral of the pore density over the boundary

    void validate(int N) const;
};

enum class PoreCase { Fast, Small };
enum class Regime { Fast, Small, DegenerateNeumann, DegenerateDirichlet };
enum class LimitKind { Zero, Finite, Infinite };

std::string to_string(PoreCase c);
std::string to_string(Regime r);
std::string to_string(LimitKind k);

/// tau -> 0 limit of a power law.
struct Limit {
    LimitKind kind = LimitKind::Finite;
    double value = 0.0;

    static Limit of(const PowerLaw& law);
    static Limit zero() { return {LimitKind::Zero, 0.0}; }
    static Limit infinite();
    static Limit finite(double v) { return {LimitKind::Finite, v}; }
};

struct RegimeReport {
    Species species = Species::Potassium;
    PoreCase pore_case = PoreCase::Fast;
    Regime regime = Regime::Fast;
    PowerLaw pore_ratio; ///< sigma_eps / sqrt(D1 sigma_tau), D1 = 1 for Sodium
    PowerLaw l_law;      ///< the l^tau that applies to this case
    std::string l_name;  ///< l_fK, l_sK, l_fNa or l_sNa
    Limit l;
    std::optional<double> rho; ///< 0 for Neumann, inf for Dirichlet, set when geometry known
};

struct ClassifyOptions {
    /// Enforce eps = c0 sqrt(D1 tau) and D1 / tau -> infinity.
    bool require_limit_hypothesis = false;
    std::optional<PoreGeometry> geometry;
    double D0 = 1.0;
};

RegimeReport classify(const ScalingFamily& family, Species species, const ClassifyOptions& options = {});

/// Robin coefficient for a finite positive limit l.
double rho(PoreCase pore_case, Species species, const Limit& l, const PoreGeometry& geometry, double D0);

enum class BoundaryKind { Robin, Neumann, Dirichlet };

struct Rho1D {
    BoundaryKind kind = BoundaryKind::Robin;
    double rho1 = 0.0;

    /// rho1 * D0 / sqrt(D1), the flux-to-density ratio at the pore.
    double effective_ratio(double D0, double D1) const;
};

/// rho1 = (2 / sqrt(pi)) l_1K; l_1K = 0 or +inf gives the degenerate cases.
Rho1D rho_1d(double l_1K);

std::string format_report(const RegimeReport& report);

} // namespace gatedpore::regimes
