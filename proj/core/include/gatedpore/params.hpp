#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace gatedpore {

enum class Species { Potassium, Sodium };

std::string to_string(Species species);
Species parse_species(const std::string& text);

/// Macroscopic model: bulk region of length L0 with diffusivity D0, followed
/// by an affinity layer of width delta = sqrt(D1 * tau) with diffusivity D1,
/// closed by a pore that is open for sigma_tau out of every period tau.
struct ContinuumParams {
    double L0 = 1.0;
    double D0 = 1.0;
    double D1 = 1.0;
    double mu = 1.0; ///< critical scaling sigma_tau = mu^2 tau^2
    std::optional<double> tau;
    std::optional<double> sigma_tau;

    /// Layer width sqrt(D1 * tau); requires tau.
    double delta() const;
    /// Total length a = L0 + delta; requires tau.
    double domain_length() const;
    /// sigma_tau if set, otherwise mu^2 tau^2.
    double open_duration() const;

    void validate() const;
};

/// Lattice model: n0 bulk sites, n1 lazy sites, spacing ell, step s.
struct DiscreteParams {
    std::int64_t n0 = 1;
    std::int64_t n1 = 0;
    double ell = 1.0;
    double s = 0.5;
    double r = 0.0; ///< laziness on the affinity layer
    std::int64_t tau_bar = 1;
    std::int64_t sigma_bar = 1;
    std::int64_t M = 1;

    std::int64_t sites() const { return n0 + n1; }
    bool is_sodium() const { return n1 == 0; }

    /// Structural checks only. A never-opening pore (sigma_bar == 0) is
    /// accepted so that closed-pore runs can be expressed.
    void validate() const;
};

/// Soft scale-separation assumptions; violations are warnings.
struct ValidityFlags {
    bool open_phase_short = true; ///< tau_bar > 10 * sigma_bar
    bool layer_relaxes = true;    ///< tau_bar > n1^2

    bool all() const { return open_phase_short && layer_relaxes; }
};

ValidityFlags check_validity(const DiscreteParams& disc);

struct BridgeResult {
    DiscreteParams disc;
    double tau = 0.0;             ///< realized period s * tau_bar
    double floor_remainder = 0.0; ///< fractional part b dropped by the floor
    ValidityFlags flags;
};

/// Map continuum parameters onto the lattice for a chosen n0 and sigma_bar.
/// Any tau already present in `cont` is ignored: the realized period is an
/// output. Sodium forces n1 = 0 and r = 0.
BridgeResult bridge(const ContinuumParams& cont, std::int64_t n0, std::int64_t sigma_bar,
                    std::int64_t walkers = 1, Species species = Species::Potassium);

/// Homogenized flux-to-density constant 2 mu D0 / sqrt(pi D1).
double k_theory(const ContinuumParams& cont);

/// Same constant for the given species (Sodium uses D1 = D0).
double k_theory(const ContinuumParams& cont, Species species);

/// Single-line key=value dump of a bridge result.
std::string format_bridge(const BridgeResult& result);

} // namespace gatedpore
