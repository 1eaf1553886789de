#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "gatedpore/engine.hpp"
#include "gatedpore/stats.hpp"

namespace gatedpore::cli {

struct SimulateOutcome {
    LatticeSetup lattice;
    RunResult run;                 ///< cycles cut after the first residual < min_population
    EstimatorConfig estimator;
    std::optional<KEstimate> estimate;
    std::string estimate_error;    ///< set when the estimator could not retain enough cycles
    double k_theory = 0.0;
};

/// bridge -> engine -> estimator for one configuration.
SimulateOutcome simulate(const Config& cfg, unsigned workers);

struct SweepRow {
    std::int64_t n0 = 0;
    double tau = 0.0;
    std::int64_t sigma_bar = 0;
    double D1 = 0.0;
    double K = 0.0;
    double stderr_K = 0.0;
    std::int64_t cycles_used = 0;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// One row per (sigma_bar, n0) combination, ordered sigma_bar-major as
/// listed in the config. Each combination draws its own seed from
/// (seed, n0, sigma_bar), so rows do not depend on `jobs`.
std::vector<SweepRow> sweep(const Config& cfg, unsigned jobs);

std::uint64_t combination_seed(std::uint64_t seed, std::int64_t n0, std::int64_t sigma_bar);

inline const char* kSweepHeader = "n0,tau,sigma_bar,D1,K,stderr,cycles_used";

std::string sweep_csv(const std::vector<SweepRow>& rows);
/// Rejects a malformed file with its line number.
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

struct SeriesSummary {
    double D1 = 0.0;
    std::int64_t sigma_bar = 0;
    std::size_t points = 0;
    std::optional<Extrapolation> fit; ///< present with at least three distinct tau
    double k_theory = 0.0;
};

/// Merge rows (exact duplicates collapse), group by (D1, sigma_bar) and
/// extrapolate each series to tau = 0.
std::vector<SweepRow> merge_rows(const std::vector<std::vector<SweepRow>>& sweeps);
std::vector<SeriesSummary> summarize(const std::vector<SweepRow>& rows, double D0, double mu);
std::string summary_csv(const std::vector<SeriesSummary>& series);

/// Entry point shared by the executable and the tests. Returns the exit
/// code: 0 success, 2 configuration error, 3 numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gatedpore::cli
