#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gatedpore/params.hpp"
#include "gatedpore/pde.hpp"
#include "gatedpore/regimes.hpp"
#include "gatedpore/stats.hpp"

namespace gatedpore::cli {

/// Flat `key = value` configuration. Lines starting with '#' and blank
/// lines are ignored; a trailing `# comment` is stripped. Later sources
/// override earlier ones: preset < file < --set < dedicated flags.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "config");
    static Config load(const std::filesystem::path& path);
    static Config preset(const std::string& name);

    void set(const std::string& key, const std::string& value);
    void merge(const Config& over);
    /// Inserts the value only when the key is absent.
    void set_default(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    const std::map<std::string, std::string>& entries() const { return entries_; }

    std::string text(const std::string& key) const;
    double number(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
    std::vector<std::int64_t> integers(const std::string& key) const;
    bool flag(const std::string& key) const;
    /// Full unsigned 64-bit range, for seeds.
    std::uint64_t unsigned_integer(const std::string& key) const;

    /// Rejects keys outside the documented set.
    void check_known() const;

private:
    std::map<std::string, std::string> entries_;
};

/// Parse "key=value" as used by --set.
std::pair<std::string, std::string> split_assignment(const std::string& assignment);

Species species_of(const Config& cfg);
ContinuumParams continuum_of(const Config& cfg);
EstimatorConfig estimator_of(const Config& cfg, std::int64_t walkers);

/// Lattice for simulate/oracle: explicit when `tau_bar` is given (keys n0,
/// n1, r, tau_bar, sigma_bar), otherwise bridged from the continuum keys.
struct LatticeSetup {
    DiscreteParams disc;
    std::optional<BridgeResult> bridged;
};
LatticeSetup lattice_of(const Config& cfg);

pde::GridSpec grid_of(const Config& cfg);
regimes::ScalingFamily family_of(const Config& cfg);
regimes::ClassifyOptions classify_options_of(const Config& cfg);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

} // namespace gatedpore::cli
