#include "cli/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gatedpore/errors.hpp"

namespace gatedpore::cli {

namespace {

const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys = {
        // continuum and lattice
        "L0", "D0", "D1", "mu", "species", "n0", "n1", "r", "tau_bar", "sigma_bar", "M",
        // run control and estimator
        "seed", "cycles", "jobs", "burn_in_fraction", "min_population", "zero_u",
        // sweep
        "n0_list", "sigma_bar_list",
        // pde
        "mode", "tau", "sigma_tau", "T_final", "u0", "rho_effective", "bulk_intervals",
        "layer_intervals", "open_steps", "closed_steps", "max_dt", "snapshot_times", "tau_list",
        // classify
        "eps_coef", "eps_exp", "sigma_eps_coef", "sigma_eps_exp", "sigma_tau_coef", "sigma_tau_exp",
        "D1_coef", "D1_exp", "N", "P0", "Phi", "M_total", "require_limit_hypothesis"};
    return keys;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> items;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

double parse_double(const std::string& key, const std::string& text)
{
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    return value;
}

std::int64_t parse_int(const std::string& key, const std::string& text)
{
    std::int64_t value = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec == std::errc() && ptr == end) return value;
    // accept integral scientific notation such as 1e4
    const double d = parse_double(key, text);
    if (d != std::floor(d) || std::fabs(d) > 9.0e15)
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return static_cast<std::int64_t>(d);
}

} // namespace

std::string format_number(double value)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw NumericalError("cannot format number");
    return std::string(buf.data(), ptr);
}

std::pair<std::string, std::string> split_assignment(const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--set: expected key=value, got '" + assignment + "'");
    std::string key = trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("--set: empty key in '" + assignment + "'");
    return {key, trim(assignment.substr(eq + 1))};
}

Config Config::parse(const std::string& text, const std::string& origin)
{
    Config cfg;
    std::stringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + " line " + std::to_string(number) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + " line " + std::to_string(number) + ": empty key");
        if (value.empty()) throw ConfigError(key + ": empty value (" + origin + " line " + std::to_string(number) + ")");
        cfg.entries_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

Config Config::preset(const std::string& name)
{
    Config cfg;
    if (name == "desk") {
        // mean of F/U is biased upward once few walkers remain; trim at the
        // paper preset's absolute threshold
        cfg.entries_ = {{"M", "10000"},
                        {"n0_list", "1000,2000,4000,8000"},
                        {"sigma_bar_list", "1000,2000"},
                        {"cycles", "2000"},
                        {"min_population", "1000"}};
    } else if (name == "paper") {
        // long-running: hours of CPU per sweep
        cfg.entries_ = {{"M", "100000"},
                        {"n0_list", "1000,2000,5000,10000,20000"},
                        {"sigma_bar_list", "500,1000,2000,5000"},
                        {"cycles", "2000"}};
    } else {
        throw ConfigError("preset: expected desk or paper, got '" + name + "'");
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void Config::merge(const Config& over)
{
    for (const auto& [key, value] : over.entries_) entries_[key] = value;
}

void Config::set_default(const std::string& key, const std::string& value) { entries_.emplace(key, value); }

std::string Config::text(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(key + ": missing required key");
    return it->second;
}

double Config::number(const std::string& key) const { return parse_double(key, text(key)); }

std::int64_t Config::integer(const std::string& key) const { return parse_int(key, text(key)); }

std::uint64_t Config::unsigned_integer(const std::string& key) const
{
    const std::string t = text(key);
    std::uint64_t value = 0;
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an unsigned integer, got '" + t + "'");
    return value;
}

std::vector<double> Config::numbers(const std::string& key) const
{
    std::vector<double> out;
    for (const auto& item : split_list(text(key))) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError(key + ": list is empty");
    return out;
}

std::vector<std::int64_t> Config::integers(const std::string& key) const
{
    std::vector<std::int64_t> out;
    for (const auto& item : split_list(text(key))) out.push_back(parse_int(key, item));
    if (out.empty()) throw ConfigError(key + ": list is empty");
    return out;
}

bool Config::flag(const std::string& key) const
{
    const std::string v = text(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

void Config::check_known() const
{
    for (const auto& [key, value] : entries_)
        if (!known_keys().count(key)) throw ConfigError(key + ": unknown key");
}

Species species_of(const Config& cfg)
{
    return cfg.has("species") ? parse_species(cfg.text("species")) : Species::Potassium;
}

ContinuumParams continuum_of(const Config& cfg)
{
    ContinuumParams cont;
    cont.L0 = cfg.has("L0") ? cfg.number("L0") : 1.0;
    cont.D0 = cfg.has("D0") ? cfg.number("D0") : 1.0;
    cont.mu = cfg.has("mu") ? cfg.number("mu") : 1.0;
    // Sodium sees no affinity layer: its diffusivity is D0 throughout
    cont.D1 = species_of(cfg) == Species::Sodium ? cont.D0 : cfg.number("D1");
    if (cfg.has("tau")) cont.tau = cfg.number("tau");
    if (cfg.has("sigma_tau")) cont.sigma_tau = cfg.number("sigma_tau");
    cont.validate();
    return cont;
}

EstimatorConfig estimator_of(const Config& cfg, std::int64_t walkers)
{
    EstimatorConfig est = EstimatorConfig::defaults_for(walkers);
    if (cfg.has("burn_in_fraction")) est.burn_in_fraction = cfg.number("burn_in_fraction");
    if (cfg.has("min_population")) est.min_population = cfg.number("min_population");
    if (cfg.has("zero_u")) {
        const std::string policy = cfg.text("zero_u");
        if (policy == "skip") est.zero_u = ZeroUPolicy::Skip;
        else if (policy == "reject") est.zero_u = ZeroUPolicy::Reject;
        else throw ConfigError("zero_u: expected skip or reject, got '" + policy + "'");
    }
    est.validate();
    return est;
}

LatticeSetup lattice_of(const Config& cfg)
{
    LatticeSetup setup;
    const std::int64_t walkers = cfg.integer("M");
    if (walkers < 1) throw ConfigError("M: must be at least 1");
    if (cfg.has("tau_bar")) {
        DiscreteParams& d = setup.disc;
        d.n0 = cfg.integer("n0");
        d.n1 = cfg.has("n1") ? cfg.integer("n1") : 0;
        d.r = cfg.has("r") ? cfg.number("r") : 0.0;
        d.tau_bar = cfg.integer("tau_bar");
        d.sigma_bar = cfg.integer("sigma_bar");
        d.M = walkers;
        const double L0 = cfg.has("L0") ? cfg.number("L0") : 1.0;
        const double D0 = cfg.has("D0") ? cfg.number("D0") : 1.0;
        if (d.n0 < 1) throw ConfigError("n0: must be at least 1");
        d.ell = L0 / static_cast<double>(d.n0);
        d.s = d.ell * d.ell / (2.0 * D0);
        d.validate();
        return setup;
    }
    setup.bridged = bridge(continuum_of(cfg), cfg.integer("n0"), cfg.integer("sigma_bar"), walkers,
                           species_of(cfg));
    setup.disc = setup.bridged->disc;
    return setup;
}

pde::GridSpec grid_of(const Config& cfg)
{
    pde::GridSpec grid;
    if (cfg.has("bulk_intervals")) grid.bulk_intervals = static_cast<int>(cfg.integer("bulk_intervals"));
    if (cfg.has("layer_intervals")) grid.layer_intervals = static_cast<int>(cfg.integer("layer_intervals"));
    if (cfg.has("open_steps")) grid.open_steps = static_cast<int>(cfg.integer("open_steps"));
    if (cfg.has("closed_steps")) grid.closed_steps = static_cast<int>(cfg.integer("closed_steps"));
    if (cfg.has("max_dt")) grid.max_dt = cfg.number("max_dt");
    grid.validate();
    return grid;
}

namespace {

regimes::PowerLaw law_of(const Config& cfg, const std::string& stem, bool optional_constant)
{
    regimes::PowerLaw law;
    const std::string coef = stem + "_coef";
    const std::string exp = stem + "_exp";
    if (optional_constant && !cfg.has(coef) && !cfg.has(exp)) return law;
    law.coef = cfg.number(coef);
    try {
        law.exponent = regimes::Rational::parse(cfg.text(exp));
    } catch (const ConfigError& e) {
        throw ConfigError(exp + ": " + e.what());
    }
    return law;
}

} // namespace

regimes::ScalingFamily family_of(const Config& cfg)
{
    regimes::ScalingFamily family;
    family.eps = law_of(cfg, "eps", false);
    family.sigma_eps = law_of(cfg, "sigma_eps", false);
    family.sigma_tau = law_of(cfg, "sigma_tau", false);
    family.D1 = law_of(cfg, "D1", true);
    family.N = cfg.has("N") ? static_cast<int>(cfg.integer("N")) : 2;
    family.validate();
    return family;
}

regimes::ClassifyOptions classify_options_of(const Config& cfg)
{
    regimes::ClassifyOptions options;
    options.D0 = cfg.has("D0") ? cfg.number("D0") : 1.0;
    if (cfg.has("require_limit_hypothesis"))
        options.require_limit_hypothesis = cfg.flag("require_limit_hypothesis");
    if (cfg.has("P0") || cfg.has("Phi") || cfg.has("M_total")) {
        regimes::PoreGeometry geometry;
        if (cfg.has("P0")) geometry.measure_P0 = cfg.number("P0");
        if (cfg.has("Phi")) geometry.Phi = cfg.number("Phi");
        if (cfg.has("M_total")) geometry.M_total = cfg.number("M_total");
        options.geometry = geometry;
    }
    return options;
}

} // namespace gatedpore::cli
