#include "cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "gatedpore/errors.hpp"
#include "gatedpore/exact.hpp"
#include "gatedpore/pde.hpp"
#include "gatedpore/regimes.hpp"

#ifndef GATEDPORE_VERSION
#define GATEDPORE_VERSION "unknown"
#endif

namespace gatedpore::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string utc_now()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

void write_manifest(const fs::path& dir, const std::string& command, const Config& cfg,
                    const std::vector<std::string>& outputs, const json& results, const std::string& started)
{
    json m;
    m["tool"] = "gatedpore";
    m["version"] = GATEDPORE_VERSION;
    m["command"] = command;
    m["config"] = json::object();
    for (const auto& [key, value] : cfg.entries()) m["config"][key] = value;
    m["seed"] = cfg.has("seed") ? cfg.text("seed") : "";
    m["started_utc"] = started;
    m["finished_utc"] = utc_now();
    m["outputs"] = outputs;
    m["results"] = results;
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

Config config_from_manifest(const fs::path& path, const std::string& command)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("manifest: cannot open '" + path.string() + "'");
    json m;
    try {
        in >> m;
    } catch (const json::exception& e) {
        throw ConfigError("manifest: " + std::string(e.what()));
    }
    if (!m.contains("command") || m["command"] != command)
        throw ConfigError("manifest: recorded command does not match '" + command + "'");
    if (!m.contains("config") || !m["config"].is_object()) throw ConfigError("manifest: no config object");
    Config cfg;
    for (const auto& [key, value] : m["config"].items()) {
        if (!value.is_string()) throw ConfigError(key + ": manifest value must be a string");
        cfg.set(key, value.get<std::string>());
    }
    return cfg;
}

double theory_for(double D1, double D0, double mu)
{
    return 2.0 * mu * D0 / std::sqrt(std::numbers::pi * D1);
}

std::string cycles_csv(const std::vector<CycleRecord>& cycles)
{
    std::string csv = "cycle,F,U,residual,k_i,v_mean\n";
    for (const CycleRecord& rec : cycles) {
        const auto k = k_per_cycle(rec);
        csv += std::to_string(rec.cycle_index) + ',' + std::to_string(rec.F) + ',' + std::to_string(rec.U) + ',' +
               std::to_string(rec.residual) + ',' + (k ? format_number(*k) : std::string()) + ',' +
               format_number(rec.v_mean) + '\n';
    }
    return csv;
}

std::string field_csv(const pde::Field1D& field)
{
    std::string csv = "x,u\n";
    for (std::size_t j = 0; j < field.x.size(); ++j)
        csv += format_number(field.x[j]) + ',' + format_number(field.u(j)) + '\n';
    return csv;
}

std::string samples_csv(const std::vector<pde::PdeSample>& series)
{
    std::string csv = "t,mass,boundary_ratio\n";
    for (const auto& s : series)
        csv += format_number(s.t) + ',' + format_number(s.mass) + ',' + format_number(s.boundary_ratio) + '\n';
    return csv;
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::stringstream in(line);
    std::string item;
    while (std::getline(in, item, ',')) fields.push_back(item);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

// Defaults written back into the config so the manifest records every
// value the run depended on.
void resolve_run_defaults(Config& cfg, const std::string& cycles_default)
{
    cfg.set_default("L0", "1");
    cfg.set_default("D0", "1");
    cfg.set_default("mu", "1");
    cfg.set_default("species", "potassium");
    cfg.set_default("seed", "1");
    cfg.set_default("cycles", cycles_default);
    cfg.set_default("burn_in_fraction", "0.1");
    if (!cfg.has("min_population") && cfg.has("M")) {
        const auto est = EstimatorConfig::defaults_for(cfg.integer("M"));
        cfg.set("min_population", format_number(est.min_population));
    }
}

} // namespace

SimulateOutcome simulate(const Config& cfg, unsigned workers)
{
    SimulateOutcome out;
    out.lattice = lattice_of(cfg);
    const DiscreteParams& disc = out.lattice.disc;
    out.estimator = estimator_of(cfg, disc.M);
    const std::int64_t cycles = cfg.integer("cycles");
    const auto seed = cfg.unsigned_integer("seed");

    EngineOptions options;
    options.workers = std::max(1u, workers);
    out.run = run(disc, cycles, seed, options);
    auto& recs = out.run.cycles;
    const auto low = std::find_if(recs.begin(), recs.end(), [&](const CycleRecord& rec) {
        return static_cast<double>(rec.residual) < out.estimator.min_population;
    });
    if (low != recs.end()) recs.erase(low + 1, recs.end());

    try {
        out.estimate = estimate_K(recs, disc, out.estimator);
    } catch (const NumericalError& e) {
        out.estimate_error = e.what();
    }
    if (out.lattice.bridged) out.k_theory = k_theory(continuum_of(cfg), species_of(cfg));
    return out;
}

std::uint64_t combination_seed(std::uint64_t seed, std::int64_t n0, std::int64_t sigma_bar)
{
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    const auto un0 = static_cast<std::uint64_t>(n0);
    const auto usb = static_cast<std::uint64_t>(sigma_bar);
    std::seed_seq seq{lo(seed), hi(seed), lo(un0), hi(un0), lo(usb), hi(usb)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
}

std::vector<SweepRow> sweep(const Config& cfg, unsigned jobs)
{
    const auto n0s = cfg.integers("n0_list");
    const auto sigmas = cfg.integers("sigma_bar_list");
    const auto seed = cfg.unsigned_integer("seed");
    const ContinuumParams cont = continuum_of(cfg);

    struct Job {
        std::int64_t n0;
        std::int64_t sigma_bar;
    };
    std::vector<Job> todo;
    for (auto sb : sigmas)
        for (auto n0 : n0s) todo.push_back({n0, sb});

    std::vector<SweepRow> rows(todo.size());
    std::vector<std::exception_ptr> failures(todo.size());
    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(todo.size())));
    const unsigned engine_workers = std::max(1u, jobs / static_cast<unsigned>(todo.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < todo.size(); i = next++) {
            try {
                Config one = cfg;
                one.set("n0", std::to_string(todo[i].n0));
                one.set("sigma_bar", std::to_string(todo[i].sigma_bar));
                one.set("seed", std::to_string(combination_seed(seed, todo[i].n0, todo[i].sigma_bar)));
                const SimulateOutcome sim = simulate(one, engine_workers);
                if (!sim.estimate)
                    throw NumericalError("n0=" + std::to_string(todo[i].n0) + " sigma_bar=" +
                                         std::to_string(todo[i].sigma_bar) + ": " + sim.estimate_error);
                rows[i] = {todo[i].n0, sim.lattice.bridged->tau, todo[i].sigma_bar, cont.D1,
                           sim.estimate->K, sim.estimate->std_error, sim.estimate->cycles_used};
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::string csv = std::string(kSweepHeader) + '\n';
    for (const SweepRow& r : rows)
        csv += std::to_string(r.n0) + ',' + format_number(r.tau) + ',' + std::to_string(r.sigma_bar) + ',' +
               format_number(r.D1) + ',' + format_number(r.K) + ',' + format_number(r.stderr_K) + ',' +
               std::to_string(r.cycles_used) + '\n';
    return csv;
}

std::vector<SweepRow> read_sweep_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("report: cannot open '" + path.string() + "'");
    std::vector<SweepRow> rows;
    std::string line;
    int number = 0;
    const auto fail = [&](const std::string& why) {
        throw ConfigError(path.string() + " line " + std::to_string(number) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (number == 1) {
            if (line != kSweepHeader) fail("expected header '" + std::string(kSweepHeader) + "'");
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 7) fail("expected 7 fields, got " + std::to_string(f.size()));
        Config row;
        const std::array<const char*, 7> names = {"n0", "tau", "sigma_bar", "D1", "K", "stderr", "cycles_used"};
        for (std::size_t i = 0; i < f.size(); ++i) row.set(names[i], f[i].empty() ? "?" : f[i]);
        try {
            rows.push_back({row.integer("n0"), row.number("tau"), row.integer("sigma_bar"), row.number("D1"),
                            row.number("K"), row.number("stderr"), row.integer("cycles_used")});
        } catch (const ConfigError& e) {
            fail(e.what());
        }
    }
    if (number == 0) fail("empty file");
    return rows;
}

std::vector<SweepRow> merge_rows(const std::vector<std::vector<SweepRow>>& sweeps)
{
    std::vector<SweepRow> merged;
    for (const auto& rows : sweeps)
        for (const auto& row : rows)
            if (std::find(merged.begin(), merged.end(), row) == merged.end()) merged.push_back(row);
    return merged;
}

std::vector<SeriesSummary> summarize(const std::vector<SweepRow>& rows, double D0, double mu)
{
    std::vector<SeriesSummary> series;
    std::vector<std::vector<SweepPoint>> points;
    for (const SweepRow& row : rows) {
        auto it = std::find_if(series.begin(), series.end(), [&](const SeriesSummary& s) {
            return s.D1 == row.D1 && s.sigma_bar == row.sigma_bar;
        });
        if (it == series.end()) {
            series.push_back({row.D1, row.sigma_bar, 0, std::nullopt, theory_for(row.D1, D0, mu)});
            points.emplace_back();
            it = series.end() - 1;
        }
        ++it->points;
        points[static_cast<std::size_t>(it - series.begin())].push_back({row.tau, row.K});
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::set<double> taus;
        for (const auto& p : points[i]) taus.insert(p.tau);
        if (taus.size() >= 3) series[i].fit = sweep_convergence(points[i]);
    }
    return series;
}

std::string summary_csv(const std::vector<SeriesSummary>& series)
{
    std::string csv = "D1,sigma_bar,points,intercept,intercept_stderr,slope,k_theory,rel_deviation\n";
    for (const auto& s : series) {
        csv += format_number(s.D1) + ',' + std::to_string(s.sigma_bar) + ',' + std::to_string(s.points) + ',';
        if (s.fit)
            csv += format_number(s.fit->intercept) + ',' + format_number(s.fit->intercept_std_error) + ',' +
                   format_number(s.fit->slope) + ',';
        else
            csv += ",,,";
        csv += format_number(s.k_theory) + ',';
        if (s.fit) csv += format_number(s.fit->intercept / s.k_theory - 1.0);
        csv += '\n';
    }
    return csv;
}

namespace {

struct CommonFlags {
    std::string config_path;
    std::string preset;
    std::string out_dir = "gatedpore-out";
    std::string manifest;
    std::string seed;
    std::string cycles;
    unsigned jobs = 1;
    std::vector<std::string> sets;
};

Config assemble(const CommonFlags& flags, const std::string& command)
{
    Config cfg;
    if (!flags.manifest.empty()) {
        cfg = config_from_manifest(flags.manifest, command);
    } else {
        if (!flags.preset.empty()) cfg = Config::preset(flags.preset);
        if (!flags.config_path.empty()) cfg.merge(Config::load(flags.config_path));
    }
    for (const auto& assignment : flags.sets) {
        const auto [key, value] = split_assignment(assignment);
        cfg.set(key, value);
    }
    if (!flags.seed.empty()) cfg.set("seed", flags.seed);
    if (!flags.cycles.empty()) cfg.set("cycles", flags.cycles);
    cfg.check_known();
    return cfg;
}

fs::path prepare_out(const std::string& dir)
{
    fs::create_directories(dir);
    return dir;
}

int cmd_simulate(const CommonFlags& flags, std::ostream& out)
{
    const std::string started = utc_now();
    Config cfg = assemble(flags, "simulate");
    resolve_run_defaults(cfg, "2000");
    const SimulateOutcome sim = simulate(cfg, flags.jobs);
    const fs::path dir = prepare_out(flags.out_dir);
    write_text(dir / "cycles.csv", cycles_csv(sim.run.cycles));

    json results;
    if (sim.lattice.bridged) results["bridge"] = format_bridge(*sim.lattice.bridged);
    results["cycles_recorded"] = sim.run.cycles.size();
    results["truncated"] = sim.run.truncated;
    if (sim.lattice.bridged) out << format_bridge(*sim.lattice.bridged) << '\n';
    out << "cycles_recorded=" << sim.run.cycles.size() << (sim.run.truncated ? " truncated=1" : "") << '\n';
    if (sim.estimate) {
        const KEstimate& e = *sim.estimate;
        results["K"] = e.K;
        results["stderr"] = e.std_error;
        results["cycles_used"] = e.cycles_used;
        results["zero_u_skipped"] = e.zero_u_skipped;
        out << "K=" << format_number(e.K) << " stderr=" << format_number(e.std_error)
            << " cycles_used=" << e.cycles_used;
        if (sim.k_theory > 0.0) {
            results["k_theory"] = sim.k_theory;
            results["rel_deviation"] = e.K / sim.k_theory - 1.0;
            out << " k_theory=" << format_number(sim.k_theory)
                << " rel_deviation=" << format_number(e.K / sim.k_theory - 1.0);
        }
        out << '\n';
    } else {
        results["estimate_error"] = sim.estimate_error;
    }
    write_manifest(dir, "simulate", cfg, {"cycles.csv"}, results, started);
    if (!sim.estimate) throw NumericalError(sim.estimate_error);
    return 0;
}

std::string series_file(double D1, std::int64_t sigma_bar)
{
    return "series_D1_" + format_number(D1) + "_sb_" + std::to_string(sigma_bar) + ".dat";
}

int cmd_sweep(const CommonFlags& flags, std::ostream& out)
{
    const std::string started = utc_now();
    Config cfg = assemble(flags, "sweep");
    resolve_run_defaults(cfg, "2000");
    const std::vector<SweepRow> rows = sweep(cfg, flags.jobs);
    const fs::path dir = prepare_out(flags.out_dir);
    std::vector<std::string> outputs = {"sweep.csv"};
    write_text(dir / "sweep.csv", sweep_csv(rows));

    std::map<std::pair<double, std::int64_t>, std::string> dat;
    for (const SweepRow& r : rows) {
        auto& text = dat[{r.D1, r.sigma_bar}];
        if (text.empty()) text = "# tau K\n";
        text += format_number(r.tau) + ' ' + format_number(r.K) + '\n';
    }
    for (const auto& [key, text] : dat) {
        outputs.push_back(series_file(key.first, key.second));
        write_text(dir / outputs.back(), text);
    }

    const ContinuumParams cont = continuum_of(cfg);
    json results;
    results["reference"] = {{"D1=0.1", theory_for(0.1, cont.D0, cont.mu)},
                            {"D1=0.25", theory_for(0.25, cont.D0, cont.mu)},
                            {"sodium", theory_for(cont.D0, cont.D0, cont.mu)}};
    out << "reference k_theory D1=0.1 " << format_number(theory_for(0.1, cont.D0, cont.mu))
        << " D1=0.25 " << format_number(theory_for(0.25, cont.D0, cont.mu)) << " sodium "
        << format_number(theory_for(cont.D0, cont.D0, cont.mu)) << '\n';
    out << sweep_csv(rows);
    const auto series = summarize(rows, cont.D0, cont.mu);
    out << summary_csv(series);
    results["series"] = json::array();
    for (const auto& s : series) {
        json js = {{"D1", s.D1}, {"sigma_bar", s.sigma_bar}, {"points", s.points}, {"k_theory", s.k_theory}};
        if (s.fit) js["intercept"] = s.fit->intercept;
        results["series"].push_back(js);
    }
    write_manifest(dir, "sweep", cfg, outputs, results, started);
    return 0;
}

int cmd_oracle(const CommonFlags& flags, std::ostream& out)
{
    const std::string started = utc_now();
    Config cfg = assemble(flags, "oracle");
    resolve_run_defaults(cfg, "20");
    const LatticeSetup lattice = lattice_of(cfg);
    const auto expected = exact::expected_cycle_observables(lattice.disc, cfg.integer("cycles"));
    std::string csv = "cycle,EF,EU\n";
    for (const auto& c : expected)
        csv += std::to_string(c.cycle_index) + ',' + format_number(c.EF) + ',' + format_number(c.EU) + '\n';
    out << csv;
    const fs::path dir = prepare_out(flags.out_dir);
    write_text(dir / "oracle.csv", csv);
    json results;
    if (lattice.disc.sigma_bar > 0) results["alpha_estimate"] = exact::alpha_estimate(lattice.disc);
    write_manifest(dir, "oracle", cfg, {"oracle.csv"}, results, started);
    return 0;
}

int cmd_pde(const CommonFlags& flags, const std::string& mode_flag, std::ostream& out)
{
    const std::string started = utc_now();
    Config cfg = assemble(flags, "pde");
    if (!mode_flag.empty()) cfg.set("mode", mode_flag);
    cfg.set_default("mode", "alternating");
    cfg.set_default("L0", "1");
    cfg.set_default("D0", "1");
    cfg.set_default("mu", "1");
    cfg.set_default("species", "potassium");
    const std::string mode = cfg.text("mode");
    const ContinuumParams cont = continuum_of(cfg);
    const pde::GridSpec grid = grid_of(cfg);
    const double T_final = cfg.number("T_final");
    pde::PdeOptions options;
    if (cfg.has("u0")) options.u0 = cfg.number("u0");
    if (cfg.has("snapshot_times")) options.snapshot_times = cfg.numbers("snapshot_times");
    const double theory = k_theory(cont, species_of(cfg));

    const fs::path dir = prepare_out(flags.out_dir);
    std::vector<std::string> outputs;
    json results;
    auto write_snapshots = [&](const std::vector<pde::Field1D>& snaps) {
        for (std::size_t i = 0; i < snaps.size(); ++i) {
            outputs.push_back("snapshot_" + std::to_string(i) + ".csv");
            write_text(dir / outputs.back(), field_csv(snaps[i]));
        }
    };
    if (mode == "alternating") {
        if (!cont.tau) throw ConfigError("tau: missing required key");
        const auto res = pde::solve_alternating(cont, grid, T_final, options);
        outputs.push_back("pde.csv");
        write_text(dir / "pde.csv", samples_csv(res.series));
        write_snapshots(res.snapshots);
        const double last = res.cycles.empty() ? 0.0 : res.cycles.back().ratio();
        results = {{"last_cycle_ratio", last}, {"k_theory", theory}, {"v_min", res.v_min},
                   {"v_max", res.v_max}, {"steps", res.steps}};
        out << "mode=alternating cycles=" << res.cycles.size() << " last_cycle_ratio=" << format_number(last)
            << " k_theory=" << format_number(theory) << " v_min=" << format_number(res.v_min)
            << " v_max=" << format_number(res.v_max) << '\n';
    } else if (mode == "robin") {
        const double rho_eff = cfg.has("rho_effective") ? cfg.number("rho_effective") : theory;
        const auto res = pde::solve_robin(cont, rho_eff, grid, T_final, options);
        outputs.push_back("pde.csv");
        write_text(dir / "pde.csv", samples_csv(res.series));
        write_snapshots(res.snapshots);
        results = {{"rho_effective", rho_eff}, {"final_ratio", res.final_ratio}};
        out << "mode=robin rho_effective=" << format_number(rho_eff)
            << " final_ratio=" << format_number(res.final_ratio) << '\n';
    } else if (mode == "study") {
        const auto taus = cfg.numbers("tau_list");
        const auto rows = pde::convergence_study(cont, taus, grid, T_final);
        std::string csv = "tau,delta,sigma_tau,distance,steps\n";
        for (const auto& r : rows)
            csv += format_number(r.tau) + ',' + format_number(r.delta) + ',' + format_number(r.sigma_tau) + ',' +
                   format_number(r.distance) + ',' + std::to_string(r.steps) + '\n';
        outputs.push_back("study.csv");
        write_text(dir / "study.csv", csv);
        out << csv;
    } else {
        throw ConfigError("mode: expected alternating, robin or study, got '" + mode + "'");
    }
    write_manifest(dir, "pde", cfg, outputs, results, started);
    return 0;
}

int cmd_classify(const CommonFlags& flags, std::ostream& out)
{
    const Config cfg = assemble(flags, "classify");
    const auto report = regimes::classify(family_of(cfg), species_of(cfg), classify_options_of(cfg));
    out << regimes::format_report(report);
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const CommonFlags& flags, bool write_out,
               std::ostream& out)
{
    const std::string started = utc_now();
    Config cfg;
    for (const auto& assignment : flags.sets) {
        const auto [key, value] = split_assignment(assignment);
        cfg.set(key, value);
    }
    cfg.check_known();
    cfg.set_default("D0", "1");
    cfg.set_default("mu", "1");
    std::vector<std::vector<SweepRow>> sweeps;
    for (const auto& path : inputs) sweeps.push_back(read_sweep_csv(path));
    const auto series = summarize(merge_rows(sweeps), cfg.number("D0"), cfg.number("mu"));
    const std::string csv = summary_csv(series);
    out << csv;
    if (write_out) {
        const fs::path dir = prepare_out(flags.out_dir);
        write_text(dir / "report.csv", csv);
        json results;
        results["inputs"] = inputs;
        write_manifest(dir, "report", cfg, {"report.csv"}, results, started);
    }
    return 0;
}

void add_common(CLI::App* sub, CommonFlags& flags, bool run_flags)
{
    sub->add_option("config", flags.config_path, "configuration file (key = value lines)");
    sub->add_option("--preset", flags.preset, "named defaults: desk or paper (paper is long-running)")
        ->check(CLI::IsMember({"desk", "paper"}));
    sub->add_option("--set", flags.sets, "override a configuration key, key=value")->take_all();
    sub->add_option("--out", flags.out_dir, "output directory")->capture_default_str();
    sub->add_option("--manifest", flags.manifest, "re-run from a manifest.json written by an earlier run");
    if (run_flags) {
        sub->add_option("--seed", flags.seed, "master seed (overrides the seed key)");
        sub->add_option("--cycles", flags.cycles, "cycle cap (overrides the cycles key)");
        sub->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Gated-pore diffusion toolkit: lattice Monte Carlo, exact oracle, PDE solvers", "gatedpore"};
    app.require_subcommand(1);
    app.set_version_flag("--version", GATEDPORE_VERSION);

    CommonFlags flags;
    std::string pde_mode;
    std::vector<std::string> report_inputs;

    auto* simulate_cmd = app.add_subcommand("simulate", "one Monte Carlo run: cycles.csv and the K estimate");
    add_common(simulate_cmd, flags, true);
    auto* sweep_cmd = app.add_subcommand("sweep", "K over the n0 x sigma_bar grid: sweep.csv and series .dat files");
    add_common(sweep_cmd, flags, true);
    auto* oracle_cmd = app.add_subcommand("oracle", "exact expected F and U per cycle (small lattices)");
    add_common(oracle_cmd, flags, true);
    auto* pde_cmd = app.add_subcommand("pde", "finite-volume solvers for the gated and Robin problems");
    add_common(pde_cmd, flags, false);
    pde_cmd->add_option("--mode", pde_mode, "alternating, robin or study")
        ->check(CLI::IsMember({"alternating", "robin", "study"}));
    auto* classify_cmd = app.add_subcommand("classify", "asymptotic regime of a power-law scaling family");
    add_common(classify_cmd, flags, false);
    auto* report_cmd = app.add_subcommand("report", "merge sweep CSVs and extrapolate each series to tau = 0");
    report_cmd->add_option("sweeps", report_inputs, "sweep.csv files")->required();
    report_cmd->add_option("--set", flags.sets, "D0=... or mu=... for the reference constants")->take_all();
    auto* report_out = report_cmd->add_option("--out", flags.out_dir, "also write report.csv and a manifest here");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << GATEDPORE_VERSION << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\nrun 'gatedpore --help' for usage\n";
        return 2;
    }

    try {
        if (*simulate_cmd) return cmd_simulate(flags, out);
        if (*sweep_cmd) return cmd_sweep(flags, out);
        if (*oracle_cmd) return cmd_oracle(flags, out);
        if (*pde_cmd) return cmd_pde(flags, pde_mode, out);
        if (*classify_cmd) return cmd_classify(flags, out);
        if (*report_cmd) return cmd_report(report_inputs, flags, report_out->count() > 0, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace gatedpore::cli
