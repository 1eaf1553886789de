#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "gatedpore/errors.hpp"

using namespace gatedpore;
using namespace gatedpore::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("gatedpore_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& path, const std::string& text)
{
    std::ofstream(path) << text;
}

std::string read(const fs::path& path)
{
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Ran {
    int code;
    std::string out;
    std::string err;
};

Ran run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const char* kTinyLattice = "n0 = 4\nn1 = 2\nr = 0.5\ntau_bar = 16\nsigma_bar = 2\nM = 1\n";

} // namespace

TEST(Config, ParsesKeyValueLines)
{
    const Config cfg = Config::parse("# comment\n\nD1 = 0.1  # trailing\nn0_list=1000, 2000\nspecies = sodium\n");
    EXPECT_DOUBLE_EQ(cfg.number("D1"), 0.1);
    EXPECT_EQ(cfg.integers("n0_list"), (std::vector<std::int64_t>{1000, 2000}));
    EXPECT_EQ(species_of(cfg), Species::Sodium);
}

TEST(Config, ReportsLineNumbers)
{
    try {
        Config::parse("D1 = 0.1\nthis line has no equals\n", "run.cfg");
        FAIL() << "expected a ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("run.cfg line 2"), std::string::npos) << e.what();
    }
}

TEST(Config, TypedAccessErrors)
{
    Config cfg = Config::parse("n0 = 12.5\nD1 = abc\n");
    EXPECT_THROW(cfg.integer("n0"), ConfigError);
    EXPECT_THROW(cfg.number("D1"), ConfigError);
    EXPECT_THROW(cfg.number("M"), ConfigError);
    cfg.set("typo_key", "1");
    EXPECT_THROW(cfg.check_known(), ConfigError);
    EXPECT_THROW(Config::preset("laptop"), ConfigError);
}

TEST(Config, MergeAndDefaults)
{
    Config base = Config::preset("desk");
    Config file = Config::parse("M = 50\n");
    base.merge(file);
    EXPECT_EQ(base.integer("M"), 50);
    EXPECT_EQ(base.number("min_population"), 1000.0);
    base.set_default("M", "7");
    EXPECT_EQ(base.integer("M"), 50);
    base.set_default("seed", "7");
    EXPECT_EQ(base.unsigned_integer("seed"), 7u);
    EXPECT_EQ(split_assignment("D1=0.25").second, "0.25");
    EXPECT_THROW(split_assignment("D1"), ConfigError);
}

TEST(Config, ShortestRoundTripNumbers)
{
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(3.0), "3");
    const double x = 3.568248232305542;
    EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(RunCli, PrecedencePresetFileSetFlag)
{
    const fs::path dir = scratch("precedence");
    write(dir / "run.cfg", std::string(kTinyLattice) + "cycles = 5\nseed = 3\n");
    const Ran r = run({"oracle", (dir / "run.cfg").string(), "--preset", "desk", "--set", "cycles=4", "seed=9",
                       "--seed", "11", "--out", (dir / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto manifest = nlohmann::json::parse(read(dir / "out" / "manifest.json"));
    EXPECT_EQ(manifest["config"]["M"], "1");     // file beats preset
    EXPECT_EQ(manifest["config"]["cycles"], "4"); // --set beats file
    EXPECT_EQ(manifest["config"]["seed"], "11");  // flag beats --set
    EXPECT_EQ(manifest["config"]["n0_list"], "1000,2000,4000,8000");
    EXPECT_EQ(manifest["command"], "oracle");
    // EF_1 per walker is 7/40 on (3,1,0.5,16,2); this lattice is different but
    // still prints one row per cycle
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
}

TEST(RunCli, ExitCodes)
{
    const fs::path dir = scratch("exit");
    write(dir / "missing.cfg", "D1 = 0.1\nn0 = 100\nsigma_bar = 50\n");
    Ran r = run({"simulate", (dir / "missing.cfg").string(), "--out", (dir / "a").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("M: missing"), std::string::npos) << r.err;

    write(dir / "typo.cfg", "D1 = 0.1\nM = 10\nmu_typo = 1\n");
    EXPECT_EQ(run({"simulate", (dir / "typo.cfg").string(), "--out", (dir / "b").string()}).code, 2);

    write(dir / "short.cfg", std::string(kTinyLattice) + "burn_in_fraction = 0.4\nmin_population = 0\n");
    EXPECT_EQ(run({"simulate", (dir / "short.cfg").string(), "--cycles", "3", "--out", (dir / "c").string()}).code,
              3);

    EXPECT_EQ(run({"classify"}).code, 2);
    EXPECT_NE(run({"frobnicate"}).code, 0);
}

TEST(RunCli, ManifestReplayIsByteIdentical)
{
    const fs::path dir = scratch("replay");
    write(dir / "run.cfg", "n0 = 6\nn1 = 3\nr = 0.75\ntau_bar = 24\nsigma_bar = 4\nM = 3000\nseed = 42\n");
    ASSERT_EQ(run({"simulate", (dir / "run.cfg").string(), "--cycles", "30", "--out", (dir / "first").string()}).code,
              0);
    ASSERT_EQ(run({"simulate", "--manifest", (dir / "first" / "manifest.json").string(), "--jobs", "3", "--out",
                   (dir / "second").string()})
                  .code,
              0);
    const std::string a = read(dir / "first" / "cycles.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, read(dir / "second" / "cycles.csv"));
}

TEST(Sweep, RowsIndependentOfJobCount)
{
    Config cfg = Config::parse("D1 = 0.25\nM = 400\nn0_list = 40,80\nsigma_bar_list = 20,40\ncycles = 40\n"
                               "seed = 5\nmin_population = 10\n");
    cfg.set_default("L0", "1");
    cfg.set_default("D0", "1");
    cfg.set_default("mu", "1");
    cfg.set_default("burn_in_fraction", "0.1");
    const auto one = sweep(cfg, 1);
    const auto three = sweep(cfg, 3);
    ASSERT_EQ(one.size(), 4u);
    EXPECT_EQ(one, three);
    EXPECT_EQ(one[0].sigma_bar, 20);
    EXPECT_EQ(one[0].n0, 40);
    EXPECT_EQ(one[1].n0, 80);
    EXPECT_NE(combination_seed(5, 40, 20), combination_seed(5, 80, 20));
}

TEST(Report, RecoversASyntheticIntercept)
{
    std::vector<SweepRow> rows;
    for (double tau : {0.01, 0.02, 0.04, 0.08}) rows.push_back({1000, tau, 1000, 0.1, 3.5 - 4.0 * tau, 0.01, 100});
    const fs::path dir = scratch("report");
    write(dir / "a.csv", sweep_csv(rows));
    write(dir / "b.csv", sweep_csv({rows[0], rows[1]}));
    const auto merged = merge_rows({read_sweep_csv(dir / "a.csv"), read_sweep_csv(dir / "b.csv")});
    EXPECT_EQ(merged.size(), 4u);
    const auto series = summarize(merged, 1.0, 1.0);
    ASSERT_EQ(series.size(), 1u);
    ASSERT_TRUE(series[0].fit.has_value());
    EXPECT_NEAR(series[0].fit->intercept, 3.5, 1e-10);
    EXPECT_NEAR(series[0].k_theory, 3.568, 5e-4);

    const Ran r = run({"report", (dir / "a.csv").string(), "--out", (dir / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, read(dir / "out" / "report.csv"));
}

TEST(Report, MalformedCsvNamesTheLine)
{
    const fs::path dir = scratch("malformed");
    write(dir / "bad.csv", std::string(kSweepHeader) + "\n1000,0.01,1000,0.1,3.4,0.01,100\n1000,oops,1000\n");
    try {
        read_sweep_csv(dir / "bad.csv");
        FAIL() << "expected a ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    const Ran r = run({"report", (dir / "bad.csv").string()});
    EXPECT_EQ(r.code, 2);
}
