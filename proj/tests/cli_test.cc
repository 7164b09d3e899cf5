#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "experiment.h"

namespace qwalk::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string &name) {
    const auto dir = fs::temp_directory_path() / ("qwalk_cli_test_" + name);
    fs::remove_all(dir);
    return dir;
}

int run(const std::vector<std::string> &args, std::string *out = nullptr, std::string *err = nullptr) {
    std::ostringstream o, e;
    const int code = run_cli(args, o, e);
    if (out) {
        *out = o.str();
    }
    if (err) {
        *err = e.str();
    }
    return code;
}

TEST(RateSpec, Forms) {
    EXPECT_EQ(parse_rate_spec("0.25"), std::vector<double>{0.25});
    EXPECT_EQ(parse_rate_spec("0,0.5,1"), (std::vector<double>{0, 0.5, 1}));
    const auto lin = parse_rate_spec("0:1:5");
    ASSERT_EQ(lin.size(), 5u);
    EXPECT_DOUBLE_EQ(lin[1], 0.25);
    const auto lg = parse_rate_spec("0.001:0.1:3:log");
    ASSERT_EQ(lg.size(), 3u);
    EXPECT_NEAR(lg[1], 0.01, 1e-15);
    EXPECT_THROW(parse_rate_spec("x"), std::invalid_argument);
    EXPECT_THROW(parse_rate_spec("0:1"), std::invalid_argument);
    EXPECT_THROW(parse_rate_spec("0:1:2.5"), std::invalid_argument);
    EXPECT_THROW(parse_rate_spec("0.1:1:4:lin"), std::invalid_argument);
}

TEST(Config, RoundTripIsIdentity) {
    for (const auto &name : preset_names()) {
        const ExperimentConfig c = preset_config(name);
        const ExperimentConfig loaded = config_from_text(config_to_text(c));
        EXPECT_EQ(loaded, c) << name;
        EXPECT_EQ(config_to_text(loaded), config_to_text(c));
    }
    ExperimentConfig c;
    c.graph = GraphKind::hypercube;
    c.sizes = {3, 4};
    c.noise = {NoiseModel::coin_dephase, NoiseModel::full_dephase};
    c.rates = "0.01:0.1:4:log";
    c.target = 5;
    c.order = MonitorOrder::dephase_then_monitor;
    c.engine = Engine::trajectories;
    c.trajectories = 77;
    c.seed = 123456789012345ULL;
    c.epsilon = 0.1 / 3;
    c.observables = {"concurrent", "detected"};
    c.workers = 3;
    EXPECT_EQ(config_from_text(config_to_text(c)), c);
}

TEST(Config, FlagsOverridePreset) {
    const auto path = scratch("override");
    fs::create_directories(path);
    std::string out;
    ASSERT_EQ(run({"--preset", "fig4", "--size", "9", "--save-config", (path / "c.toml").string(), "--dry-run"}, &out),
              kOk);
    const auto c = config_from_text(slurp(path / "c.toml"));
    EXPECT_EQ(c.preset, "fig4");
    EXPECT_EQ(c.sizes, std::vector<int>{9});
    EXPECT_EQ(c.noise, preset_config("fig4").noise);
    EXPECT_EQ(c.epsilon, 0.01);
}

TEST(Config, FileThenFlags) {
    const auto path = scratch("file");
    fs::create_directories(path);
    ExperimentConfig base = preset_config("fig1");
    base.steps = 20;
    base.sizes = {20};
    {
        std::ofstream f(path / "in.toml");
        f << config_to_text(base);
    }
    ASSERT_EQ(run({"--config", (path / "in.toml").string(), "--seed", "9", "--save-config",
                   (path / "out.toml").string(), "--dry-run"}),
              kOk);
    ExperimentConfig expect = base;
    expect.seed = 9;
    EXPECT_EQ(config_from_text(slurp(path / "out.toml")), expect);
}

TEST(Cli, UsageErrorsAreOneLine) {
    std::string err;
    EXPECT_EQ(run({"--noise", "nonsense"}, nullptr, &err), kUsage);
    EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
    EXPECT_EQ(err.rfind("qwalk: error code=1 kind=", 0), 0u) << err;
    EXPECT_EQ(run({"--bogus"}, nullptr, &err), kUsage);
    EXPECT_EQ(run({"--preset", "fig9"}, nullptr, &err), kUsage);
    EXPECT_EQ(run({"--graph", "line", "--size", "10", "--steps", "20", "--dry-run"}, nullptr, &err), kUsage);
    EXPECT_NE(err.find("steps"), std::string::npos);
    EXPECT_EQ(run({"--p", "2", "--dry-run"}, nullptr, &err), kUsage);
    EXPECT_EQ(run({"--help"}), kOk);
}

TEST(Cli, EmptyObservablesGiveHeaderOnlyCsv) {
    const auto dir = scratch("empty");
    ASSERT_EQ(run({"--graph", "line", "--size", "10", "--steps", "10", "--out", dir.string()}), kOk);
    const std::string csv = slurp(dir / "sweep.csv");
    std::istringstream lines(csv);
    std::string line, last;
    int body = 0;
    while (std::getline(lines, line)) {
        if (!line.empty() && line[0] != '#') {
            ++body;
            last = line;
        }
    }
    EXPECT_EQ(body, 1);
    EXPECT_EQ(last, "index,size,noise,p,status");
    EXPECT_TRUE(fs::exists(dir / "metadata.json"));
}

TEST(Cli, SweepRowsFollowGridOrder) {
    const auto dir = scratch("order");
    ASSERT_EQ(run({"--graph", "line", "--size", "20", "--size", "10", "--steps", "10", "--noise", "particle_dephase",
                   "--noise", "coin_dephase", "--p", "0.3,0,0.1", "--observable", "sigma", "--workers", "3", "--out",
                   dir.string()}),
              kOk);
    std::istringstream lines(slurp(dir / "sweep.csv"));
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) {
        if (!line.empty() && line[0] != '#' && line.rfind("index", 0) != 0) {
            rows.push_back(line);
        }
    }
    const auto grid = expand_grid(config_from_text(slurp(dir / "config.toml")));
    ASSERT_EQ(rows.size(), 12u);
    ASSERT_EQ(grid.size(), 12u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::istringstream cells(rows[i]);
        std::string index, size, noise, p;
        std::getline(cells, index, ',');
        std::getline(cells, size, ',');
        std::getline(cells, noise, ',');
        std::getline(cells, p, ',');
        EXPECT_EQ(std::stoul(index), i);
        EXPECT_EQ(std::stoi(size), grid[i].size);
        EXPECT_EQ(noise, noise_model_name(grid[i].noise));
        EXPECT_EQ(std::stod(p), grid[i].p);
        EXPECT_TRUE(rows[i].ends_with(",ok")) << rows[i];
    }
    EXPECT_EQ(grid[0].size, 20);
    EXPECT_EQ(grid[0].p, 0.3);
    EXPECT_EQ(grid[3].noise, NoiseModel::coin_dephase);
}

TEST(Cli, DeterministicOutputs) {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const std::vector<std::string> common{"--graph", "cycle", "--size", "7", "--steps", "12", "--noise",
                                          "full_dephase", "--p", "0,0.2", "--engine", "trajectories",
                                          "--trajectories", "200", "--seed", "5", "--observable", "distribution",
                                          "--observable", "mixing_time", "--observable", "tvd_curve",
                                          "--epsilon", "0.2", "--horizon", "40"};
    auto with_out = [&](const fs::path &dir, const char *workers) {
        auto args = common;
        args.insert(args.end(), {"--out", dir.string(), "--workers", workers});
        return args;
    };
    ASSERT_EQ(run(with_out(a, "1")), kOk);
    ASSERT_EQ(run(with_out(b, "2")), kOk);
    for (const auto *name : {"sweep.csv", "distribution_000.csv", "distribution_001.csv", "tvd_curve_001.csv"}) {
        ASSERT_TRUE(fs::exists(a / name)) << name;
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
}

TEST(Cli, CsvFilesCarryMetadataAndLf) {
    const auto dir = scratch("meta");
    ASSERT_EQ(run({"--graph", "hypercube", "--size", "3", "--steps", "6", "--noise", "full_dephase", "--p", "0.1",
                   "--observable", "hitting", "--observable", "concurrent", "--observable", "detected", "--out",
                   dir.string()}),
              kOk);
    for (const auto *name : {"hitting_000.csv", "concurrent_000.csv", "sweep.csv"}) {
        const std::string text = slurp(dir / name);
        EXPECT_EQ(text.find('\r'), std::string::npos);
        EXPECT_NE(text.find("# graph=hypercube"), std::string::npos) << name;
        EXPECT_NE(text.find("# engine=exact"), std::string::npos) << name;
    }
    EXPECT_NE(slurp(dir / "concurrent_000.csv").find("# p=0.10000000000000001"), std::string::npos);
}

TEST(Cli, BudgetFailureIsPerRow) {
    const auto dir = scratch("budget");
    std::string err;
    // Line T=3000 has a density matrix far above the exact-engine limit;
    // the pure row is still computed.
    const int code = run({"--graph", "line", "--size", "3000", "--steps", "3000", "--noise", "full_dephase", "--p",
                          "0,0.1", "--observable", "sigma", "--out", dir.string()},
                         nullptr, &err);
    EXPECT_EQ(code, kRuntime);
    EXPECT_NE(err.find("--engine trajectories"), std::string::npos) << err;
    const std::string csv = slurp(dir / "sweep.csv");
    EXPECT_NE(csv.find("0,3000,full_dephase,0,"), std::string::npos);
    EXPECT_NE(csv.find(",ok\n"), std::string::npos);
    EXPECT_NE(csv.find("error: "), std::string::npos);
}

}  // namespace
}  // namespace qwalk::cli
