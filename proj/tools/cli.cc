#include "cli.h"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "experiment.h"

namespace qwalk::cli {

namespace {

struct Extras {
    std::string save_config;
    bool dry_run = false;
    bool list_presets = false;
};

MonitorOrder parse_order(const std::string &s) {
    if (s == "monitor_then_dephase") {
        return MonitorOrder::monitor_then_dephase;
    }
    if (s == "dephase_then_monitor") {
        return MonitorOrder::dephase_then_monitor;
    }
    throw CLI::ValidationError("--order", "expected monitor_then_dephase or dephase_then_monitor, got '" + s + "'");
}

// Enum setters rethrow as CLI errors so bad values count as usage errors.
template <class F>
auto checked(const std::string &flag, F &&f) {
    return [flag, f = std::forward<F>(f)](const auto &v) {
        try {
            f(v);
        } catch (const std::invalid_argument &e) {
            throw CLI::ValidationError(flag, e.what());
        }
    };
}

// Options only write to `c` when given, so whatever `c` holds on entry acts
// as the default.
void bind(CLI::App &app, ExperimentConfig &c, Extras &x) {
    app.add_option("--preset", c.preset, "Named parameter set: fig1 fig2 fig3 fig4 fig5 glued");
    app.add_option_function<std::string>(
        "--graph", checked("--graph", [&c](const std::string &s) { c.graph = parse_graph_kind(s); }),
        "line, cycle, hypercube or glued_trees");
    app.add_option("--size", c.sizes, "T (line), N (cycle, hypercube) or depth (glued trees); repeatable");
    app.add_option("--graph-seed", c.graph_seed, "Seed of the random glued-trees gluing");
    app.add_option("--steps", c.steps, "Walk steps T");
    app.add_option("--coin", c.coin, "standard, hadamard or grover");
    app.add_option_function<std::vector<std::string>>(
        "--noise",
        checked("--noise",
                [&c](const std::vector<std::string> &v) {
                    c.noise.clear();
                    for (const auto &s : v) {
                        c.noise.push_back(parse_noise_model(s));
                    }
                }),
        "none, coin_dephase, particle_dephase, full_dephase or imperfect_coin; repeatable");
    app.add_option("--p", c.rates, "Rate: value, a,b,c list, or lo:hi:points[:log]");
    app.add_option_function<std::int64_t>(
        "--target", [&c](std::int64_t v) { c.target = v; }, "Hitting target vertex label");
    app.add_option_function<std::string>("--order", [&c](const std::string &s) { c.order = parse_order(s); },
                                         "Monitor and dephasing order in concurrent runs");
    app.add_option_function<std::string>(
        "--engine", checked("--engine", [&c](const std::string &s) { c.engine = parse_engine(s); }),
        "exact or trajectories");
    app.add_option("--trajectories", c.trajectories, "Trajectory count M");
    app.add_option("--seed", c.seed, "Master trajectory seed");
    app.add_option("--observable", c.observables,
                   "distribution hitting concurrent tvd_curve sigma nu mixing_time peak_step peak_height "
                   "concurrent_peak detected; repeatable");
    app.add_option("--epsilon", c.epsilon, "Mixing threshold");
    app.add_option("--horizon", c.horizon, "Mixing horizon, 0 for the default");
    app.add_option("--out", c.out, "Output directory");
    app.add_option("--workers", c.workers, "Worker threads, 0 for all cores");
    app.set_config("--config", "", "Read options from a key = value file");
    app.add_option("--save-config", x.save_config, "Write the resolved config to this file");
    app.add_flag("--dry-run", x.dry_run, "Validate and print the grid without running");
    app.add_flag("--list-presets", x.list_presets, "Print preset names and exit");
}

ExperimentConfig start_from(const std::string &preset) {
    return preset.empty() ? ExperimentConfig{} : preset_config(preset);
}

std::string escape(std::string s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
        }
        out += ch == '\n' ? ' ' : ch;
    }
    return out;
}

int fail(std::ostream &err, ExitCode code, const std::string &kind, const std::string &msg) {
    err << fmt::format("qwalk: error code={} kind={} msg=\"{}\"\n", static_cast<int>(code), kind, escape(msg));
    return code;
}

// Two passes: the first only learns the preset, the second layers the given
// flags and config keys over that preset.
template <class Parse>
ExperimentConfig resolve(Parse &&parse, Extras &x) {
    std::string preset;
    {
        ExperimentConfig probe;
        Extras ignored;
        CLI::App app{"qwalk"};
        bind(app, probe, ignored);
        parse(app);
        preset = probe.preset;
    }
    ExperimentConfig c = start_from(preset);
    CLI::App app{"qwalk"};
    bind(app, c, x);
    parse(app);
    c.preset = preset;
    return c;
}

}  // namespace

ExperimentConfig config_from_text(const std::string &text) {
    Extras x;
    return resolve(
        [&](CLI::App &app) {
            std::istringstream in(text);
            app.parse_from_stream(in);
        },
        x);
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    Extras x;
    ExperimentConfig config;
    try {
        config = resolve(
            [&](CLI::App &app) {
                std::vector<std::string> reversed(args.rbegin(), args.rend());
                app.parse(reversed);
            },
            x);
    } catch (const CLI::CallForHelp &) {
        CLI::App app{"Coined quantum walk experiments with decoherence"};
        ExperimentConfig c;
        Extras ignored;
        bind(app, c, ignored);
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError &e) {
        return fail(err, kUsage, "usage", e.what());
    } catch (const std::invalid_argument &e) {
        return fail(err, kUsage, "usage", e.what());
    }

    if (x.list_presets) {
        for (const auto &name : preset_names()) {
            out << name << '\n';
        }
        return kOk;
    }

    try {
        config.validate();
    } catch (const std::invalid_argument &e) {
        return fail(err, kUsage, "invalid_config", e.what());
    }

    if (!x.save_config.empty()) {
        std::ofstream f(x.save_config, std::ios::binary);
        if (!(f << config_to_text(config))) {
            return fail(err, kRuntime, "io", "cannot write " + x.save_config);
        }
    }

    if (x.dry_run) {
        out << config_to_text(config);
        const auto grid = expand_grid(config);
        out << fmt::format("# {} grid points\n", grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out << fmt::format("# {} size={} noise={} p={:.17g}\n", i, grid[i].size, noise_model_name(grid[i].noise),
                               grid[i].p);
        }
        return kOk;
    }

    RunSummary summary;
    try {
        summary = run_experiment(config);
    } catch (const std::exception &e) {
        return fail(err, kRuntime, "runtime", e.what());
    }
    for (const auto &f : summary.files) {
        out << f.string() << '\n';
    }
    const auto failed = std::count_if(summary.rows.begin(), summary.rows.end(), [](const RowResult &r) { return !r.ok(); });
    out << fmt::format("qwalk: {} grid points, {} failed, {:.2f}s\n", summary.rows.size(), failed, summary.wall_seconds);
    if (failed > 0) {
        const auto first = std::find_if(summary.rows.begin(), summary.rows.end(), [](const RowResult &r) { return !r.ok(); });
        const bool budget = first->error.find("--engine trajectories") != std::string::npos;
        return fail(err, kRuntime, budget ? "budget" : "partial",
                    fmt::format("{} of {} grid points failed, first: {}", failed, summary.rows.size(), first->error));
    }
    return kOk;
}

}  // namespace qwalk::cli
