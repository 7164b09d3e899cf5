#include "experiment.h"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace qwalk::cli {

namespace {

double parse_double(const std::string &s, const std::string &what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used != s.size() || s.empty()) {
        throw std::invalid_argument("bad " + what + " '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        out.push_back(cur);
    }
    if (!s.empty() && s.back() == sep) {
        out.emplace_back();
    }
    return out;
}

}  // namespace

std::vector<double> parse_rate_spec(const std::string &spec) {
    if (spec.find(',') != std::string::npos) {
        std::vector<double> out;
        for (const auto &part : split(spec, ',')) {
            out.push_back(parse_double(part, "rate"));
        }
        return out;
    }
    const auto parts = split(spec, ':');
    if (parts.size() == 1) {
        return {parse_double(parts[0], "rate")};
    }
    if (parts.size() != 3 && parts.size() != 4) {
        throw std::invalid_argument("rate grid must be lo:hi:points[:log], got '" + spec + "'");
    }
    const double lo = parse_double(parts[0], "grid start");
    const double hi = parse_double(parts[1], "grid stop");
    const double n = parse_double(parts[2], "grid size");
    if (n < 1 || n != std::floor(n)) {
        throw std::invalid_argument("grid size must be a positive integer");
    }
    if (parts.size() == 4) {
        if (parts[3] != "log") {
            throw std::invalid_argument("grid spacing must be 'log', got '" + parts[3] + "'");
        }
        return log_grid(lo, hi, static_cast<std::size_t>(n));
    }
    return linear_grid(lo, hi, static_cast<std::size_t>(n));
}

std::string engine_name(Engine e) { return e == Engine::exact ? "exact" : "trajectories"; }

Engine parse_engine(const std::string &name) {
    if (name == "exact" || name == "density") {
        return Engine::exact;
    }
    if (name == "trajectories") {
        return Engine::trajectories;
    }
    throw std::invalid_argument("unknown engine '" + name + "'");
}

const std::vector<std::string> &series_observables() {
    static const std::vector<std::string> names{"distribution", "hitting", "concurrent", "tvd_curve"};
    return names;
}

const std::vector<std::string> &scalar_observables() {
    static const std::vector<std::string> names{"sigma",       "nu",       "mixing_time",
                                                "peak_step",   "peak_height", "concurrent_peak",
                                                "detected"};
    return names;
}

namespace {

bool contains(const std::vector<std::string> &v, const std::string &s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

std::vector<std::string> requested_scalars(const ExperimentConfig &c) {
    std::vector<std::string> out;
    for (const auto &o : c.observables) {
        if (contains(scalar_observables(), o)) {
            out.push_back(o);
        }
    }
    return out;
}

std::string order_name(MonitorOrder o) {
    return o == MonitorOrder::monitor_then_dephase ? "monitor_then_dephase" : "dephase_then_monitor";
}

}  // namespace

void ExperimentConfig::validate() const {
    if (sizes.empty()) {
        throw std::invalid_argument("size: at least one graph size is required");
    }
    if (noise.empty()) {
        throw std::invalid_argument("noise: at least one model is required");
    }
    if (steps < 0) {
        throw std::invalid_argument("steps: must be non-negative");
    }
    if (coin != "standard" && coin != "hadamard" && coin != "grover") {
        throw std::invalid_argument("coin: expected standard, hadamard or grover, got '" + coin + "'");
    }
    if (coin == "hadamard" && graph != GraphKind::line && graph != GraphKind::cycle) {
        throw std::invalid_argument("coin: hadamard needs a degree-2 graph");
    }
    for (double p : parse_rate_spec(rates)) {
        if (!(p >= 0 && p <= 1)) {
            throw std::invalid_argument(fmt::format("p: rate {} outside [0, 1]", p));
        }
    }
    if (engine == Engine::trajectories && trajectories == 0) {
        throw std::invalid_argument("trajectories: must be at least 1");
    }
    if (!(epsilon > 0)) {
        throw std::invalid_argument("epsilon: must be positive");
    }
    for (const auto &o : observables) {
        if (!contains(series_observables(), o) && !contains(scalar_observables(), o)) {
            throw std::invalid_argument("observable: unknown '" + o + "'");
        }
    }
    const bool line = graph == GraphKind::line;
    if (!line && (contains(observables, "sigma") || contains(observables, "nu"))) {
        throw std::invalid_argument("observable: sigma and nu need the line graph");
    }
    if (graph != GraphKind::cycle && (contains(observables, "mixing_time") || contains(observables, "tvd_curve"))) {
        throw std::invalid_argument("observable: mixing_time and tvd_curve need the cycle graph");
    }
    for (int n : sizes) {
        if (line && steps > n) {
            throw std::invalid_argument(fmt::format("steps: line of size {} supports at most {} steps", n, n));
        }
    }
    for (NoiseModel m : noise) {
        if (m == NoiseModel::target_monitor) {
            throw std::invalid_argument("noise: use the concurrent observables instead of target_monitor");
        }
        if (m == NoiseModel::imperfect_coin && graph != GraphKind::line && graph != GraphKind::cycle) {
            throw std::invalid_argument("noise: imperfect_coin needs a two-dimensional coin");
        }
    }
}

ExperimentConfig preset_config(const std::string &name) {
    ExperimentConfig c;
    c.preset = name;
    if (name == "fig1") {
        c.graph = GraphKind::line;
        c.sizes = {200};
        c.steps = 200;
        c.noise = {NoiseModel::full_dephase};
        c.rates = "0,0.013,1";
        c.observables = {"distribution", "sigma", "nu"};
    } else if (name == "fig2") {
        c.graph = GraphKind::line;
        c.sizes = {100};
        c.steps = 100;
        c.noise = {NoiseModel::coin_dephase, NoiseModel::particle_dephase, NoiseModel::full_dephase,
                   NoiseModel::imperfect_coin};
        c.rates = "0:0.1:11";
        c.observables = {"sigma"};
    } else if (name == "fig3") {
        c.graph = GraphKind::line;
        c.sizes = {200};
        c.steps = 200;
        c.noise = {NoiseModel::coin_dephase, NoiseModel::particle_dephase, NoiseModel::full_dephase};
        c.rates = "0.00025:0.05:25:log";
        c.observables = {"nu"};
    } else if (name == "fig4") {
        c.graph = GraphKind::cycle;
        c.sizes = {28, 29, 30};
        c.steps = 0;
        c.noise = {NoiseModel::coin_dephase, NoiseModel::particle_dephase};
        c.rates = "0.001:0.2:12:log";
        c.observables = {"mixing_time"};
        c.epsilon = 0.01;
    } else if (name == "fig5") {
        c.graph = GraphKind::hypercube;
        c.sizes = {9};
        c.steps = 30;
        c.noise = {NoiseModel::full_dephase};
        c.rates = "0,0.05,0.1111111111111111";
        c.observables = {"hitting", "concurrent", "peak_step", "peak_height", "concurrent_peak", "detected"};
    } else if (name == "glued") {
        c.graph = GraphKind::glued_trees;
        c.sizes = {4};
        c.steps = 40;
        c.noise = {NoiseModel::full_dephase};
        c.rates = "0,0.02,0.05";
        c.observables = {"hitting", "peak_step", "peak_height"};
    } else {
        throw std::invalid_argument("preset: unknown '" + name + "'");
    }
    return c;
}

const std::vector<std::string> &preset_names() {
    static const std::vector<std::string> names{"fig1", "fig2", "fig3", "fig4", "fig5", "glued"};
    return names;
}

namespace {

std::string quoted(const std::string &s) { return "\"" + s + "\""; }

template <class T, class F>
std::string toml_list(const std::vector<T> &v, F &&show) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + show(v[i]);
    }
    return out + "]";
}

}  // namespace

std::string config_to_text(const ExperimentConfig &c) {
    std::string t;
    t += "preset = " + quoted(c.preset) + "\n";
    t += "graph = " + quoted(std::string(graph_kind_name(c.graph))) + "\n";
    t += "size = " + toml_list(c.sizes, [](int n) { return std::to_string(n); }) + "\n";
    t += fmt::format("graph-seed = {}\n", c.graph_seed);
    t += fmt::format("steps = {}\n", c.steps);
    t += "coin = " + quoted(c.coin) + "\n";
    t += "noise = " + toml_list(c.noise, [](NoiseModel m) { return quoted(std::string(noise_model_name(m))); }) + "\n";
    t += "p = " + quoted(c.rates) + "\n";
    if (c.target) {
        t += fmt::format("target = {}\n", *c.target);
    }
    t += "order = " + quoted(order_name(c.order)) + "\n";
    t += "engine = " + quoted(engine_name(c.engine)) + "\n";
    t += fmt::format("trajectories = {}\n", c.trajectories);
    t += fmt::format("seed = {}\n", c.seed);
    t += "observable = " + toml_list(c.observables, quoted) + "\n";
    t += fmt::format("epsilon = {:.17g}\n", c.epsilon);
    t += fmt::format("horizon = {}\n", c.horizon);
    t += "out = " + quoted(c.out) + "\n";
    t += fmt::format("workers = {}\n", c.workers);
    return t;
}

std::vector<GridPoint> expand_grid(const ExperimentConfig &c) {
    const auto rates = parse_rate_spec(c.rates);
    std::vector<GridPoint> grid;
    for (int n : c.sizes) {
        for (NoiseModel m : c.noise) {
            for (double p : rates) {
                grid.push_back({n, m, p});
            }
        }
    }
    return grid;
}

bool RunSummary::all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const RowResult &r) { return r.ok(); });
}

namespace {

Graph make_graph(const ExperimentConfig &c, int size) {
    switch (c.graph) {
        case GraphKind::line:
            return build_line(size);
        case GraphKind::cycle:
            return build_cycle(size);
        case GraphKind::hypercube:
            return build_hypercube(size);
        case GraphKind::glued_trees:
            return build_glued_trees(size, c.graph_seed);
    }
    throw std::logic_error("unhandled graph kind");
}

WalkSpec make_spec(const ExperimentConfig &c, int size) {
    WalkSpec spec = WalkSpec::standard(make_graph(c, size));
    if (c.coin == "hadamard") {
        spec.coin = hadamard();
    } else if (c.coin == "grover") {
        spec.coin = grover(spec.graph.coins());
    }
    return spec;
}

std::size_t resolve_target(const ExperimentConfig &c, const Graph &g) {
    if (c.target) {
        for (std::size_t v = 0; v < g.vertices(); ++v) {
            if (g.label(v) == *c.target) {
                return v;
            }
        }
        throw std::invalid_argument(fmt::format("target: no vertex labelled {}", *c.target));
    }
    if (!g.target_vertex()) {
        throw std::invalid_argument("target: this graph has no default target, pass --target");
    }
    return *g.target_vertex();
}

std::uint64_t point_seed(const ExperimentConfig &c, std::size_t index) { return c.seed + index; }

DistributionSeries evolve(const ExperimentConfig &c, const WalkSpec &spec, const NoiseSpec &noise, int steps,
                          std::size_t index) {
    if (c.engine == Engine::trajectories) {
        return run_trajectories(spec, noise, steps, c.trajectories, point_seed(c, index));
    }
    if (noise.model == NoiseModel::none || noise.p == 0) {
        return run_pure(spec, steps);
    }
    return run_density(spec, noise, steps);
}

// The distribution writer adds the walk and noise lines itself.
std::string run_lines(const ExperimentConfig &c, std::size_t index) {
    return fmt::format("# preset={}\n# grid_index={}\n# coin={}\n", c.preset, index, c.coin);
}

std::string metadata_lines(const ExperimentConfig &c, const GridPoint &pt, std::size_t index) {
    std::string s;
    s += fmt::format("# preset={}\n", c.preset);
    s += fmt::format("# grid_index={}\n", index);
    s += fmt::format("# graph={}\n# size={}\n# graph_seed={}\n", graph_kind_name(c.graph), pt.size, c.graph_seed);
    s += fmt::format("# steps={}\n# coin={}\n", c.steps, c.coin);
    s += fmt::format("# noise={}\n# p={:.17g}\n", noise_model_name(pt.noise), pt.p);
    s += fmt::format("# engine={}\n# trajectories={}\n# seed={}\n", engine_name(c.engine),
                     c.engine == Engine::trajectories ? c.trajectories : 0, point_seed(c, index));
    s += fmt::format("# order={}\n# epsilon={:.17g}\n", order_name(c.order), c.epsilon);
    return s;
}

std::filesystem::path series_path(const ExperimentConfig &c, const std::string &obs, std::size_t index) {
    return std::filesystem::path(c.out) / fmt::format("{}_{:03d}.csv", obs, index);
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    f << text;
}

struct PointOutput {
    RowResult row;
    std::vector<std::filesystem::path> files;
};

PointOutput run_point(const ExperimentConfig &c, const GridPoint &pt, std::size_t index) {
    PointOutput out;
    out.row.point = pt;
    const auto scalars = requested_scalars(c);
    out.row.scalars.assign(scalars.size(), std::nullopt);
    auto set_scalar = [&](const std::string &name, double v) {
        for (std::size_t i = 0; i < scalars.size(); ++i) {
            if (scalars[i] == name) {
                out.row.scalars[i] = v;
            }
        }
    };
    auto wants = [&](const char *name) { return contains(c.observables, name); };

    const WalkSpec spec = make_spec(c, pt.size);
    const NoiseSpec noise{pt.noise, pt.p, std::nullopt};
    noise.validate();
    const std::string meta = metadata_lines(c, pt, index);

    const bool need_base = wants("distribution") || wants("hitting") || wants("sigma") || wants("nu") ||
                           wants("peak_step") || wants("peak_height");
    if (need_base) {
        const DistributionSeries series = evolve(c, spec, noise, c.steps, index);
        if (wants("distribution")) {
            std::ostringstream text;
            text << run_lines(c, index);
            write_series_csv(text, series);
            out.files.push_back(series_path(c, "distribution", index));
            write_text(out.files.back(), text.str());
        }
        if (wants("sigma")) {
            set_scalar("sigma", std_dev(series.steps.back()));
        }
        if (wants("nu")) {
            set_scalar("nu", tvd(series.steps.back(), uniform_line_target(c.steps)));
        }
        if (wants("hitting") || wants("peak_step") || wants("peak_height")) {
            const auto curve = one_shot_hitting(series, resolve_target(c, spec.graph));
            if (wants("hitting")) {
                std::ostringstream text;
                text << meta << fmt::format("# target={}\n", spec.graph.label(resolve_target(c, spec.graph)));
                write_hitting_csv(text, curve);
                out.files.push_back(series_path(c, "hitting", index));
                write_text(out.files.back(), text.str());
            }
            if (const auto peak = first_peak(curve.per_step)) {
                set_scalar("peak_step", static_cast<double>(peak->step));
                set_scalar("peak_height", peak->height);
            }
        }
    }

    if (wants("mixing_time") || wants("tvd_curve")) {
        const bool quiet = noise.model == NoiseModel::none || noise.p == 0;
        std::size_t horizon = c.horizon;
        if (horizon == 0) {
            horizon = default_mixing_horizon(pt.size, c.epsilon, true);
            if (!quiet) {
                horizon = std::max(horizon, default_mixing_horizon(pt.size, c.epsilon, false));
            }
        }
        const auto series = evolve(c, spec, noise, static_cast<int>(horizon) - 1, index);
        const auto mix = mixing_time(series, c.epsilon, horizon);
        if (mix.mixes()) {
            set_scalar("mixing_time", static_cast<double>(*mix.mixing_time));
        }
        if (wants("tvd_curve")) {
            std::ostringstream text;
            text << meta;
            write_tvd_curve_csv(text, mix);
            out.files.push_back(series_path(c, "tvd_curve", index));
            write_text(out.files.back(), text.str());
        }
    }

    if (wants("concurrent") || wants("concurrent_peak") || wants("detected")) {
        const std::size_t target = resolve_target(c, spec.graph);
        HittingCurve curve;
        if (c.engine == Engine::exact) {
            curve = concurrent_hitting(spec, noise, c.steps, target, c.order);
        } else {
            if (noise.model != NoiseModel::none && noise.p != 0) {
                throw std::invalid_argument("concurrent hitting with dephasing needs the exact engine");
            }
            const auto s = run_trajectories(spec, NoiseSpec::monitor(target), c.steps, c.trajectories,
                                            point_seed(c, index));
            curve.concurrent = true;
            curve.per_step = s.detected;
            curve.cumulative.resize(s.detected.size());
            double acc = 0;
            for (std::size_t t = 0; t < s.detected.size(); ++t) {
                acc += s.detected[t];
                curve.cumulative[t] = acc;
            }
        }
        if (wants("concurrent")) {
            std::ostringstream text;
            text << meta << fmt::format("# target={}\n", spec.graph.label(target));
            write_hitting_csv(text, curve);
            out.files.push_back(series_path(c, "concurrent", index));
            write_text(out.files.back(), text.str());
        }
        if (const auto peak = first_peak(curve.per_step)) {
            set_scalar("concurrent_peak", peak->height);
        }
        set_scalar("detected", curve.cumulative.back());
    }
    return out;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), ',', ';');
    return s;
}

std::string timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

nlohmann::json config_json(const ExperimentConfig &c) {
    nlohmann::json j;
    j["preset"] = c.preset;
    j["graph"] = std::string(graph_kind_name(c.graph));
    j["size"] = c.sizes;
    j["graph_seed"] = c.graph_seed;
    j["steps"] = c.steps;
    j["coin"] = c.coin;
    std::vector<std::string> noise;
    for (auto m : c.noise) {
        noise.emplace_back(noise_model_name(m));
    }
    j["noise"] = noise;
    j["p"] = c.rates;
    j["target"] = c.target ? nlohmann::json(*c.target) : nlohmann::json(nullptr);
    j["order"] = order_name(c.order);
    j["engine"] = engine_name(c.engine);
    j["trajectories"] = c.trajectories;
    j["seed"] = c.seed;
    j["observable"] = c.observables;
    j["epsilon"] = c.epsilon;
    j["horizon"] = c.horizon;
    j["out"] = c.out;
    j["workers"] = c.workers;
    return j;
}

}  // namespace

std::string sweep_csv(const ExperimentConfig &c, const std::vector<RowResult> &rows) {
    const auto scalars = requested_scalars(c);
    std::string s;
    s += fmt::format("# preset={}\n# graph={}\n# graph_seed={}\n# steps={}\n# coin={}\n", c.preset,
                     graph_kind_name(c.graph), c.graph_seed, c.steps, c.coin);
    s += fmt::format("# engine={}\n# trajectories={}\n# seed={}\n# epsilon={:.17g}\n# horizon={}\n",
                     engine_name(c.engine), c.engine == Engine::trajectories ? c.trajectories : 0, c.seed, c.epsilon,
                     c.horizon);
    s += "index,size,noise,p";
    for (const auto &name : scalars) {
        s += "," + name;
    }
    s += ",status\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto &r = rows[i];
        s += fmt::format("{},{},{},{:.17g}", i, r.point.size, noise_model_name(r.point.noise), r.point.p);
        for (const auto &v : r.scalars) {
            s += v ? fmt::format(",{:.17g}", *v) : std::string(",");
        }
        s += "," + (r.ok() ? std::string("ok") : "error: " + one_line(r.error)) + "\n";
    }
    return s;
}

RunSummary run_experiment(const ExperimentConfig &config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(config.out);

    RunSummary summary;
    const auto grid = config.observables.empty() ? std::vector<GridPoint>{} : expand_grid(config);
    std::vector<PointOutput> outputs(grid.size());

    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            const auto start = std::chrono::steady_clock::now();
            try {
                outputs[i] = run_point(config, grid[i], i);
            } catch (const std::exception &e) {
                outputs[i].row.point = grid[i];
                outputs[i].row.scalars.assign(requested_scalars(config).size(), std::nullopt);
                outputs[i].row.error = e.what();
                if (dynamic_cast<const BudgetExceeded *>(&e) != nullptr) {
                    outputs[i].row.error += " (try --engine trajectories)";
                }
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::lock_guard lock(log_mutex);
            std::cerr << fmt::format("qwalk: [{}/{}] size={} noise={} p={:.6g} {} ({:.2f}s)\n", i + 1, grid.size(),
                                     grid[i].size, noise_model_name(grid[i].noise), grid[i].p,
                                     outputs[i].row.ok() ? "ok" : "failed: " + one_line(outputs[i].row.error), secs);
        }
    };
    unsigned workers = config.workers != 0 ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(grid.size(), 1)));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }

    for (auto &o : outputs) {
        summary.rows.push_back(std::move(o.row));
        summary.files.insert(summary.files.end(), o.files.begin(), o.files.end());
    }
    const auto sweep_path = std::filesystem::path(config.out) / "sweep.csv";
    write_text(sweep_path, sweep_csv(config, summary.rows));
    summary.files.push_back(sweep_path);
    const auto config_path = std::filesystem::path(config.out) / "config.toml";
    write_text(config_path, config_to_text(config));
    summary.files.push_back(config_path);

    summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json meta;
    meta["config"] = config_json(config);
    meta["wall_time_s"] = summary.wall_seconds;
    meta["finished_at"] = timestamp();
    meta["grid_points"] = grid.size();
    meta["failed_points"] = std::count_if(summary.rows.begin(), summary.rows.end(), [](const RowResult &r) { return !r.ok(); });
    std::vector<std::string> files;
    for (const auto &f : summary.files) {
        files.push_back(f.filename().string());
    }
    meta["files"] = files;
    const auto meta_path = std::filesystem::path(config.out) / "metadata.json";
    write_text(meta_path, meta.dump(2) + "\n");
    summary.files.push_back(meta_path);
    return summary;
}

}  // namespace qwalk::cli
