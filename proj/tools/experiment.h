#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qwalk/measures.h"

namespace qwalk::cli {

/// Parses "0.1", "lo:hi:points" (linear) or "lo:hi:points:log".
std::vector<double> parse_rate_spec(const std::string &spec);

enum class Engine { exact, trajectories };

std::string engine_name(Engine e);
Engine parse_engine(const std::string &name);

/// Everything needed to re-run an experiment. The sweep grid is
/// sizes x noise models x rates, in that order.
struct ExperimentConfig {
    std::string preset;
    GraphKind graph = GraphKind::line;
    std::vector<int> sizes{100};
    std::uint64_t graph_seed = 1;
    int steps = 100;
    /// "standard" (Hadamard on degree 2, Grover otherwise), "hadamard" or "grover".
    std::string coin = "standard";
    std::vector<NoiseModel> noise{NoiseModel::none};
    std::string rates = "0";
    /// Vertex label of the hitting target (signed position on the line). Empty
    /// picks the graph's own target.
    std::optional<std::int64_t> target;
    MonitorOrder order = MonitorOrder::monitor_then_dephase;
    Engine engine = Engine::exact;
    std::size_t trajectories = 10000;
    std::uint64_t seed = 1;
    std::vector<std::string> observables;
    double epsilon = 0.01;
    /// 0 picks the default mixing horizon.
    std::size_t horizon = 0;
    std::string out = "qwalk_out";
    unsigned workers = 0;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    bool operator==(const ExperimentConfig &) const = default;
};

/// Per-grid-point files: distribution, hitting, concurrent, tvd_curve.
const std::vector<std::string> &series_observables();
/// Columns of the aggregated sweep CSV.
const std::vector<std::string> &scalar_observables();

/// Named parameter sets; throws std::invalid_argument for unknown names.
ExperimentConfig preset_config(const std::string &name);
const std::vector<std::string> &preset_names();

/// Flat key = value text that the --config option reads back.
std::string config_to_text(const ExperimentConfig &config);
ExperimentConfig config_from_text(const std::string &text);

struct GridPoint {
    int size = 0;
    NoiseModel noise = NoiseModel::none;
    double p = 0;
};
std::vector<GridPoint> expand_grid(const ExperimentConfig &config);

struct RowResult {
    GridPoint point;
    std::vector<std::optional<double>> scalars;  // parallel to the requested scalar observables
    std::string error;
    bool ok() const { return error.empty(); }
};

struct RunSummary {
    std::vector<RowResult> rows;
    std::vector<std::filesystem::path> files;
    double wall_seconds = 0;
    bool all_ok() const;
};

/// Runs every grid point on a bounded worker pool and writes one CSV per
/// series observable and grid point, sweep.csv with the scalar observables
/// (header only when none are requested) and metadata.json.
RunSummary run_experiment(const ExperimentConfig &config);

/// Aggregated CSV body for the given rows, rows in grid order.
std::string sweep_csv(const ExperimentConfig &config, const std::vector<RowResult> &rows);

}  // namespace qwalk::cli
