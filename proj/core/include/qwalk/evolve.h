#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qwalk/channels.h"
#include "qwalk/coins.h"
#include "qwalk/graphs.h"
#include "qwalk/hilbert.h"

namespace qwalk {

/// (|+1> + i|-1>)/sqrt(2): gives a distribution symmetric under x -> -x.
std::vector<cplx> symmetric_line_coin();
/// Equal weight on every real edge leaving `vertex` (self-loop ports get zero).
std::vector<cplx> uniform_edge_coin(const Graph &g, std::size_t vertex);

struct WalkSpec {
    Graph graph;
    CoinOp coin;
    std::vector<cplx> initial_coin;
    std::size_t start = 0;

    /// Hadamard with the symmetric coin for line and cycle, Grover with the
    /// uniform edge coin for hypercube and glued trees. Starts at the graph's
    /// start vertex.
    static WalkSpec standard(Graph g);

    void validate() const;
    PureState initial_state() const;
};

/// Resource guards. Density evolution stores d^2 complex entries.
struct Budget {
    std::size_t max_density_dim = 5000;
    double max_pure_work = 5e10;  // C * V * T
};

struct SeriesMeta {
    GraphKind graph = GraphKind::line;
    int graph_size = 0;
    std::optional<std::uint64_t> graph_seed;
    NoiseSpec noise;
    std::string engine;
    std::size_t trajectories = 0;
    std::optional<std::uint64_t> seed;
};

/// P(., t) for t = 0..T. When the walk is monitored, detected[t] is the
/// probability removed at the target during step t (detected[0] = 0).
struct DistributionSeries {
    std::vector<Distribution> steps;
    std::vector<double> detected;
    SeriesMeta meta;

    std::size_t size() const { return steps.size(); }
    const Distribution &operator[](std::size_t t) const { return steps[t]; }
};

enum class MonitorOrder { monitor_then_dephase, dephase_then_monitor };

struct Monitor {
    std::size_t target = 0;
    double p = 1.0;
    MonitorOrder order = MonitorOrder::monitor_then_dephase;
};

/// Exact density evolution, one step at a time: coin, shift, then the noise
/// event (and, when present, the target monitor in the configured order).
class DensityStepper {
   public:
    DensityStepper(const WalkSpec &spec, const NoiseSpec &noise, std::optional<Monitor> monitor = std::nullopt,
                   const Budget &budget = {});

    /// Advances one step; returns the probability detected at the monitor (0 without one).
    double step();
    const DensityState &state() const { return rho_; }
    bool leaky() const { return monitor_.has_value(); }
    Distribution distribution() const;

   private:
    WalkSpec spec_;
    NoiseSpec noise_;
    std::optional<Monitor> monitor_;
    std::optional<CoinChannel> averaged_coin_;
    DensityState rho_;
    std::vector<cplx> scratch_;
};

DistributionSeries run_pure(const WalkSpec &spec, int steps, const Budget &budget = {});
/// A target_monitor noise spec turns on leaky evolution with that target.
DistributionSeries run_density(const WalkSpec &spec, const NoiseSpec &noise, int steps, const Budget &budget = {});
/// Average of `trajectories` independent stochastic pure-state runs. Each
/// trajectory owns an RNG stream derived from (seed, trajectory index), and
/// partial sums are reduced in a fixed order, so the output depends only on
/// (seed, trajectories), not on `threads`.
DistributionSeries run_trajectories(const WalkSpec &spec, const NoiseSpec &noise, int steps,
                                    std::size_t trajectories, std::uint64_t seed, unsigned threads = 0,
                                    const Budget &budget = {});

/// (1/T) sum_{t=0}^{T-1} P(., t).
Distribution time_average(const DistributionSeries &series, std::size_t window);

/// Rng for trajectory `index` of a run seeded with `seed`.
Rng trajectory_rng(std::uint64_t seed, std::uint64_t index);

/// CSV with columns t,vertex_label,probability and '#' metadata lines.
void write_series_csv(std::ostream &out, const DistributionSeries &series);

}  // namespace qwalk
