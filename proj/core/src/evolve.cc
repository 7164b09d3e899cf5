#include "qwalk/evolve.h"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

namespace qwalk {

std::vector<cplx> symmetric_line_coin() {
    const double h = std::numbers::sqrt2 / 2;
    return {cplx{h, 0}, cplx{0, h}};
}

std::vector<cplx> uniform_edge_coin(const Graph &g, std::size_t vertex) {
    std::vector<cplx> coin(g.coins());
    std::size_t real_ports = 0;
    for (std::size_t c = 0; c < g.coins(); ++c) {
        if (g.move({c, vertex}) != BasisLabel{c, vertex}) {
            coin[c] = 1.0;
            ++real_ports;
        }
    }
    const double amp = 1.0 / std::sqrt(static_cast<double>(real_ports));
    for (auto &z : coin) {
        z *= amp;
    }
    return coin;
}

WalkSpec WalkSpec::standard(Graph g) {
    WalkSpec spec;
    spec.start = g.start_vertex();
    switch (g.kind()) {
        case GraphKind::line:
        case GraphKind::cycle:
            spec.coin = hadamard();
            spec.initial_coin = symmetric_line_coin();
            break;
        case GraphKind::hypercube:
        case GraphKind::glued_trees:
            spec.coin = grover(g.coins());
            spec.initial_coin = uniform_edge_coin(g, spec.start);
            break;
    }
    spec.graph = std::move(g);
    return spec;
}

void WalkSpec::validate() const {
    if (coin.dim() != graph.coins()) {
        throw StructuralError("coin dimension " + std::to_string(coin.dim()) + " does not match graph degree " +
                              std::to_string(graph.coins()));
    }
    if (initial_coin.size() != graph.coins()) {
        throw StructuralError("initial coin state has the wrong dimension");
    }
    double n = 0;
    for (const auto &z : initial_coin) {
        n += std::norm(z);
    }
    if (std::abs(n - 1.0) > 1e-12) {
        throw std::invalid_argument("initial coin state is not normalized");
    }
    if (start >= graph.vertices()) {
        throw std::invalid_argument("start vertex out of range");
    }
    if (coin.unitarity_defect() > 1e-12) {
        throw std::invalid_argument("coin operator is not unitary");
    }
}

PureState WalkSpec::initial_state() const {
    return PureState::product(graph.space(), initial_coin, start);
}

namespace {

SeriesMeta make_meta(const WalkSpec &spec, const NoiseSpec &noise, std::string engine) {
    SeriesMeta m;
    m.graph = spec.graph.kind();
    m.graph_size = spec.graph.size();
    m.graph_seed = spec.graph.seed();
    m.noise = noise;
    m.engine = std::move(engine);
    return m;
}

void check_steps(int steps) {
    if (steps < 0) {
        throw std::invalid_argument("step count must be non-negative");
    }
}

void check_line_reach(const WalkSpec &spec, int steps) {
    if (spec.graph.kind() == GraphKind::line && steps > spec.graph.size()) {
        throw std::invalid_argument("line graph built for " + std::to_string(spec.graph.size()) +
                                    " steps cannot run " + std::to_string(steps));
    }
}

std::optional<Monitor> monitor_from(const NoiseSpec &noise) {
    if (noise.model == NoiseModel::target_monitor) {
        return Monitor{*noise.target, noise.p, MonitorOrder::monitor_then_dephase};
    }
    return std::nullopt;
}

}  // namespace

DensityStepper::DensityStepper(const WalkSpec &spec, const NoiseSpec &noise, std::optional<Monitor> monitor,
                               const Budget &budget)
    : spec_(spec), noise_(noise), monitor_(std::move(monitor)) {
    spec_.validate();
    noise_.validate();
    const std::size_t d = spec_.graph.space().dim();
    if (d > budget.max_density_dim) {
        throw BudgetExceeded("density dimension " + std::to_string(d) + " exceeds budget " +
                             std::to_string(budget.max_density_dim) + "; use the trajectory engine");
    }
    if (noise_.model == NoiseModel::target_monitor) {
        if (monitor_) {
            throw std::invalid_argument("monitor given twice");
        }
        monitor_ = monitor_from(noise_);
        noise_ = NoiseSpec::none();
    }
    if (monitor_ && monitor_->target >= spec_.graph.vertices()) {
        throw std::invalid_argument("monitor target out of range");
    }
    if (noise_.model == NoiseModel::imperfect_coin) {
        if (spec_.graph.coins() != 2) {
            throw std::invalid_argument("imperfect coin noise needs a two-dimensional coin");
        }
        averaged_coin_ = averaged_imperfect_hadamard(ImperfectCoinSpec{noise_.p});
    }
    rho_ = DensityState::from_pure(spec_.initial_state());
}

double DensityStepper::step() {
    if (averaged_coin_) {
        apply_coin_channel(rho_, *averaged_coin_);
    } else {
        apply_coin(rho_, spec_.coin);
    }
    apply_shift(rho_, spec_.graph, scratch_);
    double q = 0;
    if (monitor_ && monitor_->order == MonitorOrder::monitor_then_dephase) {
        q = monitor_target(rho_, monitor_->target, monitor_->p);
    }
    apply_channel(rho_, noise_);
    if (monitor_ && monitor_->order == MonitorOrder::dephase_then_monitor) {
        q = monitor_target(rho_, monitor_->target, monitor_->p);
    }
    check_density(rho_, leaky());
    return q;
}

Distribution DensityStepper::distribution() const {
    return spec_.graph.labelled(position_marginal(rho_).probs);
}

DistributionSeries run_pure(const WalkSpec &spec, int steps, const Budget &budget) {
    check_steps(steps);
    spec.validate();
    check_line_reach(spec, steps);
    const double work = static_cast<double>(spec.graph.space().dim()) * steps;
    if (work > budget.max_pure_work) {
        throw BudgetExceeded("pure run of " + std::to_string(steps) + " steps exceeds the work budget");
    }
    DistributionSeries out;
    out.meta = make_meta(spec, NoiseSpec::none(), "pure");
    out.steps.reserve(static_cast<std::size_t>(steps) + 1);
    PureState psi = spec.initial_state();
    out.steps.push_back(spec.graph.labelled(position_marginal(psi).probs));
    for (int t = 0; t < steps; ++t) {
        apply_coin(psi, spec.coin);
        apply_shift(psi, spec.graph);
        check_pure(psi);
        out.steps.push_back(spec.graph.labelled(position_marginal(psi).probs));
    }
    return out;
}

DistributionSeries run_density(const WalkSpec &spec, const NoiseSpec &noise, int steps, const Budget &budget) {
    check_steps(steps);
    check_line_reach(spec, steps);
    DensityStepper stepper(spec, noise, std::nullopt, budget);
    DistributionSeries out;
    out.meta = make_meta(spec, noise, "exact");
    out.steps.reserve(static_cast<std::size_t>(steps) + 1);
    out.steps.push_back(stepper.distribution());
    if (stepper.leaky()) {
        out.detected.push_back(0.0);
    }
    for (int t = 0; t < steps; ++t) {
        const double q = stepper.step();
        out.steps.push_back(stepper.distribution());
        if (stepper.leaky()) {
            out.detected.push_back(q);
        }
    }
    return out;
}

Rng trajectory_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

namespace {

struct BlockSums {
    std::vector<double> probs;     // (steps + 1) * V, row per step
    std::vector<double> detected;  // steps + 1
};

void run_block(const WalkSpec &spec, const NoiseSpec &noise, int steps, std::uint64_t seed, std::size_t first,
               std::size_t last, BlockSums &sums) {
    const std::size_t v = spec.graph.vertices();
    const ImperfectCoinSpec imperfect{noise.model == NoiseModel::imperfect_coin ? noise.p : 0.0};
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t k = first; k < last; ++k) {
        Rng rng = trajectory_rng(seed, k);
        PureState psi = spec.initial_state();
        auto accumulate = [&](std::size_t t) {
            const auto amps = psi.amplitudes();
            double *row = sums.probs.data() + t * v;
            for (std::size_t i = 0; i < amps.size(); ++i) {
                row[i % v] += std::norm(amps[i]);
            }
        };
        accumulate(0);
        for (int t = 1; t <= steps; ++t) {
            if (noise.model == NoiseModel::imperfect_coin) {
                apply_coin(psi, sample_imperfect_hadamard(imperfect, rng));
            } else {
                apply_coin(psi, spec.coin);
            }
            apply_shift(psi, spec.graph);
            if (noise.model == NoiseModel::target_monitor) {
                if (noise.p >= 1 || unit(rng) < noise.p) {
                    sums.detected[static_cast<std::size_t>(t)] += monitor_target(psi, *noise.target);
                }
            } else {
                trajectory_collapse(psi, noise, rng);
            }
            accumulate(static_cast<std::size_t>(t));
        }
    }
}

}  // namespace

DistributionSeries run_trajectories(const WalkSpec &spec, const NoiseSpec &noise, int steps,
                                    std::size_t trajectories, std::uint64_t seed, unsigned threads,
                                    const Budget &budget) {
    check_steps(steps);
    spec.validate();
    noise.validate();
    check_line_reach(spec, steps);
    if (trajectories == 0) {
        throw std::invalid_argument("trajectory ensemble needs at least one member");
    }
    if (noise.model == NoiseModel::imperfect_coin && spec.graph.coins() != 2) {
        throw std::invalid_argument("imperfect coin noise needs a two-dimensional coin");
    }
    if (noise.model == NoiseModel::target_monitor && *noise.target >= spec.graph.vertices()) {
        throw std::invalid_argument("monitor target out of range");
    }
    const double work = static_cast<double>(spec.graph.space().dim()) * steps * static_cast<double>(trajectories);
    if (work > budget.max_pure_work * 100) {
        throw BudgetExceeded("trajectory ensemble exceeds the work budget");
    }

    const std::size_t v = spec.graph.vertices();
    const std::size_t rows = static_cast<std::size_t>(steps) + 1;
    // Block layout depends only on the ensemble size, never on the thread count.
    const std::size_t block = std::max<std::size_t>(64, (trajectories + 511) / 512);
    const std::size_t blocks = (trajectories + block - 1) / block;
    std::vector<BlockSums> partial(blocks);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t b = next++; b < blocks; b = next++) {
            BlockSums &sums = partial[b];
            sums.probs.assign(rows * v, 0.0);
            sums.detected.assign(rows, 0.0);
            run_block(spec, noise, steps, seed, b * block, std::min(trajectories, (b + 1) * block), sums);
        }
    };
    unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, blocks));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
        worker();
    }

    std::vector<double> total(rows * v, 0.0);
    std::vector<double> detected(rows, 0.0);
    for (const auto &sums : partial) {
        for (std::size_t i = 0; i < total.size(); ++i) {
            total[i] += sums.probs[i];
        }
        for (std::size_t t = 0; t < rows; ++t) {
            detected[t] += sums.detected[t];
        }
    }

    DistributionSeries out;
    out.meta = make_meta(spec, noise, "trajectories");
    out.meta.trajectories = trajectories;
    out.meta.seed = seed;
    const double inv = 1.0 / static_cast<double>(trajectories);
    for (std::size_t t = 0; t < rows; ++t) {
        std::vector<double> p(total.begin() + static_cast<std::ptrdiff_t>(t * v),
                              total.begin() + static_cast<std::ptrdiff_t>((t + 1) * v));
        for (auto &x : p) {
            x *= inv;
        }
        out.steps.push_back(spec.graph.labelled(std::move(p)));
    }
    if (noise.model == NoiseModel::target_monitor) {
        for (auto &x : detected) {
            x *= inv;
        }
        out.detected = std::move(detected);
    }
    return out;
}

Distribution time_average(const DistributionSeries &series, std::size_t window) {
    if (window == 0) {
        throw std::invalid_argument("time average needs T >= 1");
    }
    if (series.size() < window) {
        throw std::invalid_argument("series shorter than the averaging window");
    }
    Distribution avg = series[0];
    std::fill(avg.probs.begin(), avg.probs.end(), 0.0);
    for (std::size_t t = 0; t < window; ++t) {
        const auto &p = series[t].probs;
        for (std::size_t i = 0; i < p.size(); ++i) {
            avg.probs[i] += p[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(window);
    for (auto &x : avg.probs) {
        x *= inv;
    }
    return avg;
}

void write_series_csv(std::ostream &out, const DistributionSeries &series) {
    const auto &m = series.meta;
    out << "# graph=" << graph_kind_name(m.graph) << '\n';
    out << "# size=" << m.graph_size << '\n';
    if (m.graph_seed) {
        out << "# graph_seed=" << *m.graph_seed << '\n';
    }
    out << "# steps=" << (series.size() == 0 ? 0 : series.size() - 1) << '\n';
    out << "# noise=" << noise_model_name(m.noise.model) << '\n';
    out << fmt::format("# p={:.17g}\n", m.noise.p);
    if (m.noise.target) {
        out << "# target=" << *m.noise.target << '\n';
    }
    out << "# engine=" << m.engine << '\n';
    if (m.engine == "trajectories") {
        out << "# trajectories=" << m.trajectories << '\n';
    }
    if (m.seed) {
        out << "# seed=" << *m.seed << '\n';
    }
    out << "t,vertex_label,probability\n";
    for (std::size_t t = 0; t < series.size(); ++t) {
        const auto &d = series[t];
        for (std::size_t i = 0; i < d.size(); ++i) {
            out << fmt::format("{},{},{:.17g}\n", t, d.labels[i], d.probs[i]);
        }
    }
}

}  // namespace qwalk
