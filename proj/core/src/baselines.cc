#include <stdexcept>
#include <vector>

#include "qwalk/measures.h"

namespace qwalk {

namespace {

// One step of the unbiased walk: every vertex spreads its mass evenly over its neighbours.
void markov_step(const std::vector<std::vector<std::size_t>> &adj, const std::vector<double> &in,
                 std::vector<double> &out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t v = 0; v < in.size(); ++v) {
        if (in[v] == 0 || adj[v].empty()) {
            out[v] += adj[v].empty() ? in[v] : 0.0;
            continue;
        }
        const double share = in[v] / static_cast<double>(adj[v].size());
        for (std::size_t u : adj[v]) {
            out[u] += share;
        }
    }
}

std::vector<std::vector<std::size_t>> adjacency(const Graph &g) {
    std::vector<std::vector<std::size_t>> adj(g.vertices());
    for (std::size_t v = 0; v < g.vertices(); ++v) {
        adj[v] = g.neighbors(v);
    }
    return adj;
}

}  // namespace

DistributionSeries classical_series(const Graph &g, int steps) {
    if (steps < 0) {
        throw std::invalid_argument("step count must be non-negative");
    }
    if (g.kind() == GraphKind::line && steps > g.size()) {
        throw std::invalid_argument("line graph built for fewer steps than requested");
    }
    const auto adj = adjacency(g);
    std::vector<double> p(g.vertices(), 0.0);
    std::vector<double> next(g.vertices(), 0.0);
    p[g.start_vertex()] = 1.0;
    DistributionSeries s;
    s.meta.graph = g.kind();
    s.meta.graph_size = g.size();
    s.meta.graph_seed = g.seed();
    s.meta.engine = "classical";
    s.steps.reserve(static_cast<std::size_t>(steps) + 1);
    s.steps.push_back(g.labelled(p));
    for (int t = 0; t < steps; ++t) {
        markov_step(adj, p, next);
        p.swap(next);
        s.steps.push_back(g.labelled(p));
    }
    return s;
}

MixingResult classical_mixing(int n, double epsilon, std::size_t horizon) {
    if (horizon == 0) {
        throw std::invalid_argument("horizon must be positive");
    }
    const DistributionSeries s = classical_series(build_cycle(n), static_cast<int>(horizon) - 1);
    return mixing_time(s, epsilon, horizon);
}

// First-passage probabilities: the target absorbs, per_step[t] is the mass arriving in step t.
HittingCurve classical_hitting(const Graph &g, int steps, std::size_t target) {
    if (target >= g.vertices()) {
        throw std::invalid_argument("hitting target out of range");
    }
    if (steps < 0) {
        throw std::invalid_argument("step count must be non-negative");
    }
    const auto adj = adjacency(g);
    std::vector<double> p(g.vertices(), 0.0);
    std::vector<double> next(g.vertices(), 0.0);
    p[g.start_vertex()] = 1.0;
    HittingCurve h;
    h.concurrent = true;
    h.per_step.push_back(0.0);
    h.cumulative.push_back(0.0);
    for (int t = 0; t < steps; ++t) {
        markov_step(adj, p, next);
        p.swap(next);
        const double q = p[target];
        p[target] = 0;
        h.per_step.push_back(q);
        h.cumulative.push_back(h.cumulative.back() + q);
    }
    return h;
}

}  // namespace qwalk
