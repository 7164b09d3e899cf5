#include "qwalk/graphs.h"

#include <algorithm>
#include <array>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace qwalk {

std::string_view graph_kind_name(GraphKind kind) {
    switch (kind) {
        case GraphKind::line:
            return "line";
        case GraphKind::cycle:
            return "cycle";
        case GraphKind::hypercube:
            return "hypercube";
        case GraphKind::glued_trees:
            return "glued_trees";
    }
    return "?";
}

GraphKind parse_graph_kind(std::string_view name) {
    for (auto k : {GraphKind::line, GraphKind::cycle, GraphKind::hypercube, GraphKind::glued_trees}) {
        if (graph_kind_name(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown graph kind '" + std::string(name) + "'");
}

BasisLabel Graph::move(BasisLabel from) const {
    return basis_label(shift_[flat_index(from, space_.vertices)], space_.vertices);
}

std::int64_t Graph::label(std::size_t vertex) const {
    return static_cast<std::int64_t>(vertex) + label_offset_;
}

Distribution Graph::labelled(std::vector<double> probs) const {
    if (probs.size() != space_.vertices) {
        throw StructuralError("distribution length does not match vertex count");
    }
    Distribution d;
    d.probs = std::move(probs);
    d.kind = label_kind();
    d.labels.resize(space_.vertices);
    for (std::size_t v = 0; v < space_.vertices; ++v) {
        d.labels[v] = label(v);
    }
    return d;
}

std::vector<std::size_t> Graph::neighbors(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < space_.coins; ++c) {
        const std::size_t i = flat_index({c, v}, space_.vertices);
        if (self_loop_[i]) {
            continue;
        }
        const std::size_t w = basis_label(shift_[i], space_.vertices).vertex;
        if (std::find(out.begin(), out.end(), w) == out.end()) {
            out.push_back(w);
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edges() const {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t v = 0; v < space_.vertices; ++v) {
        for (std::size_t w : neighbors(v)) {
            seen.insert({std::min(v, w), std::max(v, w)});
        }
    }
    return {seen.begin(), seen.end()};
}

Graph build_line(int steps) {
    if (steps < 1) {
        throw std::invalid_argument("line walk needs at least one step");
    }
    Graph g = build_cycle(2 * steps + 1);
    g.kind_ = GraphKind::line;
    g.size_ = steps;
    g.start_ = static_cast<std::size_t>(steps);
    g.label_offset_ = -steps;
    return g;
}

Graph build_cycle(int n) {
    if (n < 3) {
        throw std::invalid_argument("cycle needs N >= 3, got " + std::to_string(n));
    }
    Graph g;
    g.kind_ = GraphKind::cycle;
    g.size_ = n;
    const auto v = static_cast<std::size_t>(n);
    g.space_ = {2, v};
    g.shift_.resize(2 * v);
    g.self_loop_.assign(2 * v, false);
    for (std::size_t x = 0; x < v; ++x) {
        g.shift_[flat_index({0, x}, v)] = flat_index({0, (x + 1) % v}, v);
        g.shift_[flat_index({1, x}, v)] = flat_index({1, (x + v - 1) % v}, v);
    }
    g.start_ = 0;
    return g;
}

Graph build_hypercube(int n) {
    if (n < 1 || n > 12) {
        throw std::invalid_argument("hypercube dimension must be in [1, 12], got " + std::to_string(n));
    }
    Graph g;
    g.kind_ = GraphKind::hypercube;
    g.size_ = n;
    const std::size_t v = std::size_t{1} << n;
    const auto c = static_cast<std::size_t>(n);
    g.space_ = {c, v};
    g.shift_.resize(c * v);
    g.self_loop_.assign(c * v, false);
    for (std::size_t d = 0; d < c; ++d) {
        for (std::size_t x = 0; x < v; ++x) {
            g.shift_[flat_index({d, x}, v)] = flat_index({d, x ^ (std::size_t{1} << d)}, v);
        }
    }
    g.start_ = 0;
    g.target_ = v - 1;
    return g;
}

Graph build_glued_trees(int depth, std::uint64_t seed) {
    if (depth < 1 || depth > 16) {
        throw std::invalid_argument("glued trees depth must be in [1, 16], got " + std::to_string(depth));
    }
    const std::size_t tree = (std::size_t{1} << (depth + 1)) - 1;
    const std::size_t v = 2 * tree;
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    // Port 0 is the parent (self-loop at a root), ports 1 and 2 are children
    // for internal vertices and gluing edges for leaves.
    std::vector<std::array<std::size_t, 3>> adj(v, {kNone, kNone, kNone});
    for (std::size_t offset : {std::size_t{0}, tree}) {
        for (std::size_t h = 0; h < tree; ++h) {
            const std::size_t u = offset + h;
            adj[u][0] = h == 0 ? u : offset + (h - 1) / 2;
            if (2 * h + 1 < tree) {
                adj[u][1] = offset + 2 * h + 1;
                adj[u][2] = offset + 2 * h + 2;
            }
        }
    }

    const std::size_t first_leaf = (std::size_t{1} << depth) - 1;
    std::vector<std::size_t> left, right;
    for (std::size_t h = first_leaf; h < tree; ++h) {
        left.push_back(h);
        right.push_back(tree + h);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(left.begin(), left.end(), rng);
    std::shuffle(right.begin(), right.end(), rng);
    // Alternating cycle left[0] - right[0] - left[1] - right[1] - ... - left[0].
    const std::size_t k = left.size();
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t l = left[i];
        const std::size_t r = right[i];
        const std::size_t l_next = left[(i + 1) % k];
        adj[l][1] = r;
        adj[r][2] = l;
        adj[r][1] = l_next;
        adj[l_next][2] = r;
    }

    Graph g;
    g.kind_ = GraphKind::glued_trees;
    g.size_ = depth;
    g.space_ = {3, v};
    g.shift_.resize(3 * v);
    g.self_loop_.assign(3 * v, false);
    for (std::size_t u = 0; u < v; ++u) {
        for (std::size_t port = 0; port < 3; ++port) {
            const std::size_t w = adj[u][port];
            const std::size_t from = flat_index({port, u}, v);
            if (w == u) {
                g.shift_[from] = from;
                g.self_loop_[from] = true;
                continue;
            }
            std::size_t back = kNone;
            for (std::size_t q = 0; q < 3; ++q) {
                if (adj[w][q] == u) {
                    back = q;
                }
            }
            if (back == kNone) {
                throw std::logic_error("glued trees adjacency is not symmetric");
            }
            g.shift_[from] = flat_index({back, w}, v);
        }
    }
    g.start_ = 0;
    g.target_ = tree;
    g.seed_ = seed;
    return g;
}

int glued_trees_column(const Graph &g, std::size_t vertex) {
    if (g.kind() != GraphKind::glued_trees) {
        throw std::invalid_argument("column is only defined for glued trees");
    }
    const std::size_t tree = g.vertices() / 2;
    const bool right = vertex >= tree;
    const std::size_t h = right ? vertex - tree : vertex;
    int level = 0;
    for (std::size_t x = h + 1; x > 1; x >>= 1) {
        ++level;
    }
    return right ? 2 * g.size() + 1 - level : level;
}

void apply_shift(PureState &psi, const Graph &g) {
    if (psi.space() != g.space()) {
        throw StructuralError("state dimension does not match graph");
    }
    const auto perm = g.permutation();
    std::vector<cplx> out(psi.dim());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        out[perm[i]] = psi[i];
    }
    std::copy(out.begin(), out.end(), psi.amplitudes().begin());
}

void apply_inverse_shift(PureState &psi, const Graph &g) {
    if (psi.space() != g.space()) {
        throw StructuralError("state dimension does not match graph");
    }
    const auto perm = g.permutation();
    std::vector<cplx> out(psi.dim());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        out[i] = psi[perm[i]];
    }
    std::copy(out.begin(), out.end(), psi.amplitudes().begin());
}

void apply_shift(DensityState &rho, const Graph &g, std::vector<cplx> &scratch) {
    if (rho.space() != g.space()) {
        throw StructuralError("density matrix dimension does not match graph");
    }
    const auto perm = g.permutation();
    const std::size_t d = rho.dim();
    scratch.resize(d * d);
    const auto src = rho.data();
    for (std::size_t r = 0; r < d; ++r) {
        cplx *dst_row = scratch.data() + perm[r] * d;
        const cplx *src_row = src.data() + r * d;
        for (std::size_t c = 0; c < d; ++c) {
            dst_row[perm[c]] = src_row[c];
        }
    }
    rho.swap_storage(scratch);
}

void apply_shift(DensityState &rho, const Graph &g) {
    std::vector<cplx> scratch;
    apply_shift(rho, g, scratch);
}

void write_edge_list(std::ostream &out, const Graph &g) {
    for (const auto &[u, w] : g.edges()) {
        out << u << ' ' << w << '\n';
    }
}

}  // namespace qwalk
