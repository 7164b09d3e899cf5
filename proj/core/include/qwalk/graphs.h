#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qwalk/hilbert.h"

namespace qwalk {

enum class GraphKind { line, cycle, hypercube, glued_trees };

std::string_view graph_kind_name(GraphKind kind);
/// Throws std::invalid_argument for unknown names.
GraphKind parse_graph_kind(std::string_view name);

/// Walk substrate: a vertex set plus the conditional shift, stored as a
/// permutation of flat coin-major basis indices.
///
/// Line, cycle and hypercube keep the coin label through a move. Glued trees
/// use the flip-flop convention: arriving along an edge sets the coin to the
/// port that points back along that edge, so the shift is an involution.
class Graph {
   public:
    GraphKind kind() const { return kind_; }
    /// Size parameter: T for the line, N for cycle / hypercube, depth for glued trees.
    int size() const { return size_; }
    std::size_t coins() const { return space_.coins; }
    std::size_t vertices() const { return space_.vertices; }
    Space space() const { return space_; }
    std::size_t start_vertex() const { return start_; }
    std::optional<std::size_t> target_vertex() const { return target_; }
    std::optional<std::uint64_t> seed() const { return seed_; }

    BasisLabel move(BasisLabel from) const;
    /// shift[i] is the flat index basis state i is sent to.
    std::span<const std::size_t> permutation() const { return shift_; }

    /// Signed position for line graphs, vertex id otherwise.
    std::int64_t label(std::size_t vertex) const;
    LabelKind label_kind() const { return kind_ == GraphKind::line ? LabelKind::position : LabelKind::vertex; }
    /// Attaches this graph's labels to per-vertex probabilities.
    Distribution labelled(std::vector<double> probs) const;

    /// Distinct neighbours of v along real edges (self-loop padding excluded).
    std::vector<std::size_t> neighbors(std::size_t v) const;
    /// Undirected edges u < v, each once. Self-loop padding is not an edge.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

   private:
    friend Graph build_line(int steps);
    friend Graph build_cycle(int n);
    friend Graph build_hypercube(int n);
    friend Graph build_glued_trees(int depth, std::uint64_t seed);

    GraphKind kind_ = GraphKind::line;
    int size_ = 0;
    Space space_{};
    std::vector<std::size_t> shift_;
    std::size_t start_ = 0;
    std::optional<std::size_t> target_;
    std::optional<std::uint64_t> seed_;
    std::int64_t label_offset_ = 0;
    // Flat indices whose port is self-loop padding.
    std::vector<bool> self_loop_;
};

/// Line positions -steps..steps, coin 0 = move right (+1), coin 1 = move left (-1).
/// The truncation is exact for walks of at most `steps` steps from the origin.
Graph build_line(int steps);
Graph build_cycle(int n);
/// Boolean n-cube, coin d flips bit d. Start 0, target 2^n - 1.
Graph build_hypercube(int n);
/// Two depth-`depth` binary trees whose leaves are joined by a uniformly random
/// cycle alternating between left and right leaves. Vertices 0..2^(depth+1)-2
/// are the left tree in heap order, the right tree follows. The two roots are
/// padded to degree 3 with a self-loop on port 0. Start is the left root,
/// target the right root.
Graph build_glued_trees(int depth, std::uint64_t seed);

/// Tree level of a glued-trees vertex measured from the entrance root
/// (0 .. 2*depth+1).
int glued_trees_column(const Graph &g, std::size_t vertex);

void apply_shift(PureState &psi, const Graph &g);
void apply_inverse_shift(PureState &psi, const Graph &g);
/// rho -> S rho S^dagger. `scratch` is resized as needed and reused.
void apply_shift(DensityState &rho, const Graph &g, std::vector<cplx> &scratch);
void apply_shift(DensityState &rho, const Graph &g);

/// One "u v" pair per line.
void write_edge_list(std::ostream &out, const Graph &g);

}  // namespace qwalk
