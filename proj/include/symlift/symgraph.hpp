#pragma once

// Colored graphs induced by models, and their assignment encodings.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symlift/model.hpp"

namespace symlift {

enum class VertexKind : std::uint8_t { Variable, Factor, Port };

/// Undirected, loop-free graph with one color per vertex. Adjacency is held
/// both as sorted neighbor lists and as bitset rows. The topology is shared
/// between recolorings of the same graph.
class ColoredGraph {
public:
  using Edge = std::pair<std::uint32_t, std::uint32_t>;

  ColoredGraph() = default;

  /// Throws StructuralError on self-loops, out-of-range endpoints or size
  /// mismatches. Duplicate edges are merged.
  static ColoredGraph build(std::vector<std::uint32_t> colors,
                            std::vector<VertexKind> kinds,
                            const std::vector<Edge> &edges);

  /// Same vertices and edges, new colors.
  ColoredGraph recolored(std::vector<std::uint32_t> colors) const;

  std::uint32_t num_vertices() const {
    return static_cast<std::uint32_t>(colors_.size());
  }
  std::size_t num_edges() const { return topo_ ? topo_->num_edges : 0; }
  std::uint32_t num_colors() const { return num_colors_; }

  std::uint32_t color(std::uint32_t v) const { return colors_[v]; }
  const std::vector<std::uint32_t> &colors() const { return colors_; }
  VertexKind kind(std::uint32_t v) const { return topo_->kinds[v]; }

  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    const auto &t = *topo_;
    return {t.adj.data() + t.offsets[v], t.adj.data() + t.offsets[v + 1]};
  }
  bool adjacent(std::uint32_t u, std::uint32_t v) const {
    const auto &t = *topo_;
    return (t.rows[u * t.words + (v >> 6)] >> (v & 63)) & 1u;
  }

  /// Edges (u < v) in increasing order.
  std::vector<Edge> edges() const;

  /// Graph with vertex v renamed perm[v].
  ColoredGraph relabeled(std::span<const std::uint32_t> perm) const;

  friend bool operator==(const ColoredGraph &a, const ColoredGraph &b);

private:
  struct Topology {
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> adj;
    std::vector<std::uint64_t> rows;
    std::size_t words = 0;
    std::size_t num_edges = 0;
    std::vector<VertexKind> kinds;
  };

  std::shared_ptr<const Topology> topo_;
  std::vector<std::uint32_t> colors_;
  std::uint32_t num_colors_ = 0;
};

/// Where model entities live in the induced graph. Variables occupy vertices
/// [0, num_vars) in VarId order, then one vertex per clause, then one per
/// symmetric factor, then ports.
struct VertexMap {
  std::uint32_t num_vars = 0;
  std::vector<std::uint32_t> clause_vertex;
  std::vector<std::uint32_t> factor_vertex;

  std::uint32_t variable_vertex(VarId v) const { return v; }
};

struct InducedGraph {
  ColoredGraph graph;
  VertexMap map;
};

/// Color 0 is shared by all variables. Clauses share a color iff weight
/// (bit-equal), arity and sign multiset match; factors iff arity and table
/// match. Mixed-sign clauses route each literal through a port vertex colored
/// by sign.
InducedGraph induce(const Model &m);

/// Splits the variable color: false variables keep color 0, true variables
/// get the fresh color g.num_colors(). Other colors are unchanged.
ColoredGraph encode_assignment(const Model &m, const ColoredGraph &g,
                               const Assignment &x);

/// Graphviz dump, color ids rendered as fill colors.
std::string to_dot(const ColoredGraph &g);

} // namespace symlift
