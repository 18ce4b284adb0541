#include "symlift/symgraph.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>
#include <tuple>

#include "symlift/errors.hpp"

namespace symlift {

ColoredGraph ColoredGraph::build(std::vector<std::uint32_t> colors,
                                 std::vector<VertexKind> kinds,
                                 const std::vector<Edge> &edges) {
  const auto n = static_cast<std::uint32_t>(colors.size());
  if (kinds.size() != n)
    throw StructuralError("graph needs one kind per vertex");

  std::vector<Edge> norm;
  norm.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n || v >= n)
      throw StructuralError("edge endpoint out of range");
    if (u == v)
      throw StructuralError("self-loops are not allowed");
    norm.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(norm.begin(), norm.end());
  norm.erase(std::unique(norm.begin(), norm.end()), norm.end());

  auto topo = std::make_shared<Topology>();
  topo->kinds = std::move(kinds);
  topo->num_edges = norm.size();
  topo->offsets.assign(n + 1, 0);
  for (auto [u, v] : norm) {
    ++topo->offsets[u + 1];
    ++topo->offsets[v + 1];
  }
  for (std::uint32_t i = 0; i < n; ++i)
    topo->offsets[i + 1] += topo->offsets[i];
  topo->adj.resize(topo->offsets[n]);
  std::vector<std::uint32_t> fill(topo->offsets.begin(), topo->offsets.end() - 1);
  for (auto [u, v] : norm) {
    topo->adj[fill[u]++] = v;
    topo->adj[fill[v]++] = u;
  }
  for (std::uint32_t i = 0; i < n; ++i)
    std::sort(topo->adj.begin() + topo->offsets[i],
              topo->adj.begin() + topo->offsets[i + 1]);

  topo->words = (n + 63) / 64;
  topo->rows.assign(static_cast<std::size_t>(n) * topo->words, 0);
  for (auto [u, v] : norm) {
    topo->rows[u * topo->words + (v >> 6)] |= std::uint64_t{1} << (v & 63);
    topo->rows[v * topo->words + (u >> 6)] |= std::uint64_t{1} << (u & 63);
  }

  ColoredGraph g;
  g.topo_ = std::move(topo);
  g.colors_ = std::move(colors);
  g.num_colors_ = g.colors_.empty()
                      ? 0
                      : *std::max_element(g.colors_.begin(), g.colors_.end()) + 1;
  return g;
}

ColoredGraph ColoredGraph::recolored(std::vector<std::uint32_t> colors) const {
  if (colors.size() != colors_.size())
    throw StructuralError("recoloring must keep the vertex count");
  ColoredGraph g;
  g.topo_ = topo_;
  g.colors_ = std::move(colors);
  g.num_colors_ = g.colors_.empty()
                      ? 0
                      : *std::max_element(g.colors_.begin(), g.colors_.end()) + 1;
  return g;
}

std::vector<ColoredGraph::Edge> ColoredGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::uint32_t u = 0; u < num_vertices(); ++u)
    for (auto v : neighbors(u))
      if (u < v)
        out.emplace_back(u, v);
  return out;
}

ColoredGraph ColoredGraph::relabeled(std::span<const std::uint32_t> perm) const {
  const auto n = num_vertices();
  if (perm.size() != n)
    throw StructuralError("relabeling must cover every vertex");
  std::vector<std::uint32_t> colors(n);
  std::vector<VertexKind> kinds(n);
  std::vector<std::uint8_t> hit(n, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (perm[v] >= n || hit[perm[v]])
      throw StructuralError("relabeling is not a permutation");
    hit[perm[v]] = 1;
    colors[perm[v]] = colors_[v];
    kinds[perm[v]] = kind(v);
  }
  std::vector<Edge> e;
  e.reserve(num_edges());
  for (auto [u, v] : edges())
    e.emplace_back(perm[u], perm[v]);
  return build(std::move(colors), std::move(kinds), e);
}

bool operator==(const ColoredGraph &a, const ColoredGraph &b) {
  if (a.colors_ != b.colors_)
    return false;
  if (a.topo_ == b.topo_)
    return true;
  if (!a.topo_ || !b.topo_)
    return false;
  return a.topo_->kinds == b.topo_->kinds && a.topo_->adj == b.topo_->adj &&
         a.topo_->offsets == b.topo_->offsets;
}

namespace {

// Color identity key. Doubles are compared through their bit patterns.
using ClauseKey = std::tuple<bool, std::uint64_t, std::size_t, std::size_t>;
using FactorKey = std::pair<std::size_t, std::vector<std::uint64_t>>;

} // namespace

InducedGraph induce(const Model &m) {
  const auto num_vars = static_cast<std::uint32_t>(m.num_vars());
  const auto num_clauses = static_cast<std::uint32_t>(m.clauses().size());
  const auto num_factors = static_cast<std::uint32_t>(m.factors().size());

  std::uint32_t next_color = 1;
  std::map<ClauseKey, std::uint32_t> clause_colors;
  std::map<FactorKey, std::uint32_t> factor_colors;
  std::uint32_t pos_port_color = 0, neg_port_color = 0;

  std::vector<std::uint32_t> colors(num_vars, 0);
  std::vector<VertexKind> kinds(num_vars, VertexKind::Variable);
  std::vector<ColoredGraph::Edge> edges;
  InducedGraph out;
  out.map.num_vars = num_vars;

  // Ports are appended after all factor vertices; remember them for later.
  struct PendingPort {
    std::uint32_t factor_vertex;
    VarId var;
    bool positive;
  };
  std::vector<PendingPort> ports;

  for (std::uint32_t c = 0; c < num_clauses; ++c) {
    const auto &clause = m.clauses()[c];
    std::size_t positives = 0;
    for (const auto &lit : clause.literals)
      positives += lit.positive ? 1 : 0;
    const std::size_t negatives = clause.literals.size() - positives;
    ClauseKey key{clause.weight.is_hard(),
                  clause.weight.is_hard()
                      ? 0
                      : std::bit_cast<std::uint64_t>(clause.weight.value()),
                  positives, negatives};
    auto [it, inserted] = clause_colors.try_emplace(key, next_color);
    if (inserted)
      ++next_color;

    const auto fv = static_cast<std::uint32_t>(colors.size());
    colors.push_back(it->second);
    kinds.push_back(VertexKind::Factor);
    out.map.clause_vertex.push_back(fv);

    const bool mixed = positives != 0 && negatives != 0;
    for (const auto &lit : clause.literals) {
      if (mixed)
        ports.push_back({fv, lit.var, lit.positive});
      else
        edges.emplace_back(fv, lit.var);
    }
  }

  for (std::uint32_t f = 0; f < num_factors; ++f) {
    const auto &factor = m.factors()[f];
    FactorKey key{factor.scope.size(), {}};
    for (double t : factor.count_table)
      key.second.push_back(std::bit_cast<std::uint64_t>(t));
    auto [it, inserted] = factor_colors.try_emplace(std::move(key), next_color);
    if (inserted)
      ++next_color;

    const auto fv = static_cast<std::uint32_t>(colors.size());
    colors.push_back(it->second);
    kinds.push_back(VertexKind::Factor);
    out.map.factor_vertex.push_back(fv);
    for (VarId v : factor.scope)
      edges.emplace_back(fv, v);
  }

  if (!ports.empty()) {
    bool any_pos = false, any_neg = false;
    for (const auto &p : ports) {
      any_pos |= p.positive;
      any_neg |= !p.positive;
    }
    if (any_pos)
      pos_port_color = next_color++;
    if (any_neg)
      neg_port_color = next_color++;
    for (const auto &p : ports) {
      const auto pv = static_cast<std::uint32_t>(colors.size());
      colors.push_back(p.positive ? pos_port_color : neg_port_color);
      kinds.push_back(VertexKind::Port);
      edges.emplace_back(p.factor_vertex, pv);
      edges.emplace_back(pv, p.var);
    }
  }

  out.graph = ColoredGraph::build(std::move(colors), std::move(kinds), edges);
  return out;
}

ColoredGraph encode_assignment(const Model &m, const ColoredGraph &g,
                               const Assignment &x) {
  if (x.size() != m.num_vars())
    throw StructuralError("assignment length does not match the model");
  if (g.num_vertices() < m.num_vars())
    throw StructuralError("graph does not belong to the model");
  const std::uint32_t true_color = g.num_colors();
  std::vector<std::uint32_t> colors = g.colors();
  for (std::uint32_t v = 0; v < m.num_vars(); ++v) {
    if (g.kind(v) != VertexKind::Variable || colors[v] != 0)
      throw StructuralError("graph does not belong to the model");
    if (x[v])
      colors[v] = true_color;
  }
  return g.recolored(std::move(colors));
}

std::string to_dot(const ColoredGraph &g) {
  static constexpr const char *kPalette[] = {
      "white",     "gray70",     "firebrick1", "gray20",   "steelblue1",
      "gold",      "palegreen3", "orchid",     "tan1",     "cyan3",
      "lightpink", "khaki",      "slateblue1", "seagreen", "sienna"};
  constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

  std::ostringstream os;
  os << "graph G {\n  node [style=filled];\n";
  for (std::uint32_t v = 0; v < g.num_vertices(); ++v) {
    const char *shape = g.kind(v) == VertexKind::Variable ? "circle"
                        : g.kind(v) == VertexKind::Factor ? "box"
                                                          : "diamond";
    os << "  v" << v << " [shape=" << shape << ", fillcolor=\""
       << kPalette[g.color(v) % kPaletteSize] << "\", label=\"" << v << ":c"
       << g.color(v) << "\"];\n";
  }
  for (auto [u, v] : g.edges())
    os << "  v" << u << " -- v" << v << ";\n";
  os << "}\n";
  return os.str();
}

} // namespace symlift
