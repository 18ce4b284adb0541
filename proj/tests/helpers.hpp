#pragma once

// Independent brute-force references shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "symlift/group.hpp"
#include "symlift/model.hpp"
#include "symlift/symgraph.hpp"

namespace testutil {

using symlift::Assignment;
using symlift::ColoredGraph;
using symlift::Model;
using symlift::Perm;

inline std::vector<std::vector<std::uint8_t>> adjacency(const ColoredGraph &g) {
  const auto n = g.num_vertices();
  std::vector<std::vector<std::uint8_t>> a(n, std::vector<std::uint8_t>(n, 0));
  for (auto [u, v] : g.edges())
    a[u][v] = a[v][u] = 1;
  return a;
}

/// Every color- and edge-preserving vertex bijection. Only for tiny graphs.
inline std::vector<std::vector<std::uint32_t>> brute_automorphisms(const ColoredGraph &g) {
  const auto n = g.num_vertices();
  const auto a = adjacency(g);
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  std::vector<std::vector<std::uint32_t>> out;
  do {
    bool ok = true;
    for (std::uint32_t v = 0; v < n && ok; ++v)
      ok = g.color(v) == g.color(p[v]);
    for (std::uint32_t u = 0; u < n && ok; ++u)
      for (std::uint32_t v = u + 1; v < n && ok; ++v)
        ok = a[u][v] == a[p[u]][p[v]];
    if (ok)
      out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Backtracking search for a color isomorphism g -> h.
inline bool brute_isomorphic(const ColoredGraph &g, const ColoredGraph &h) {
  const auto n = g.num_vertices();
  if (n != h.num_vertices() || g.num_edges() != h.num_edges())
    return false;
  const auto a = adjacency(g), b = adjacency(h);
  std::vector<std::uint32_t> map(n);
  std::vector<std::uint8_t> used(n, 0);
  auto rec = [&](auto &&self, std::uint32_t v) -> bool {
    if (v == n)
      return true;
    for (std::uint32_t w = 0; w < n; ++w) {
      if (used[w] || g.color(v) != h.color(w))
        continue;
      bool ok = true;
      for (std::uint32_t u = 0; u < v && ok; ++u)
        ok = a[u][v] == b[map[u]][w];
      if (!ok)
        continue;
      used[w] = 1;
      map[v] = w;
      if (self(self, v + 1))
        return true;
      used[w] = 0;
    }
    return false;
  };
  return rec(rec, 0);
}

inline bool is_automorphism(const ColoredGraph &g, const Perm &p) {
  if (p.degree() != g.num_vertices())
    return false;
  for (std::uint32_t v = 0; v < g.num_vertices(); ++v)
    if (g.color(v) != g.color(p[v]))
      return false;
  for (auto [u, v] : g.edges())
    if (!g.adjacent(p[u], p[v]))
      return false;
  return true;
}

inline ColoredGraph random_graph(std::mt19937_64 &rng, std::uint32_t n, std::uint32_t colors,
                                 double density) {
  std::uniform_int_distribution<std::uint32_t> col(0, colors - 1);
  std::bernoulli_distribution edge(density);
  std::vector<std::uint32_t> c(n);
  for (auto &x : c)
    x = col(rng);
  std::vector<ColoredGraph::Edge> e;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (edge(rng))
        e.emplace_back(u, v);
  return ColoredGraph::build(c, std::vector<symlift::VertexKind>(n, symlift::VertexKind::Variable),
                             e);
}

inline std::vector<std::uint32_t> random_permutation(std::mt19937_64 &rng, std::size_t n) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

inline Assignment random_assignment(std::mt19937_64 &rng, std::size_t n) {
  Assignment x(n);
  for (std::size_t i = 0; i < n; ++i)
    x.set(i, (rng() & 1u) != 0);
  return x;
}

/// Variable action of a vertex permutation: result[g(v)] = x[v].
inline Assignment act(const Perm &g, const Assignment &x) {
  Assignment y(x.size());
  for (std::uint32_t v = 0; v < x.size(); ++v)
    y.set(g[v], x[v]);
  return y;
}

/// Orbit of x under the group generated by `gens` (variable action).
inline std::set<Assignment> closure_orbit(const std::vector<Perm> &gens, const Assignment &x) {
  std::set<Assignment> seen{x};
  std::vector<Assignment> stack{x};
  while (!stack.empty()) {
    const auto y = stack.back();
    stack.pop_back();
    for (const auto &g : gens) {
      auto z = act(g, y);
      if (seen.insert(z).second)
        stack.push_back(std::move(z));
    }
  }
  return seen;
}

inline double brute_log_z(const Model &m) {
  std::vector<double> s;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << m.num_vars()); ++i)
    s.push_back(symlift::log_score(m, Assignment::from_index(i, m.num_vars())));
  const double hi = *std::max_element(s.begin(), s.end());
  double acc = 0;
  for (double v : s)
    if (!std::isinf(v))
      acc += std::exp(v - hi);
  return hi + std::log(acc);
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace testutil
