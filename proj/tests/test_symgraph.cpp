#include <doctest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "symlift/canon.hpp"
#include "symlift/errors.hpp"
#include "symlift/symgraph.hpp"

using namespace symlift;

namespace {

std::set<std::uint32_t> color_set(const ColoredGraph &g) {
  return {g.colors().begin(), g.colors().end()};
}

} // namespace

TEST_CASE("induced graph of pigeonhole(3,2)") {
  const auto ind = induce(gen_pigeonhole(3, 2));
  const auto &g = ind.graph;
  CHECK(g.num_vertices() == 15);
  CHECK(g.num_edges() == 18);
  CHECK(color_set(g).size() == 3);
  CHECK(g.num_colors() == 3);
  for (std::uint32_t v = 0; v < 6; ++v) {
    CHECK(g.kind(v) == VertexKind::Variable);
    CHECK(g.color(v) == 0);
    CHECK(g.neighbors(v).size() == 3);
  }
  for (std::uint32_t v = 6; v < 15; ++v)
    CHECK(g.kind(v) == VertexKind::Factor);
  CHECK(ind.map.clause_vertex.size() == 9);
  // Hard and soft clauses differ in color.
  CHECK(g.color(ind.map.clause_vertex[0]) != g.color(ind.map.clause_vertex[8]));
}

TEST_CASE("unit clause and mixed-sign clause encodings") {
  const Model unit(1, {WeightedClause{Weight::finite(0.5), {{0, true}}}}, {});
  const auto gu = induce(unit).graph;
  CHECK(gu.num_vertices() == 2);
  CHECK(gu.num_edges() == 1);
  CHECK(color_set(gu).size() == 2);

  const Model mixed(2, {WeightedClause{Weight::finite(0.5), {{0, true}, {1, false}}}}, {});
  const auto ind = induce(mixed);
  const auto &g = ind.graph;
  CHECK(g.num_vertices() == 5);
  CHECK(g.num_edges() == 4);
  CHECK(g.kind(3) == VertexKind::Port);
  CHECK(g.kind(4) == VertexKind::Port);
  CHECK(g.color(3) != g.color(4));
  CHECK_FALSE(g.adjacent(0, 2));
  CHECK(g.adjacent(0, 3));
  CHECK(g.adjacent(3, 2));
}

TEST_CASE("factor colors follow weight, signs, arity and tables") {
  const Model m(4,
                {WeightedClause{Weight::finite(1.0), {{0, false}, {1, false}}},
                 WeightedClause{Weight::finite(1.0), {{2, false}, {3, false}}},
                 WeightedClause{Weight::finite(1.0), {{0, true}, {1, true}}},
                 WeightedClause{Weight::finite(1.0000000000000002), {{2, false}, {3, false}}}},
                {SymFactor{{0, 1}, {0.0, 1.0, 0.0}}, SymFactor{{2, 3}, {0.0, 1.0, 0.0}},
                 SymFactor{{1, 2}, {0.0, 2.0, 0.0}}});
  const auto ind = induce(m);
  const auto &g = ind.graph;
  const auto &cv = ind.map.clause_vertex;
  const auto &fv = ind.map.factor_vertex;
  CHECK(g.color(cv[0]) == g.color(cv[1]));
  CHECK(g.color(cv[0]) != g.color(cv[2]));
  CHECK(g.color(cv[0]) != g.color(cv[3]));
  CHECK(g.color(fv[0]) == g.color(fv[1]));
  CHECK(g.color(fv[0]) != g.color(fv[2]));
  // no edge joins two variables
  for (auto [u, v] : g.edges())
    CHECK_FALSE((g.kind(u) == VertexKind::Variable && g.kind(v) == VertexKind::Variable));
}

TEST_CASE("induce is deterministic") {
  const auto m = gen_pigeonhole(4, 3);
  CHECK(induce(m).graph == induce(gen_pigeonhole(4, 3)).graph);
}

TEST_CASE("encode_assignment recolors only variables") {
  const auto m = gen_pigeonhole(3, 2);
  const auto g = induce(m).graph;
  const auto x = Assignment::from_string("000111");
  const auto e = encode_assignment(m, g, x);
  CHECK(e.num_vertices() == g.num_vertices());
  CHECK(e.edges() == g.edges());
  std::set<std::uint32_t> true_colors, false_colors;
  for (std::uint32_t v = 0; v < 6; ++v)
    (x[v] ? true_colors : false_colors).insert(e.color(v));
  CHECK(true_colors.size() == 1);
  CHECK(false_colors.size() == 1);
  CHECK(*true_colors.begin() != *false_colors.begin());
  for (std::uint32_t v = 6; v < g.num_vertices(); ++v) {
    CHECK(e.color(v) == g.color(v));
    CHECK(e.color(v) != *true_colors.begin());
  }

  const auto all_false = encode_assignment(m, g, Assignment(6));
  CHECK(all_false == g);

  const Model one(1, {}, {SymFactor{{0}, {0.0, 1.0}}});
  const auto g1 = induce(one).graph;
  const auto e1 = encode_assignment(one, g1, Assignment::from_string("1"));
  CHECK(e1.color(0) != g1.color(0));
  CHECK(e1.color(0) != e1.color(1));

  CHECK_THROWS_AS(encode_assignment(m, g, Assignment(5)), StructuralError);
}

TEST_CASE("graph construction rejects malformed input") {
  const std::vector<VertexKind> k2(2, VertexKind::Variable);
  CHECK_THROWS_AS(ColoredGraph::build({0, 0}, k2, {{0, 0}}), StructuralError);
  CHECK_THROWS_AS(ColoredGraph::build({0, 0}, k2, {{0, 2}}), StructuralError);
  const auto g = ColoredGraph::build({0, 1}, k2, {{0, 1}, {1, 0}});
  CHECK(g.num_edges() == 1);
  const auto r = g.relabeled(std::vector<std::uint32_t>{1, 0});
  CHECK(r.color(0) == 1);
  CHECK(r.adjacent(0, 1));
  CHECK(to_dot(g).find("v0 -- v1") != std::string::npos);
}

TEST_CASE("encodings of orbit-equivalent assignments share certificates") {
  std::mt19937_64 rng(3);
  for (const auto &m : {gen_pigeonhole(3, 2), gen_pigeonhole(3, 3, 2.0, false),
                        gen_pairwise(5, {1, 0, 1}, {0, 1})}) {
    const auto g = induce(m).graph;
    const auto aut = canonical_form(g);
    for (int trial = 0; trial < 60; ++trial) {
      const auto x = testutil::random_assignment(rng, m.num_vars());
      auto y = x;
      const auto steps = 1 + rng() % 5;
      for (std::size_t s = 0; s < steps; ++s)
        y = testutil::act(aut.generators[rng() % aut.generators.size()], y);
      const auto cx = canonical_form(encode_assignment(m, g, x)).certificate;
      const auto cy = canonical_form(encode_assignment(m, g, y)).certificate;
      CHECK(cx == cy);

      const auto z = testutil::random_assignment(rng, m.num_vars());
      const bool same_orbit = testutil::closure_orbit(aut.generators, x).count(z) > 0;
      const auto cz = canonical_form(encode_assignment(m, g, z)).certificate;
      CHECK((cx == cz) == same_orbit);
    }
  }
}
