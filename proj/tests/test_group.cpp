#include <doctest.h>

#include <map>
#include <random>

#include "helpers.hpp"
#include "symlift/canon.hpp"
#include "symlift/errors.hpp"
#include "symlift/exact.hpp"
#include "symlift/group.hpp"

using namespace symlift;

namespace {

Perm P(std::initializer_list<std::uint32_t> images) {
  return Perm(std::vector<std::uint32_t>(images));
}

// Symmetric group on n points from a transposition and an n-cycle.
std::vector<Perm> symmetric_gens(std::uint32_t n) {
  std::vector<std::uint32_t> t(n), c(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    t[i] = i;
    c[i] = (i + 1) % n;
  }
  std::swap(t[0], t[1]);
  return {Perm(t), Perm(c)};
}

BigInt factorial(unsigned n) {
  BigInt f = 1;
  for (unsigned i = 2; i <= n; ++i)
    f *= i;
  return f;
}

} // namespace

TEST_CASE("elementary permutation operations") {
  const auto swap01 = P({1, 0, 2});
  CHECK(compose(swap01, swap01).is_identity());
  const auto c = P({1, 2, 0, 3});
  const auto cyc = cycles(c);
  REQUIRE(cyc.size() == 1);
  CHECK(cyc[0] == std::vector<std::uint32_t>{0, 1, 2});
  CHECK(cycles(c, true).size() == 2);
  CHECK(inverse(P({1, 2, 0})) == P({2, 0, 1}));
  // apply the left factor first
  const auto a = P({1, 0, 2}), b = P({0, 2, 1});
  CHECK((a * b)[0] == b[a[0]]);
  CHECK((a * b)[0] == 2);
  CHECK_THROWS_AS(compose(P({0, 1}), P({0, 1, 2})), StructuralError);
  CHECK_THROWS(Perm(std::vector<std::uint32_t>{0, 0}));
}

TEST_CASE("point orbits") {
  const auto s3 = symmetric_gens(3);
  const std::vector<std::uint32_t> pts{0, 1, 2};
  CHECK(point_orbits(s3, pts).size() == 1);
  const std::vector<Perm> none;
  CHECK(point_orbits(none, pts).size() == 3);

  const auto m = gen_pigeonhole(3, 2);
  const ModelCanonizer c(m);
  const auto enc = c.canonize(Assignment(6));
  const std::vector<std::uint32_t> vars{0, 1, 2, 3, 4, 5};
  const auto orbits = point_orbits(enc.generators, vars);
  REQUIRE(orbits.size() == 1);
  CHECK(orbits[0].size() == 6);
}

TEST_CASE("schreier-sims orders") {
  CHECK(PermGroup::schreier_sims({P({1, 0, 2}), P({1, 2, 0})}).order() == 6);
  CHECK(PermGroup::schreier_sims({}).order() == 1);
  CHECK(PermGroup::schreier_sims({}, 5).order() == 1);
  for (std::uint32_t n = 2; n <= 12; ++n)
    CHECK(PermGroup::schreier_sims(symmetric_gens(n)).order() == factorial(n));
  // Alternating group from 3-cycles.
  CHECK(PermGroup::schreier_sims({P({1, 2, 0, 3, 4}), P({0, 2, 3, 1, 4}), P({0, 1, 3, 4, 2})})
            .order() == 60);

  const auto ph3 = LiftedModel(gen_pigeonhole(3, 2));
  CHECK(ph3.aut().order() == 12);
  const auto ph5 = LiftedModel(gen_pigeonhole(5, 2));
  CHECK(ph5.aut().order() == 240);
  const auto ph20 = LiftedModel(gen_pigeonhole(20, 2));
  CHECK(ph20.aut().order() == factorial(20) * 2);
  CHECK(log_bigint(ph20.aut().order()) == doctest::Approx(std::log(4865804016353280000.0)));
  CHECK(log_bigint(BigInt(1) << 3000) == doctest::Approx(3000 * std::log(2.0)));
}

TEST_CASE("order is the product of fundamental orbit sizes") {
  const auto g = PermGroup::schreier_sims(symmetric_gens(6));
  BigInt prod = 1;
  for (auto s : g.orbit_sizes())
    prod *= s;
  CHECK(prod == g.order());
  for (const auto &s : g.generators())
    CHECK(g.contains(s));
  for (const auto &s : g.strong_generators())
    CHECK(g.contains(s));
}

TEST_CASE("membership") {
  const auto a5 =
      PermGroup::schreier_sims({P({1, 2, 0, 3, 4}), P({0, 2, 3, 1, 4}), P({0, 1, 3, 4, 2})});
  CHECK(a5.contains(P({1, 2, 0, 3, 4})));
  CHECK_FALSE(a5.contains(P({1, 0, 2, 3, 4})));
  CHECK(a5.contains(P({0, 1, 2, 3, 4})));
  CHECK_FALSE(a5.contains(P({0, 1, 2})));
}

TEST_CASE("element enumeration") {
  const auto s3 = PermGroup::schreier_sims(symmetric_gens(3));
  const auto e = s3.elements(100);
  CHECK(e.size() == 6);
  CHECK(std::set<Perm>(e.begin(), e.end()).size() == 6);
  const auto t = PermGroup::schreier_sims({}, 4).elements(1);
  REQUIRE(t.size() == 1);
  CHECK(t[0].is_identity());
  const LiftedModel ph4(gen_pigeonhole(4, 2));
  const auto el = ph4.aut().elements(10000);
  CHECK(el.size() == 48);
  for (const auto &g : el)
    CHECK(ph4.aut().contains(g));
  CHECK_THROWS_AS(ph4.aut().elements(47), OrderExceedsCap);
}

TEST_CASE("enumeration agrees with generator closure on random subgroups") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng() % 4;
    std::vector<Perm> gens;
    for (std::size_t i = 0, k = 1 + rng() % 2; i < k; ++i)
      gens.push_back(Perm(testutil::random_permutation(rng, n)));
    std::set<Perm> closure{Perm(n)};
    std::vector<Perm> stack{Perm(n)};
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      for (const auto &g : gens) {
        auto y = x * g;
        if (closure.insert(y).second)
          stack.push_back(std::move(y));
      }
    }
    const auto grp = PermGroup::schreier_sims(gens, n);
    CHECK(grp.order() == closure.size());
    const auto el = grp.elements(1000);
    CHECK(std::set<Perm>(el.begin(), el.end()) == closure);
  }
}

TEST_CASE("orbit-stabilizer on benchmark models") {
  std::mt19937_64 rng(43);
  for (const auto &m : {gen_pigeonhole(3, 2), gen_pigeonhole(4, 2, 2.0, false),
                        gen_pairwise(6, {1, 0, 1}, {0, 1})}) {
    const LiftedModel lm(m);
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = testutil::random_assignment(rng, m.num_vars());
      const auto enc = lm.canonizer().canonize(x);
      const auto stab = PermGroup::schreier_sims(enc.generators, lm.aut().degree()).order();
      const auto orbit = testutil::closure_orbit(lm.generators(), x).size();
      CHECK(lm.aut().order() == stab * orbit);
      CHECK(lm.orbit_size(x) == orbit);
    }
  }
}

TEST_CASE("product replacement") {
  Rng rng(7);
  const auto s3 = symmetric_gens(3);
  const auto grp = PermGroup::schreier_sims(s3);
  ProductReplacement pr(s3, 3, rng);
  std::map<Perm, int> hist;
  for (int i = 0; i < 6000; ++i) {
    const auto g = pr.next(rng);
    CHECK(grp.contains(g));
    ++hist[g];
  }
  CHECK(hist.size() == 6);
  for (const auto &[g, c] : hist)
    CHECK(std::abs(c - 1000) <= 50);

  const std::vector<Perm> none;
  ProductReplacement trivial(none, 4, rng);
  for (int i = 0; i < 10; ++i)
    CHECK(trivial.next(rng).is_identity());

  const std::vector<Perm> one{P({1, 0, 2})};
  ProductReplacement two(one, 3, rng);
  std::set<Perm> seen;
  for (int i = 0; i < 100; ++i)
    seen.insert(two.next(rng));
  CHECK(seen.size() == 2);
}
