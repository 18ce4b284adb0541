#include "symlift/group.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "symlift/errors.hpp"

namespace symlift {

double log_bigint(const BigInt &value) {
  if (value <= 0)
    throw InvariantError("log of a non-positive integer");
  const std::size_t bits = boost::multiprecision::msb(value) + 1;
  if (bits <= 1000)
    return std::log(value.convert_to<double>());
  const boost::multiprecision::cpp_bin_float_50 f(value);
  return boost::multiprecision::log(f).convert_to<double>();
}

Perm::Perm(std::size_t degree) : images_(degree) {
  std::iota(images_.begin(), images_.end(), 0u);
}

Perm::Perm(std::vector<std::uint32_t> images) : images_(std::move(images)) {
  std::vector<std::uint8_t> hit(images_.size(), 0);
  for (auto v : images_) {
    if (v >= images_.size() || hit[v])
      throw StructuralError("permutation images must form a bijection");
    hit[v] = 1;
  }
}

Perm Perm::from_cycles(
    std::size_t degree,
    std::initializer_list<std::initializer_list<std::uint32_t>> cycle_list) {
  std::vector<std::uint32_t> images(degree);
  std::iota(images.begin(), images.end(), 0u);
  for (const auto &c : cycle_list) {
    std::vector<std::uint32_t> pts(c);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i] >= degree)
        throw StructuralError("cycle point out of range");
      images[pts[i]] = pts[(i + 1) % pts.size()];
    }
  }
  return Perm(std::move(images));
}

bool Perm::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != i)
      return false;
  return true;
}

Perm Perm::inverse() const {
  Perm r;
  r.images_.resize(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i)
    r.images_[images_[i]] = static_cast<std::uint32_t>(i);
  return r;
}

Perm operator*(const Perm &a, const Perm &b) {
  if (a.degree() != b.degree())
    throw StructuralError("composing permutations of different degree");
  Perm r;
  r.images_.resize(a.images_.size());
  for (std::size_t i = 0; i < a.images_.size(); ++i)
    r.images_[i] = b.images_[a.images_[i]];
  return r;
}

Perm compose(const Perm &a, const Perm &b) { return a * b; }
Perm inverse(const Perm &a) { return a.inverse(); }

std::vector<Cycle> cycles(const Perm &a, bool include_fixed) {
  std::vector<Cycle> out;
  std::vector<std::uint8_t> seen(a.degree(), 0);
  for (std::uint32_t start = 0; start < a.degree(); ++start) {
    if (seen[start])
      continue;
    Cycle c;
    for (std::uint32_t p = start; !seen[p]; p = a[p]) {
      seen[p] = 1;
      c.push_back(p);
    }
    if (c.size() > 1 || include_fixed)
      out.push_back(std::move(c));
  }
  return out;
}

Perm restrict_to_prefix(const Perm &p, std::size_t n) {
  if (n > p.degree())
    throw StructuralError("restriction range exceeds permutation degree");
  std::vector<std::uint32_t> images(p.images().begin(), p.images().begin() + n);
  for (auto v : images)
    if (v >= n)
      throw StructuralError("permutation does not preserve the prefix");
  return Perm(std::move(images));
}

namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b)
      parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::uint32_t> parent;
};

std::uint32_t smallest_moved_point(const Perm &p) {
  for (std::uint32_t i = 0; i < p.degree(); ++i)
    if (p[i] != i)
      return i;
  return static_cast<std::uint32_t>(p.degree());
}

} // namespace

std::vector<std::vector<std::uint32_t>>
point_orbits(std::span<const Perm> gens, std::span<const std::uint32_t> points) {
  std::size_t n = 0;
  for (const auto &g : gens)
    n = std::max(n, g.degree());
  for (auto p : points)
    n = std::max<std::size_t>(n, p + 1);
  UnionFind uf(n);
  for (const auto &g : gens)
    for (std::uint32_t i = 0; i < g.degree(); ++i)
      uf.unite(i, g[i]);

  std::vector<std::uint32_t> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::int64_t> slot(n, -1);
  for (auto p : sorted) {
    auto r = uf.find(p);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::int64_t>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[r])].push_back(p);
  }
  return out;
}

PermGroup PermGroup::schreier_sims(std::vector<Perm> gens) {
  std::size_t degree = gens.empty() ? 0 : gens.front().degree();
  return schreier_sims(std::move(gens), degree);
}

PermGroup PermGroup::schreier_sims(std::vector<Perm> gens, std::size_t degree) {
  PermGroup g;
  g.degree_ = degree;
  for (const auto &s : gens)
    if (s.degree() != degree)
      throw StructuralError("generators must share the group degree");
  g.generators_ = std::move(gens);

  for (const auto &s : g.generators_) {
    if (s.is_identity())
      continue;
    if (std::find(g.strong_.begin(), g.strong_.end(), s) != g.strong_.end())
      continue;
    g.strong_.push_back(s);
  }

  // Initial base: every strong generator moves some base point.
  for (const auto &s : g.strong_) {
    bool fixes_base = true;
    for (const auto &lv : g.levels_)
      if (s[lv.base_point] != lv.base_point) {
        fixes_base = false;
        break;
      }
    if (fixes_base)
      g.add_level(smallest_moved_point(s));
  }
  for (std::uint32_t si = 0; si < g.strong_.size(); ++si) {
    const auto &s = g.strong_[si];
    for (auto &lv : g.levels_) {
      lv.gens.push_back(si);
      if (s[lv.base_point] != lv.base_point)
        break;
    }
  }
  for (auto &lv : g.levels_)
    g.extend_orbit(lv);

  // Close every level under Schreier generators, deepest level first.
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(g.levels_.size()) - 1;
  while (i >= 0) {
    bool extended = false;
    auto li = static_cast<std::size_t>(i);
    for (std::size_t k = 0; k < g.levels_[li].orbit.size() && !extended; ++k) {
      while (g.levels_[li].checked[k] < g.levels_[li].gens.size()) {
        Level &lv = g.levels_[li];
        const auto gi = lv.checked[k]++;
        const Perm &s = g.strong_[lv.gens[gi]];
        const auto beta = lv.orbit[k];
        const auto gamma = s[beta];
        Perm h = lv.transversal[k] * s *
                 lv.transversal[static_cast<std::size_t>(lv.slot[gamma])].inverse();
        if (h.is_identity())
          continue;
        std::size_t j = g.sift(h, li + 1);
        if (h.is_identity())
          continue;
        if (j == g.levels_.size())
          g.add_level(smallest_moved_point(h));
        g.add_strong_generator(li + 1, j, std::move(h));
        i = static_cast<std::ptrdiff_t>(j);
        extended = true;
        break;
      }
    }
    if (!extended)
      --i;
  }
  return g;
}

void PermGroup::add_level(std::uint32_t base_point) {
  Level lv;
  lv.base_point = base_point;
  lv.slot.assign(degree_, -1);
  lv.slot[base_point] = 0;
  lv.orbit.push_back(base_point);
  lv.transversal.emplace_back(degree_);
  lv.checked.push_back(0);
  levels_.push_back(std::move(lv));
}

void PermGroup::add_strong_generator(std::size_t first_level,
                                     std::size_t last_level, Perm g) {
  const auto idx = static_cast<std::uint32_t>(strong_.size());
  strong_.push_back(std::move(g));
  for (std::size_t l = first_level; l <= last_level; ++l) {
    levels_[l].gens.push_back(idx);
    extend_orbit(levels_[l]);
  }
}

void PermGroup::extend_orbit(Level &lv) {
  for (std::size_t k = 0; k < lv.orbit.size(); ++k) {
    for (auto gi : lv.gens) {
      const Perm &s = strong_[gi];
      const auto img = s[lv.orbit[k]];
      if (lv.slot[img] >= 0)
        continue;
      lv.slot[img] = static_cast<std::int32_t>(lv.orbit.size());
      lv.orbit.push_back(img);
      lv.transversal.push_back(lv.transversal[k] * s);
      lv.checked.push_back(0);
    }
  }
}

std::size_t PermGroup::sift(Perm &g, std::size_t level) const {
  for (std::size_t l = level; l < levels_.size(); ++l) {
    const Level &lv = levels_[l];
    const auto beta = g[lv.base_point];
    if (lv.slot[beta] < 0)
      return l;
    if (beta != lv.base_point)
      g = g * lv.transversal[static_cast<std::size_t>(lv.slot[beta])].inverse();
  }
  return levels_.size();
}

std::vector<std::uint32_t> PermGroup::base() const {
  std::vector<std::uint32_t> b;
  for (const auto &lv : levels_)
    b.push_back(lv.base_point);
  return b;
}

std::vector<Perm> PermGroup::strong_generators() const { return strong_; }

std::vector<std::size_t> PermGroup::orbit_sizes() const {
  std::vector<std::size_t> s;
  for (const auto &lv : levels_)
    s.push_back(lv.orbit.size());
  return s;
}

BigInt PermGroup::order() const {
  BigInt result = 1;
  for (const auto &lv : levels_)
    result *= lv.orbit.size();
  return result;
}

bool PermGroup::contains(const Perm &g) const {
  if (g.degree() != degree_)
    return false;
  Perm h = g;
  if (sift(h, 0) != levels_.size())
    return false;
  return h.is_identity();
}

std::vector<Perm> PermGroup::elements(const BigInt &cap) const {
  const BigInt ord = order();
  if (ord > cap)
    throw OrderExceedsCap("group order " + ord.str() + " exceeds cap " +
                          cap.str());
  std::vector<Perm> current{Perm(degree_)};
  for (std::size_t l = levels_.size(); l-- > 0;) {
    std::vector<Perm> next;
    next.reserve(current.size() * levels_[l].transversal.size());
    for (const auto &e : current)
      for (const auto &u : levels_[l].transversal)
        next.push_back(e * u);
    current = std::move(next);
  }
  return current;
}

ProductReplacement::ProductReplacement(std::span<const Perm> gens,
                                       std::size_t degree, Params params,
                                       Rng &rng)
    : params_(params), accumulator_(degree) {
  for (const auto &g : gens)
    if (g.degree() != degree)
      throw StructuralError("generators must share the sampler degree");
  if (gens.empty()) {
    trivial_ = true;
    return;
  }
  const std::size_t r = std::max({params_.slots, gens.size(), std::size_t{2}});
  slots_.reserve(r);
  for (std::size_t i = 0; i < r; ++i)
    slots_.push_back(gens[i % gens.size()]);
  for (std::size_t i = 0; i < params_.burn_in; ++i)
    step(rng);
}

void ProductReplacement::step(Rng &rng) {
  const std::size_t r = slots_.size();
  std::uniform_int_distribution<std::size_t> pick_i(0, r - 1);
  std::uniform_int_distribution<std::size_t> pick_j(0, r - 2);
  const std::size_t i = pick_i(rng);
  std::size_t j = pick_j(rng);
  if (j >= i)
    ++j;
  const auto coin = rng();
  const bool invert = coin & 1u;
  const bool on_left = (coin >> 1) & 1u;
  const Perm other = invert ? slots_[j].inverse() : slots_[j];
  slots_[i] = on_left ? other * slots_[i] : slots_[i] * other;
  accumulator_ = accumulator_ * slots_[i];
}

Perm ProductReplacement::next(Rng &rng) {
  if (trivial_)
    return accumulator_;
  for (std::size_t s = 0; s < params_.steps_per_draw; ++s)
    step(rng);
  return accumulator_;
}

} // namespace symlift
