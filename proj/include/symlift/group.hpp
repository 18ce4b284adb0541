#pragma once

// Permutation groups: elementary operations, a deterministic Schreier-Sims
// stabilizer chain and product-replacement random elements.
//
// Composition convention: (a * b)(i) = b(a(i)), i.e. apply a first.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace symlift {

using BigInt = boost::multiprecision::cpp_int;
using Rng = std::mt19937_64;

/// Natural log of a positive arbitrary-precision integer.
double log_bigint(const BigInt &value);

class Perm {
public:
  Perm() = default;
  /// Identity on [0, degree).
  explicit Perm(std::size_t degree);
  /// Throws StructuralError unless `images` is a bijection on [0, size).
  explicit Perm(std::vector<std::uint32_t> images);

  static Perm from_cycles(
      std::size_t degree,
      std::initializer_list<std::initializer_list<std::uint32_t>> cycles);

  std::size_t degree() const { return images_.size(); }
  std::uint32_t operator[](std::size_t i) const { return images_[i]; }
  const std::vector<std::uint32_t> &images() const { return images_; }

  bool is_identity() const;
  Perm inverse() const;

  friend Perm operator*(const Perm &a, const Perm &b);
  friend bool operator==(const Perm &, const Perm &) = default;
  friend auto operator<=>(const Perm &, const Perm &) = default;

private:
  std::vector<std::uint32_t> images_;
};

Perm compose(const Perm &a, const Perm &b);
Perm inverse(const Perm &a);

using Cycle = std::vector<std::uint32_t>;

/// Disjoint cycles, each starting at its smallest point, ordered by that
/// point. Fixed points appear as 1-cycles only when requested.
std::vector<Cycle> cycles(const Perm &a, bool include_fixed = false);

/// Restriction of `p` to [0, n). Throws StructuralError if p does not map
/// that range onto itself.
Perm restrict_to_prefix(const Perm &p, std::size_t n);

/// Orbits of `points` under the group generated by `gens`, each sorted, in
/// order of their smallest member. Points not in `points` are ignored for
/// the output but still link their neighbours.
std::vector<std::vector<std::uint32_t>>
point_orbits(std::span<const Perm> gens, std::span<const std::uint32_t> points);

/// Stabilizer chain built by deterministic Schreier-Sims. Base points are
/// the smallest points moved by the residues that extend the chain.
class PermGroup {
public:
  /// Group generated by `gens` acting on [0, degree).
  static PermGroup schreier_sims(std::vector<Perm> gens, std::size_t degree);
  /// Degree taken from the generators; empty list gives the trivial group
  /// of degree 0.
  static PermGroup schreier_sims(std::vector<Perm> gens);

  std::size_t degree() const { return degree_; }
  const std::vector<Perm> &generators() const { return generators_; }
  std::vector<std::uint32_t> base() const;
  std::vector<Perm> strong_generators() const;
  /// Fundamental orbit sizes along the chain.
  std::vector<std::size_t> orbit_sizes() const;

  BigInt order() const;
  bool contains(const Perm &g) const;

  /// Every element exactly once. Throws OrderExceedsCap when the order
  /// exceeds `cap`.
  std::vector<Perm> elements(const BigInt &cap) const;

private:
  struct Level {
    std::uint32_t base_point;
    std::vector<std::uint32_t> gens;   // indices into strong_
    std::vector<std::uint32_t> orbit;  // orbit points in discovery order
    std::vector<std::int32_t> slot;    // point -> index into orbit / -1
    std::vector<Perm> transversal;     // transversal[k]: base -> orbit[k]
    std::vector<std::uint32_t> checked; // per orbit point: gens tested
  };

  void add_level(std::uint32_t base_point);
  void add_strong_generator(std::size_t first_level, std::size_t last_level,
                            Perm g);
  void extend_orbit(Level &level);
  /// Sifts g from `level`; returns the level where it dropped out
  /// (levels_.size() if it sifted through) and leaves the residue in g.
  std::size_t sift(Perm &g, std::size_t level) const;

  std::size_t degree_ = 0;
  std::vector<Perm> generators_;
  std::vector<Perm> strong_;
  std::vector<Level> levels_;
};

/// Product-replacement generator of (near-)uniform random group elements,
/// with an accumulator ("rattle") for better mixing. The slot list is seeded
/// with the generators, cycled to fill.
class ProductReplacement {
public:
  struct Params {
    std::size_t slots = 10;
    std::size_t burn_in = 60;
    std::size_t steps_per_draw = 2;
  };

  ProductReplacement(std::span<const Perm> gens, std::size_t degree,
                     Params params, Rng &rng);
  ProductReplacement(std::span<const Perm> gens, std::size_t degree, Rng &rng)
      : ProductReplacement(gens, degree, Params{}, rng) {}

  Perm next(Rng &rng);

private:
  void step(Rng &rng);

  Params params_;
  std::vector<Perm> slots_;
  Perm accumulator_;
  bool trivial_ = false;
};

} // namespace symlift
