#pragma once

// Canonical labeling and automorphism groups of colored graphs by
// individualization-refinement, and the induced canonization of assignments.

#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

#include "symlift/group.hpp"
#include "symlift/model.hpp"
#include "symlift/symgraph.hpp"

namespace symlift {

/// Ordered cells of vertices.
struct Partition {
  std::vector<std::vector<std::uint32_t>> cells;

  /// One cell per color, in color order (empty colors skipped).
  static Partition by_color(const ColoredGraph &g);
  friend bool operator==(const Partition &, const Partition &) = default;
};

/// Coarsest equitable refinement of `p`. Fragments of a split cell are
/// ordered by their neighbor count into the splitting cell; the result is a
/// deterministic function of the input.
Partition refine(const ColoredGraph &g, const Partition &p);

/// Canonical byte string of a colored graph: vertex count, colors in
/// canonical order, then the upper-triangular adjacency matrix (row-major,
/// most significant bit first). Equal certificates iff color-isomorphic.
struct Certificate {
  std::vector<std::uint8_t> bytes;

  friend bool operator==(const Certificate &, const Certificate &) = default;
  friend auto operator<=>(const Certificate &, const Certificate &) = default;
};

struct CertificateHash {
  std::size_t operator()(const Certificate &c) const noexcept;
};

struct CanonOptions {
  /// Prune search using discovered automorphisms. Disabling this never
  /// changes the certificate; it exists for differential testing.
  bool automorphism_pruning = true;
};

struct CanonStats {
  std::uint64_t nodes = 0;
  std::uint64_t leaves = 0;
};

struct AutResult {
  /// Color automorphisms generating Aut(g).
  std::vector<Perm> generators;
  Certificate certificate;
  /// vertex -> canonical position.
  Perm canonical_labeling;
  CanonStats stats;
};

AutResult canonical_form(const ColoredGraph &g, const CanonOptions &opt = {});

/// Canonization context for one model. Holds the induced graph and its
/// canonical form so repeated assignment queries share the work. All
/// member functions are const and safe to call concurrently.
class ModelCanonizer {
public:
  explicit ModelCanonizer(const Model &m, CanonOptions opt = {});

  const Model &model() const { return model_; }
  const ColoredGraph &graph() const { return induced_.graph; }
  const VertexMap &vertex_map() const { return induced_.map; }
  const CanonOptions &options() const { return opt_; }
  /// Canonical form (and automorphism generators) of the induced graph.
  const AutResult &base() const { return base_; }

  /// Canonical form of the assignment-encoded graph. Its generators generate
  /// the stabilizer of x in Aut(graph()).
  AutResult canonize(const Assignment &x) const;

  /// Canonical orbit representative of x, given canonize(x).
  Assignment representative(const Assignment &x, const AutResult &encoded) const;
  Assignment canonical_assignment(const Assignment &x) const;

private:
  Model model_;
  InducedGraph induced_;
  CanonOptions opt_;
  AutResult base_;
  Perm base_inverse_;
};

/// Representative of the orbit of x under Aut(induce(m)); idempotent and
/// constant on orbits.
Assignment canonical_assignment(const Model &m, const Assignment &x);

} // namespace symlift
