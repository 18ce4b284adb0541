#pragma once

// Exact lifted inference by breadth-first generation of one canonical
// representative per orbit of Aut(G) acting on assignments.

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "symlift/canon.hpp"
#include "symlift/group.hpp"
#include "symlift/model.hpp"

namespace symlift {

struct OrbitRecord {
  Assignment representative;
  BigInt orbit_size;
  double log_score; // -inf when a hard clause is violated
};

struct CensusStats {
  std::uint64_t expansions = 0;
  /// Canonizations of assignment-encoded graphs (one per popped state).
  std::uint64_t certificate_calls = 0;
  /// Extra canonizations spent extracting representatives of new orbits.
  std::uint64_t representative_calls = 0;
  std::uint64_t pushes = 0;
  double wall_seconds = 0.0;
};

struct OrbitCensus {
  std::vector<OrbitRecord> records; // BFS order
  BigInt aut_order;
  CensusStats stats;
};

struct ExactOptions {
  /// Lemma-style pruning: one augmentation per variable orbit of the
  /// stabilizer. Disabling it flips every false variable.
  bool expansion_pruning = true;
  /// Worker threads for frontier canonization. Results do not depend on it.
  unsigned threads = 1;
  CanonOptions canon;
};

/// Model plus its automorphism group, shared by exact inference and the
/// samplers. Immutable after construction; const members are thread-safe.
class LiftedModel {
public:
  explicit LiftedModel(const Model &m, CanonOptions opt = {});

  const Model &model() const { return canon_.model(); }
  const ModelCanonizer &canonizer() const { return canon_; }
  /// Aut(G) acting on all vertices of the induced graph.
  const PermGroup &aut() const { return aut_; }
  const std::vector<Perm> &generators() const { return canon_.base().generators; }
  std::size_t num_vars() const { return canon_.model().num_vars(); }

  /// |Aut(G)| / |Aut(G(F,x))| given the canonized encoding of x.
  BigInt orbit_size(const AutResult &encoded) const;
  BigInt orbit_size(const Assignment &x) const;

  /// Orbits of the stabilizer on variables, given the encoding of x.
  std::vector<std::vector<std::uint32_t>> variable_orbits(const AutResult &encoded) const;

  /// Throws EvidenceNotInvariant unless the evidence subset is mapped onto
  /// itself by every generator.
  void check_evidence(const Evidence &e) const;

private:
  ModelCanonizer canon_;
  PermGroup aut_;
  std::vector<std::uint32_t> var_points_;
};

/// order(autG) / |stabilizer of x|; throws NonDivisibleOrder if the
/// division is not exact.
BigInt orbit_size(const Model &m, const PermGroup &autG, const Assignment &x);

/// One copy of x per variable orbit containing a false variable, with that
/// orbit's smallest false variable set true.
std::vector<Assignment> augmentations(const Assignment &x,
                                      std::span<const std::vector<std::uint32_t>> var_orbits);

OrbitCensus generate_orbits(const LiftedModel &lm, const ExactOptions &opt = {});
OrbitCensus generate_orbits(const Model &m, const ExactOptions &opt = {});

/// log Z; throws AllZeroMass when every record scores -inf.
double partition_function(const OrbitCensus &census);

/// P(evidence of lm.model()) from a census of that model.
double prob_evidence(const LiftedModel &lm, const OrbitCensus &census);
double prob_evidence(const Model &m);

struct MpeResult {
  Assignment state;
  double log_score;
};

/// Highest-scoring evidence-satisfying representative; ties go to the
/// lexicographically smallest bit string.
MpeResult mpe(const LiftedModel &lm, const OrbitCensus &census);
MpeResult mpe(const Model &m);

/// One JSON object per line: representative_bits, orbit_size (decimal
/// string), log_score (number, or the string "-inf").
void write_census_jsonl(std::ostream &os, const OrbitCensus &census);

} // namespace symlift
