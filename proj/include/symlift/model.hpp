#pragma once

// Discrete probability models over binary variables: weighted clauses,
// fully symmetric count-table factors and a cardinality evidence predicate.
// All scores are natural-log weights.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace symlift {

using VarId = std::uint32_t;

/// Truth assignment to the variables of a model. Bit i is variable i.
/// The packed state index of an assignment is sum_i x_i * 2^i.
class Assignment {
public:
  Assignment() = default;
  explicit Assignment(std::size_t num_vars, bool value = false)
      : bits_(num_vars, value ? 1 : 0) {}

  /// Parses a string of '0'/'1' characters, variable 0 first.
  static Assignment from_string(std::string_view bits);
  static Assignment from_index(std::uint64_t index, std::size_t num_vars);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }
  std::size_t count_true() const;

  std::uint64_t to_index() const;
  std::string to_string() const;

  friend bool operator==(const Assignment &, const Assignment &) = default;
  friend auto operator<=>(const Assignment &, const Assignment &) = default;

  const std::vector<std::uint8_t> &bits() const { return bits_; }

private:
  std::vector<std::uint8_t> bits_;
};

struct AssignmentHash {
  std::size_t operator()(const Assignment &x) const noexcept;
};

/// Log-weight of a clause: a finite real or the HARD marker.
class Weight {
public:
  static Weight hard() { return Weight(true, 0.0); }
  static Weight finite(double log_weight);

  bool is_hard() const { return hard_; }
  double value() const { return value_; }

  /// Bit-level equality: two finite weights match only if their doubles are
  /// bit-identical.
  friend bool operator==(const Weight &a, const Weight &b);

private:
  Weight(bool hard, double value) : hard_(hard), value_(value) {}
  bool hard_;
  double value_;
};

struct Literal {
  VarId var;
  bool positive;

  friend bool operator==(const Literal &, const Literal &) = default;
};

struct WeightedClause {
  Weight weight;
  std::vector<Literal> literals;

  friend bool operator==(const WeightedClause &, const WeightedClause &) = default;
};

/// Fully symmetric factor: its log-weight depends only on how many variables
/// in scope are true. count_table.size() == scope.size() + 1.
struct SymFactor {
  std::vector<VarId> scope;
  std::vector<double> count_table;

  friend bool operator==(const SymFactor &a, const SymFactor &b);
};

enum class Comparator { Eq, Le, Ge };

struct Evidence {
  enum class Kind { True, Cardinality };

  Kind kind = Kind::True;
  std::vector<VarId> subset;
  Comparator comparator = Comparator::Eq;
  std::size_t bound = 0;

  static Evidence always() { return {}; }
  static Evidence cardinality(std::vector<VarId> subset, Comparator cmp,
                              std::size_t bound);

  bool holds(const Assignment &x) const;

  friend bool operator==(const Evidence &, const Evidence &) = default;
};

/// Immutable model. The constructor validates every structural invariant and
/// throws StructuralError on violation.
class Model {
public:
  Model(std::size_t num_vars, std::vector<WeightedClause> clauses,
        std::vector<SymFactor> factors, Evidence evidence = Evidence::always());

  std::size_t num_vars() const { return num_vars_; }
  const std::vector<WeightedClause> &clauses() const { return clauses_; }
  const std::vector<SymFactor> &factors() const { return factors_; }
  const Evidence &evidence() const { return evidence_; }

  /// Indices of clauses / factors mentioning a variable.
  const std::vector<std::uint32_t> &clauses_of(VarId v) const {
    return clauses_of_[v];
  }
  const std::vector<std::uint32_t> &factors_of(VarId v) const {
    return factors_of_[v];
  }

  Model with_evidence(Evidence evidence) const;

  friend bool operator==(const Model &a, const Model &b) {
    return a.num_vars_ == b.num_vars_ && a.clauses_ == b.clauses_ &&
           a.factors_ == b.factors_ && a.evidence_ == b.evidence_;
  }

private:
  std::size_t num_vars_;
  std::vector<WeightedClause> clauses_;
  std::vector<SymFactor> factors_;
  Evidence evidence_;
  std::vector<std::vector<std::uint32_t>> clauses_of_;
  std::vector<std::vector<std::uint32_t>> factors_of_;
};

bool satisfies(const WeightedClause &clause, const Assignment &x);

/// Sum of satisfied finite clause weights plus factor table entries;
/// -infinity iff a HARD clause is violated.
double log_score(const Model &m, const Assignment &x);

/// Contribution of the clauses and factors that mention `var`. Differences
/// of this quantity between two assignments that differ only at `var` equal
/// the difference of their full log-scores.
double local_log_score(const Model &m, const Assignment &x, VarId var);

bool evidence_holds(const Model &m, const Assignment &x);

/// Upper bound on the number of variables accepted by the generators.
inline constexpr std::size_t kMaxGeneratedVars = 1u << 16;

/// n pigeons, m holes, variable x_ij = j*n + i, so
/// bit strings group by hole. `hard` adds the
/// at-most-one-hole-per-pigeon clauses; without them this is the "quantum"
/// pigeonhole model.
Model gen_pigeonhole(std::size_t pigeons, std::size_t holes,
                     double soft_weight = 2.0, bool hard = true);

/// Complete pairwise model: `pair_table` on every pair, plus a unary
/// evidence factor `ev_table` on variable 0.
Model gen_pairwise(std::size_t n, const std::vector<double> &pair_table,
                   const std::vector<double> &ev_table);

} // namespace symlift
