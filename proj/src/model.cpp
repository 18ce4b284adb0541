#include "symlift/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "symlift/errors.hpp"

namespace symlift {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool bit_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

void check_var(VarId v, std::size_t num_vars, const char *where) {
  if (v >= num_vars)
    throw StructuralError(std::string(where) + ": variable " +
                          std::to_string(v) + " out of range [0, " +
                          std::to_string(num_vars) + ")");
}

void check_length(const Model &m, const Assignment &x) {
  if (x.size() != m.num_vars())
    throw StructuralError("assignment has " + std::to_string(x.size()) +
                          " values, model has " +
                          std::to_string(m.num_vars()) + " variables");
}

} // namespace

Assignment Assignment::from_string(std::string_view bits) {
  Assignment x(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1')
      throw StructuralError("assignment string must contain only 0 and 1");
    x.bits_[i] = bits[i] == '1';
  }
  return x;
}

Assignment Assignment::from_index(std::uint64_t index, std::size_t num_vars) {
  if (num_vars > 63)
    throw StructuralError("state index needs at most 63 variables");
  Assignment x(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i)
    x.bits_[i] = (index >> i) & 1u;
  return x;
}

std::size_t Assignment::count_true() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::uint64_t Assignment::to_index() const {
  if (bits_.size() > 63)
    throw StructuralError("state index needs at most 63 variables");
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    index |= static_cast<std::uint64_t>(bits_[i]) << i;
  return index;
}

std::string Assignment::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i])
      s[i] = '1';
  return s;
}

std::size_t AssignmentHash::operator()(const Assignment &x) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto b : x.bits()) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h ^ x.size());
}

Weight Weight::finite(double log_weight) {
  if (!std::isfinite(log_weight))
    throw StructuralError("clause weight must be finite or HARD");
  return Weight(false, log_weight);
}

bool operator==(const Weight &a, const Weight &b) {
  if (a.hard_ || b.hard_)
    return a.hard_ == b.hard_;
  return bit_equal(a.value_, b.value_);
}

bool operator==(const SymFactor &a, const SymFactor &b) {
  return a.scope == b.scope &&
         std::equal(a.count_table.begin(), a.count_table.end(),
                    b.count_table.begin(), b.count_table.end(), bit_equal);
}

Evidence Evidence::cardinality(std::vector<VarId> subset, Comparator cmp,
                               std::size_t bound) {
  Evidence e;
  e.kind = Kind::Cardinality;
  e.subset = std::move(subset);
  e.comparator = cmp;
  e.bound = bound;
  return e;
}

bool Evidence::holds(const Assignment &x) const {
  if (kind == Kind::True)
    return true;
  std::size_t count = 0;
  for (VarId v : subset)
    count += x[v] ? 1 : 0;
  switch (comparator) {
  case Comparator::Eq:
    return count == bound;
  case Comparator::Le:
    return count <= bound;
  case Comparator::Ge:
    return count >= bound;
  }
  return false;
}

Model::Model(std::size_t num_vars, std::vector<WeightedClause> clauses,
             std::vector<SymFactor> factors, Evidence evidence)
    : num_vars_(num_vars), clauses_(std::move(clauses)),
      factors_(std::move(factors)), evidence_(std::move(evidence)),
      clauses_of_(num_vars), factors_of_(num_vars) {
  if (num_vars_ == 0)
    throw StructuralError("model needs at least one variable");

  std::vector<std::uint32_t> seen(num_vars_, 0);
  std::uint32_t stamp = 0;
  auto fresh_stamp = [&] {
    if (++stamp == 0) {
      std::fill(seen.begin(), seen.end(), 0);
      stamp = 1;
    }
    return stamp;
  };

  for (std::size_t c = 0; c < clauses_.size(); ++c) {
    const auto &clause = clauses_[c];
    if (clause.literals.empty())
      throw StructuralError("clause " + std::to_string(c) + " is empty");
    if (!clause.weight.is_hard() && !std::isfinite(clause.weight.value()))
      throw StructuralError("clause weight must be finite or HARD");
    auto s = fresh_stamp();
    for (const auto &lit : clause.literals) {
      check_var(lit.var, num_vars_, "clause");
      if (seen[lit.var] == s)
        throw StructuralError("clause " + std::to_string(c) +
                              " repeats variable " + std::to_string(lit.var));
      seen[lit.var] = s;
      clauses_of_[lit.var].push_back(static_cast<std::uint32_t>(c));
    }
  }

  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const auto &factor = factors_[f];
    if (factor.scope.empty())
      throw StructuralError("factor " + std::to_string(f) + " has empty scope");
    if (factor.count_table.size() != factor.scope.size() + 1)
      throw StructuralError("factor " + std::to_string(f) +
                            " count table must have arity+1 entries");
    for (double t : factor.count_table)
      if (!std::isfinite(t))
        throw StructuralError("factor table entries must be finite");
    auto s = fresh_stamp();
    for (VarId v : factor.scope) {
      check_var(v, num_vars_, "factor");
      if (seen[v] == s)
        throw StructuralError("factor " + std::to_string(f) +
                              " repeats variable " + std::to_string(v));
      seen[v] = s;
      factors_of_[v].push_back(static_cast<std::uint32_t>(f));
    }
  }

  if (evidence_.kind == Evidence::Kind::Cardinality) {
    auto s = fresh_stamp();
    for (VarId v : evidence_.subset) {
      check_var(v, num_vars_, "evidence");
      if (seen[v] == s)
        throw StructuralError("evidence subset repeats variable " +
                              std::to_string(v));
      seen[v] = s;
    }
    if (evidence_.bound > evidence_.subset.size())
      throw StructuralError("evidence bound exceeds subset size");
  }
}

Model Model::with_evidence(Evidence evidence) const {
  return Model(num_vars_, clauses_, factors_, std::move(evidence));
}

bool satisfies(const WeightedClause &clause, const Assignment &x) {
  for (const auto &lit : clause.literals) {
    if (lit.var >= x.size())
      throw StructuralError("clause variable out of range of assignment");
    if (x[lit.var] == lit.positive)
      return true;
  }
  return false;
}

namespace {

// Assumes literal variables are in range (validated by Model).
bool satisfied_unchecked(const WeightedClause &clause, const Assignment &x) {
  for (const auto &lit : clause.literals)
    if (x[lit.var] == lit.positive)
      return true;
  return false;
}

double factor_value(const SymFactor &f, const Assignment &x) {
  std::size_t k = 0;
  for (VarId v : f.scope)
    k += x[v] ? 1 : 0;
  return f.count_table[k];
}

} // namespace

double log_score(const Model &m, const Assignment &x) {
  check_length(m, x);
  double total = 0.0;
  for (const auto &clause : m.clauses()) {
    bool sat = satisfied_unchecked(clause, x);
    if (clause.weight.is_hard()) {
      if (!sat)
        return kNegInf;
    } else if (sat) {
      total += clause.weight.value();
    }
  }
  for (const auto &f : m.factors())
    total += factor_value(f, x);
  return total;
}

double local_log_score(const Model &m, const Assignment &x, VarId var) {
  check_length(m, x);
  check_var(var, m.num_vars(), "local_log_score");
  double total = 0.0;
  for (auto c : m.clauses_of(var)) {
    const auto &clause = m.clauses()[c];
    bool sat = satisfied_unchecked(clause, x);
    if (clause.weight.is_hard()) {
      if (!sat)
        return kNegInf;
    } else if (sat) {
      total += clause.weight.value();
    }
  }
  for (auto f : m.factors_of(var))
    total += factor_value(m.factors()[f], x);
  return total;
}

bool evidence_holds(const Model &m, const Assignment &x) {
  check_length(m, x);
  return m.evidence().holds(x);
}

Model gen_pigeonhole(std::size_t pigeons, std::size_t holes, double soft_weight,
                     bool hard) {
  if (pigeons < 1 || holes < 1)
    throw ConfigError("pigeonhole needs at least one pigeon and one hole");
  if (pigeons > kMaxGeneratedVars / holes)
    throw ConfigError("pigeonhole model exceeds the variable budget");
  const std::size_t n = pigeons * holes;
  auto var = [pigeons](std::size_t i, std::size_t j) {
    return static_cast<VarId>(j * pigeons + i);
  };

  std::vector<WeightedClause> clauses;
  if (hard) {
    for (std::size_t i = 0; i < pigeons; ++i)
      for (std::size_t k = 0; k < holes; ++k)
        for (std::size_t l = k + 1; l < holes; ++l)
          clauses.push_back({Weight::hard(),
                             {{var(i, k), false}, {var(i, l), false}}});
  }
  const auto w = Weight::finite(soft_weight);
  for (std::size_t j = 0; j < holes; ++j)
    for (std::size_t k = 0; k < pigeons; ++k)
      for (std::size_t l = k + 1; l < pigeons; ++l)
        clauses.push_back({w, {{var(k, j), false}, {var(l, j), false}}});

  return Model(n, std::move(clauses), {});
}

Model gen_pairwise(std::size_t n, const std::vector<double> &pair_table,
                   const std::vector<double> &ev_table) {
  if (n < 2)
    throw ConfigError("pairwise model needs at least two variables");
  if (n > kMaxGeneratedVars)
    throw ConfigError("pairwise model exceeds the variable budget");
  if (pair_table.size() != 3 || ev_table.size() != 2)
    throw ConfigError("pairwise tables need 3 (pair) and 2 (evidence) entries");
  std::vector<SymFactor> factors;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      factors.push_back({{static_cast<VarId>(a), static_cast<VarId>(b)},
                         pair_table});
  factors.push_back({{0}, ev_table});
  return Model(n, {}, std::move(factors));
}

} // namespace symlift
