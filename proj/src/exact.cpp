#include "symlift/exact.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "symlift/errors.hpp"

namespace symlift {

namespace {

template <class Fn> void parallel_for(std::size_t count, unsigned threads, Fn &&fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= count || failed.load())
        return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true))
          error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = std::min<std::size_t>(threads, count);
  for (std::size_t t = 1; t < n; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

double log_sum_exp(const std::vector<double> &terms) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double t : terms)
    hi = std::max(hi, t);
  if (std::isinf(hi))
    return hi;
  double acc = 0.0;
  for (double t : terms)
    acc += std::exp(t - hi);
  return hi + std::log(acc);
}

BigInt divide_orders(const BigInt &whole, const BigInt &part) {
  if (part == 0 || whole % part != 0)
    throw NonDivisibleOrder("stabilizer order does not divide the group order");
  return whole / part;
}

} // namespace

LiftedModel::LiftedModel(const Model &m, CanonOptions opt)
    : canon_(m, opt),
      aut_(PermGroup::schreier_sims(canon_.base().generators,
                                    canon_.graph().num_vertices())) {
  var_points_.resize(m.num_vars());
  for (std::uint32_t v = 0; v < m.num_vars(); ++v)
    var_points_[v] = v;
}

BigInt LiftedModel::orbit_size(const AutResult &encoded) const {
  const auto stab =
      PermGroup::schreier_sims(encoded.generators, canon_.graph().num_vertices());
  return divide_orders(aut_.order(), stab.order());
}

BigInt LiftedModel::orbit_size(const Assignment &x) const {
  return orbit_size(canon_.canonize(x));
}

std::vector<std::vector<std::uint32_t>>
LiftedModel::variable_orbits(const AutResult &encoded) const {
  return point_orbits(encoded.generators, var_points_);
}

void LiftedModel::check_evidence(const Evidence &e) const {
  if (e.kind == Evidence::Kind::True)
    return;
  std::vector<std::uint8_t> in(num_vars(), 0);
  for (auto v : e.subset)
    in[v] = 1;
  for (const auto &g : generators())
    for (auto v : e.subset)
      if (g[v] >= num_vars() || !in[g[v]])
        throw EvidenceNotInvariant("evidence subset is not closed under the symmetry group");
}

BigInt orbit_size(const Model &m, const PermGroup &autG, const Assignment &x) {
  const auto g = induce(m).graph;
  const auto enc = canonical_form(encode_assignment(m, g, x));
  const auto stab = PermGroup::schreier_sims(enc.generators, g.num_vertices());
  return divide_orders(autG.order(), stab.order());
}

std::vector<Assignment>
augmentations(const Assignment &x, std::span<const std::vector<std::uint32_t>> var_orbits) {
  std::vector<Assignment> out;
  for (const auto &orbit : var_orbits) {
    std::optional<std::uint32_t> pick;
    for (auto v : orbit)
      if (!x[v] && (!pick || v < *pick))
        pick = v;
    if (pick) {
      Assignment y = x;
      y.set(*pick, true);
      out.push_back(std::move(y));
    }
  }
  return out;
}

OrbitCensus generate_orbits(const LiftedModel &lm, const ExactOptions &opt) {
  const auto start = std::chrono::steady_clock::now();
  const auto &canon = lm.canonizer();
  const auto n = lm.num_vars();

  OrbitCensus census;
  census.aut_order = lm.aut().order();
  std::unordered_set<Certificate, CertificateHash> visited;

  std::vector<Assignment> level{Assignment(n)};
  std::vector<std::vector<std::uint32_t>> singletons(n);
  for (std::uint32_t v = 0; v < n; ++v)
    singletons[v] = {v};

  while (!level.empty()) {
    // Canonize the whole level, then merge in order so the census does not
    // depend on the thread count.
    std::vector<AutResult> encoded(level.size());
    parallel_for(level.size(), opt.threads,
                 [&](std::size_t i) { encoded[i] = canon.canonize(level[i]); });
    census.stats.certificate_calls += level.size();

    std::vector<std::size_t> fresh;
    for (std::size_t i = 0; i < level.size(); ++i)
      if (visited.insert(encoded[i].certificate).second)
        fresh.push_back(i);

    std::vector<OrbitRecord> records(fresh.size());
    std::vector<std::vector<Assignment>> children(fresh.size());
    parallel_for(fresh.size(), opt.threads, [&](std::size_t k) {
      const auto i = fresh[k];
      auto &rec = records[k];
      rec.representative = canon.representative(level[i], encoded[i]);
      rec.orbit_size = lm.orbit_size(encoded[i]);
      rec.log_score = log_score(lm.model(), rec.representative);
      children[k] = opt.expansion_pruning
                        ? augmentations(level[i], lm.variable_orbits(encoded[i]))
                        : augmentations(level[i], singletons);
    });
    census.stats.representative_calls += fresh.size();
    census.stats.expansions += fresh.size();

    std::vector<Assignment> next;
    std::unordered_set<Assignment, AssignmentHash> queued;
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      census.records.push_back(std::move(records[k]));
      for (auto &child : children[k])
        if (queued.insert(child).second) {
          next.push_back(std::move(child));
          ++census.stats.pushes;
        }
    }
    level = std::move(next);
  }

  census.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return census;
}

OrbitCensus generate_orbits(const Model &m, const ExactOptions &opt) {
  return generate_orbits(LiftedModel(m, opt.canon), opt);
}

double partition_function(const OrbitCensus &census) {
  std::vector<double> terms;
  for (const auto &r : census.records)
    if (!std::isinf(r.log_score))
      terms.push_back(log_bigint(r.orbit_size) + r.log_score);
  if (terms.empty())
    throw AllZeroMass("every assignment violates a hard clause");
  return log_sum_exp(terms);
}

double prob_evidence(const LiftedModel &lm, const OrbitCensus &census) {
  const auto &e = lm.model().evidence();
  lm.check_evidence(e);
  const double log_z = partition_function(census);
  if (e.kind == Evidence::Kind::True)
    return 1.0;
  std::vector<double> terms;
  for (const auto &r : census.records)
    if (!std::isinf(r.log_score) && e.holds(r.representative))
      terms.push_back(log_bigint(r.orbit_size) + r.log_score);
  if (terms.empty())
    return 0.0;
  return std::exp(log_sum_exp(terms) - log_z);
}

double prob_evidence(const Model &m) {
  LiftedModel lm(m);
  lm.check_evidence(m.evidence());
  return prob_evidence(lm, generate_orbits(lm));
}

MpeResult mpe(const LiftedModel &lm, const OrbitCensus &census) {
  const auto &e = lm.model().evidence();
  lm.check_evidence(e);
  const OrbitRecord *best = nullptr;
  for (const auto &r : census.records) {
    if (std::isinf(r.log_score) || !e.holds(r.representative))
      continue;
    if (!best || r.log_score > best->log_score ||
        (r.log_score == best->log_score && r.representative < best->representative))
      best = &r;
  }
  if (!best)
    throw NoSatisfyingState("no evidence-satisfying assignment has positive probability");
  return {best->representative, best->log_score};
}

MpeResult mpe(const Model &m) {
  LiftedModel lm(m);
  lm.check_evidence(m.evidence());
  return mpe(lm, generate_orbits(lm));
}

void write_census_jsonl(std::ostream &os, const OrbitCensus &census) {
  for (const auto &r : census.records) {
    nlohmann::ordered_json j;
    j["representative_bits"] = r.representative.to_string();
    j["orbit_size"] = r.orbit_size.str();
    if (std::isinf(r.log_score))
      j["log_score"] = "-inf";
    else
      j["log_score"] = r.log_score;
    os << j.dump() << '\n';
  }
}

} // namespace symlift
