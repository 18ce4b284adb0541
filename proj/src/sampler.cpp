#include "symlift/sampler.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "symlift/errors.hpp"

namespace symlift {

namespace {

double uniform01(Rng &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(Rng &rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

} // namespace

void validate(const ChainConfig &cfg) {
  if (cfg.burnside_steps < 1)
    throw ConfigError("burnside_steps must be at least 1");
  if (cfg.iterations < 1)
    throw ConfigError("iterations must be at least 1");
  if (cfg.thinning < 1)
    throw ConfigError("thinning must be at least 1");
  if (cfg.kind == ChainKind::Lifted && cfg.gibbs_updates_per_orbital_move < 1)
    throw ConfigError("gibbs_updates_per_orbital_move must be at least 1");
}

const StabilizerCache::Entry &StabilizerCache::get(const Assignment &x) {
  if (auto it = entries_.find(x); it != entries_.end())
    return it->second;
  if (entries_.size() >= capacity_)
    entries_.clear();
  auto enc = lm_.canonizer().canonize(x);
  Entry e{std::move(enc.generators), BigInt(0)};
  AutResult gens_only;
  gens_only.generators = e.generators;
  e.orbit_size = lm_.orbit_size(gens_only);
  return entries_.emplace(x, std::move(e)).first->second;
}

Assignment sample_fixer(const Perm &s, std::size_t num_vars, Rng &rng) {
  if (s.degree() < num_vars)
    throw InvariantError("permutation does not cover the variables");
  Assignment y(num_vars);
  std::vector<std::uint8_t> seen(num_vars, 0);
  for (std::uint32_t v = 0; v < num_vars; ++v) {
    if (seen[v])
      continue;
    const bool coin = (rng() >> 63) != 0;
    std::uint32_t u = v;
    do {
      if (u >= num_vars)
        throw InvariantError("permutation maps a variable to a non-variable vertex");
      seen[u] = 1;
      y.set(u, coin);
      u = s[u];
    } while (u != v);
  }
  return y;
}

Assignment burnside_step(StabilizerCache &cache, const LiftedModel &lm, const Assignment &x,
                         Rng &rng, std::size_t stabilizer_burn_in) {
  const auto &entry = cache.get(x);
  ProductReplacement pr(entry.generators, lm.canonizer().graph().num_vertices(),
                        ProductReplacement::Params{10, stabilizer_burn_in, 2}, rng);
  return sample_fixer(pr.next(rng), lm.num_vars(), rng);
}

Assignment burnside_step(const LiftedModel &lm, const Assignment &x, Rng &rng,
                         std::size_t stabilizer_burn_in) {
  StabilizerCache cache(lm, 1);
  return burnside_step(cache, lm, x, rng, stabilizer_burn_in);
}

bool orbit_jump_step(const LiftedModel &lm, StabilizerCache &cache, ChainState &st,
                     std::size_t k, Rng &rng, std::size_t stabilizer_burn_in) {
  Assignment proposal = st.current;
  for (std::size_t i = 0; i < k; ++i)
    proposal = burnside_step(cache, lm, proposal, rng, stabilizer_burn_in);

  const double proposed_score = log_score(lm.model(), proposal);
  if (std::isinf(proposed_score))
    return false;
  const double log_u = std::log(uniform01(rng));
  double log_ratio = std::numeric_limits<double>::infinity();
  if (!std::isinf(st.log_score)) {
    const double log_orb_new = log_bigint(cache.get(proposal).orbit_size);
    const double log_orb_old = log_bigint(cache.get(st.current).orbit_size);
    log_ratio = (proposed_score + log_orb_new) - (st.log_score + log_orb_old);
  }
  if (!(log_u < log_ratio))
    return false;
  st.current = std::move(proposal);
  st.log_score = proposed_score;
  return true;
}

double gibbs_conditional(const Model &m, const Assignment &x, VarId var) {
  Assignment y = x;
  y.set(var, false);
  const double l0 = local_log_score(m, y, var);
  y.set(var, true);
  const double l1 = local_log_score(m, y, var);
  if (std::isinf(l0) && std::isinf(l1))
    throw InvariantError("both values of a variable violate hard clauses");
  if (std::isinf(l0))
    return 1.0;
  if (std::isinf(l1))
    return 0.0;
  return 1.0 / (1.0 + std::exp(l0 - l1));
}

void gibbs_update(const Model &m, ChainState &st, Rng &rng) {
  const auto var = static_cast<VarId>(uniform_index(rng, m.num_vars()));
  const double p1 = gibbs_conditional(m, st.current, var);
  const bool value = uniform01(rng) < p1;
  if (st.current[var] != value) {
    st.current.set(var, value);
    st.log_score = log_score(m, st.current);
  }
}

Assignment apply_to_assignment(const Perm &g, const Assignment &x) {
  Assignment y(x.size());
  for (std::uint32_t v = 0; v < x.size(); ++v) {
    if (g[v] >= x.size())
      throw InvariantError("permutation maps a variable to a non-variable vertex");
    y.set(g[v], x[v]);
  }
  return y;
}

void lifted_mcmc_step(const LiftedModel &lm, ProductReplacement &aut_sampler, ChainState &st,
                      std::size_t gibbs_updates, Rng &rng) {
  for (std::size_t i = 0; i < gibbs_updates; ++i)
    gibbs_update(lm.model(), st, rng);
  st.current = apply_to_assignment(aut_sampler.next(rng), st.current);
  st.log_score = log_score(lm.model(), st.current);
}

ChainResult run_chain(const LiftedModel &lm, const ChainConfig &cfg, const Evidence &estimand,
                      const std::function<void(const ChainSample &)> &sink) {
  validate(cfg);
  const auto &m = lm.model();
  Rng rng(cfg.seed);

  ChainState st;
  st.current = cfg.init ? *cfg.init : Assignment(m.num_vars());
  if (st.current.size() != m.num_vars())
    throw ConfigError("initial state length does not match the model");
  st.log_score = log_score(m, st.current);
  if (std::isinf(st.log_score) && cfg.kind != ChainKind::OrbitJump)
    throw InitViolatesHard("initial state violates a hard clause");

  StabilizerCache cache(lm);
  std::optional<ProductReplacement> aut_sampler;
  if (cfg.kind == ChainKind::Lifted)
    aut_sampler.emplace(lm.generators(), lm.canonizer().graph().num_vertices(),
                        ProductReplacement::Params{10, cfg.orbital_burn_in, 2}, rng);

  ChainResult result;
  std::size_t hits = 0;
  const std::size_t total = cfg.burn_in + cfg.iterations;
  for (std::size_t step = 1; step <= total; ++step) {
    bool accepted = true;
    switch (cfg.kind) {
    case ChainKind::OrbitJump:
      accepted = orbit_jump_step(lm, cache, st, cfg.burnside_steps, rng, cfg.stabilizer_burn_in);
      break;
    case ChainKind::Lifted:
      lifted_mcmc_step(lm, *aut_sampler, st, cfg.gibbs_updates_per_orbital_move, rng);
      break;
    case ChainKind::Gibbs:
      gibbs_update(m, st, rng);
      break;
    }
    ++result.steps;
    if (step <= cfg.burn_in)
      continue;
    result.accepted += accepted ? 1 : 0;
    const auto iteration = step - cfg.burn_in;
    if (iteration % cfg.thinning != 0)
      continue;
    ++result.samples;
    hits += estimand.holds(st.current) ? 1 : 0;
    if (sink)
      sink(ChainSample{iteration, st.current, st.log_score, accepted});
  }
  result.estimate = result.samples ? static_cast<double>(hits) / result.samples : 0.0;
  return result;
}

} // namespace symlift
