#pragma once

// Markov chains over assignments: the Burnside process, orbit-jump
// Metropolis-Hastings, single-site Gibbs and lifted MCMC.

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>

#include "symlift/exact.hpp"

namespace symlift {

enum class ChainKind { OrbitJump, Lifted, Gibbs };

struct ChainConfig {
  ChainKind kind = ChainKind::OrbitJump;
  std::size_t burnside_steps = 7;
  std::size_t gibbs_updates_per_orbital_move = 1;
  std::uint64_t seed = 0;
  /// Recorded steps, after burn-in.
  std::size_t iterations = 1000;
  std::size_t burn_in = 0;
  std::size_t thinning = 1;
  /// Starting state; all-false when absent.
  std::optional<Assignment> init;
  /// Burn-in of the product-replacement sampler built for each stabilizer.
  std::size_t stabilizer_burn_in = 30;
  /// Burn-in of the Aut(G) sampler used by lifted orbital moves.
  std::size_t orbital_burn_in = 60;
};

/// Validates a config; throws ConfigError.
void validate(const ChainConfig &cfg);

/// Memo of per-assignment stabilizer data. Owned by one chain.
class StabilizerCache {
public:
  struct Entry {
    std::vector<Perm> generators;
    BigInt orbit_size;
  };

  explicit StabilizerCache(const LiftedModel &lm, std::size_t capacity = 1u << 16)
      : lm_(lm), capacity_(capacity) {}

  const Entry &get(const Assignment &x);

private:
  const LiftedModel &lm_;
  std::size_t capacity_;
  std::unordered_map<Assignment, Entry, AssignmentHash> entries_;
};

struct ChainState {
  Assignment current;
  double log_score = 0.0;
};

/// Assignment with one fair coin per cycle of s on the variables
/// [0, num_vars); uniform over the assignments fixed by s.
Assignment sample_fixer(const Perm &s, std::size_t num_vars, Rng &rng);

/// One Burnside step: a near-uniform stabilizer element of x, then a
/// uniform fixed point of it.
Assignment burnside_step(const LiftedModel &lm, const Assignment &x, Rng &rng,
                         std::size_t stabilizer_burn_in = 30);
Assignment burnside_step(StabilizerCache &cache, const LiftedModel &lm,
                         const Assignment &x, Rng &rng, std::size_t stabilizer_burn_in);

/// k Burnside steps as an independence proposal, accepted with the
/// orbit-weighted Metropolis ratio. Returns whether the proposal was taken.
bool orbit_jump_step(const LiftedModel &lm, StabilizerCache &cache, ChainState &st,
                     std::size_t k, Rng &rng, std::size_t stabilizer_burn_in = 30);

/// Random-scan single-site Gibbs update.
void gibbs_update(const Model &m, ChainState &st, Rng &rng);

/// Probability that `var` is true given the rest of st.current.
double gibbs_conditional(const Model &m, const Assignment &x, VarId var);

/// Applies the variable action of g: result[g(v)] = x[v].
Assignment apply_to_assignment(const Perm &g, const Assignment &x);

/// Gibbs updates followed by one orbital move x <- g.x with g drawn from
/// `aut_sampler`.
void lifted_mcmc_step(const LiftedModel &lm, ProductReplacement &aut_sampler,
                      ChainState &st, std::size_t gibbs_updates, Rng &rng);

struct ChainSample {
  std::size_t iteration;
  const Assignment &state;
  double log_score;
  bool accepted;
};

struct ChainResult {
  double estimate = 0.0;
  std::size_t samples = 0;
  std::size_t accepted = 0;
  std::size_t steps = 0;
};

/// Runs burn_in + iterations steps, records every thinning-th step after
/// burn-in and estimates P(estimand) from the recorded states.
ChainResult run_chain(const LiftedModel &lm, const ChainConfig &cfg, const Evidence &estimand,
                      const std::function<void(const ChainSample &)> &sink = {});

} // namespace symlift
