#pragma once

// Brute-force ground truth and dense transition kernels over the full state
// space. States are indexed by Assignment::to_index().

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symlift/exact.hpp"

namespace symlift {

using DenseDistribution = Eigen::VectorXd;
using DenseKernel = Eigen::MatrixXd;

inline constexpr std::size_t kBruteForceVarCap = 20;
inline constexpr std::size_t kKernelStateCap = std::size_t{1} << 12;
inline constexpr std::size_t kGroupElementCap = 200000;

struct BruteForceResult {
  double log_z;
  DenseDistribution posterior;
  /// P(model evidence).
  double prob_evidence;
  /// Best evidence-satisfying state; ties go to the smallest bit string.
  Assignment argmax;
  double max_log_score;
};

BruteForceResult brute_force(const Model &m, std::size_t var_cap = kBruteForceVarCap);

struct OrbitPartition {
  std::vector<std::uint32_t> class_of;            // state -> class
  std::vector<std::vector<std::uint64_t>> classes; // sorted, by smallest member
};

/// Closure of every state under the variable action of `gens`.
OrbitPartition brute_orbit_partition(const Model &m, const std::vector<Perm> &gens,
                                     std::size_t var_cap = kBruteForceVarCap);

DenseDistribution uniform_orbit_distribution(const OrbitPartition &p);

struct KernelCaps {
  std::size_t states = kKernelStateCap;
  std::size_t group_elements = kGroupElementCap;
};

/// Collapsed Burnside kernel raised to the k-th power.
DenseKernel kernel_burnside(const LiftedModel &lm, std::size_t k, const KernelCaps &caps = {});

struct Proposal {
  enum class Kind { Exact, Burnside };
  Kind kind = Kind::Exact;
  std::size_t k = 7;

  static Proposal exact() { return {Kind::Exact, 0}; }
  static Proposal burnside(std::size_t k) { return {Kind::Burnside, k}; }
};

DenseKernel kernel_orbit_jump(const LiftedModel &lm, Proposal proposal,
                              const KernelCaps &caps = {});
/// Random-scan single-site Gibbs; rows of zero-probability states are
/// self-loops.
DenseKernel kernel_gibbs(const Model &m, const KernelCaps &caps = {});
/// One Gibbs step followed by a uniform move within the current orbit.
DenseKernel kernel_lifted(const LiftedModel &lm, const KernelCaps &caps = {});

/// Fixed point of mu -> mu K from the uniform distribution.
DenseDistribution stationary_distribution(const DenseKernel &k, double tol = 1e-15,
                                          std::size_t max_iterations = 1000000);

double tv(const DenseDistribution &mu, const DenseDistribution &nu);

/// tv(delta_start K^t, target) for t = 0..T.
std::vector<double> tv_curve(const DenseKernel &k, std::uint64_t start,
                             const DenseDistribution &target, std::size_t T);

double mixing_upper_bound(std::size_t num_orbits, std::size_t t);
std::size_t steps_for_epsilon(std::size_t num_orbits, double epsilon);

struct TvTable {
  std::vector<double> orbit_jump;
  std::vector<double> lifted;
  std::vector<double> gibbs;
  std::vector<double> upper_bound;
};

/// All curves from the all-false state against the model posterior.
TvTable tv_table(const LiftedModel &lm, std::size_t T, std::size_t k,
                 const KernelCaps &caps = {});

/// CSV columns t,tv_orbit_jump,tv_lifted,tv_gibbs,upper_bound, preceded by
/// '#' comment lines carrying `metadata`.
void write_tv_csv(std::ostream &os, const TvTable &table,
                  const std::vector<std::string> &metadata = {});

} // namespace symlift
