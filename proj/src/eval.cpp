#include "symlift/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "symlift/errors.hpp"
#include "symlift/sampler.hpp"

namespace symlift {

namespace {

std::size_t checked_states(std::size_t num_vars, std::size_t cap_vars) {
  if (num_vars > cap_vars || num_vars >= 63)
    throw StateSpaceTooLarge("state space of " + std::to_string(num_vars) +
                             " variables exceeds the enumeration cap");
  return std::size_t{1} << num_vars;
}

std::size_t kernel_states(const Model &m, const KernelCaps &caps) {
  const auto states = checked_states(m.num_vars(), 62);
  if (states > caps.states)
    throw StateSpaceTooLarge("kernel needs " + std::to_string(states) + " states; cap is " +
                             std::to_string(caps.states));
  return states;
}

std::vector<double> all_log_scores(const Model &m, std::size_t states) {
  std::vector<double> s(states);
  for (std::uint64_t i = 0; i < states; ++i)
    s[i] = log_score(m, Assignment::from_index(i, m.num_vars()));
  return s;
}

DenseDistribution posterior_of(const std::vector<double> &scores) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double s : scores)
    hi = std::max(hi, s);
  if (std::isinf(hi))
    throw AllZeroMass("every assignment violates a hard clause");
  DenseDistribution p(static_cast<Eigen::Index>(scores.size()));
  for (std::size_t i = 0; i < scores.size(); ++i)
    p[static_cast<Eigen::Index>(i)] = std::isinf(scores[i]) ? 0.0 : std::exp(scores[i] - hi);
  return p / p.sum();
}

// Variable action of g as a map on state indices: bit g(v) of the image is
// bit v of the source.
std::vector<std::uint32_t> variable_images(const Perm &g, std::size_t num_vars) {
  std::vector<std::uint32_t> img(num_vars);
  for (std::uint32_t v = 0; v < num_vars; ++v) {
    if (g[v] >= num_vars)
      throw InvariantError("permutation maps a variable to a non-variable vertex");
    img[v] = g[v];
  }
  return img;
}

std::uint64_t act(const std::vector<std::uint32_t> &img, std::uint64_t x) {
  std::uint64_t y = 0;
  for (std::size_t v = 0; v < img.size(); ++v)
    if ((x >> v) & 1u)
      y |= std::uint64_t{1} << img[v];
  return y;
}

// Metropolis kernel with proposal rows q and orbit-weighted acceptance.
DenseKernel metropolize(const DenseKernel &q, const std::vector<double> &scores,
                        const OrbitPartition &part) {
  const auto n = q.rows();
  DenseKernel k = DenseKernel::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    if (std::isinf(scores[x])) {
      // Unreachable from feasible starts; treat like the chain would.
      double stay = 1.0;
      for (Eigen::Index y = 0; y < n; ++y)
        if (y != x && !std::isinf(scores[y])) {
          k(x, y) = q(x, y);
          stay -= q(x, y);
        }
      k(x, x) = stay;
      continue;
    }
    const double wx = scores[x] + std::log(double(part.classes[part.class_of[x]].size()));
    double stay = 1.0;
    for (Eigen::Index y = 0; y < n; ++y) {
      if (y == x || q(x, y) == 0.0 || std::isinf(scores[y]))
        continue;
      const double wy = scores[y] + std::log(double(part.classes[part.class_of[y]].size()));
      const double a = wy >= wx ? 1.0 : std::exp(wy - wx);
      k(x, y) = q(x, y) * a;
      stay -= k(x, y);
    }
    k(x, x) = stay;
  }
  return k;
}

} // namespace

BruteForceResult brute_force(const Model &m, std::size_t var_cap) {
  const auto states = checked_states(m.num_vars(), var_cap);
  const auto scores = all_log_scores(m, states);
  BruteForceResult r{0.0, posterior_of(scores), 0.0, Assignment(), -std::numeric_limits<double>::infinity()};

  double hi = -std::numeric_limits<double>::infinity();
  for (double s : scores)
    hi = std::max(hi, s);
  double acc = 0.0, acc_e = 0.0;
  const bool any_evidence = m.evidence().kind != Evidence::Kind::True;
  for (std::uint64_t i = 0; i < states; ++i) {
    if (std::isinf(scores[i]))
      continue;
    const double w = std::exp(scores[i] - hi);
    acc += w;
    const auto x = Assignment::from_index(i, m.num_vars());
    if (any_evidence && !m.evidence().holds(x))
      continue;
    acc_e += w;
    if (scores[i] > r.max_log_score || (scores[i] == r.max_log_score && x < r.argmax)) {
      r.max_log_score = scores[i];
      r.argmax = x;
    }
  }
  r.log_z = hi + std::log(acc);
  r.prob_evidence = acc_e / acc;
  return r;
}

OrbitPartition brute_orbit_partition(const Model &m, const std::vector<Perm> &gens,
                                     std::size_t var_cap) {
  const auto states = checked_states(m.num_vars(), var_cap);
  std::vector<std::uint64_t> parent(states);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&parent](std::uint64_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto &g : gens) {
    const auto img = variable_images(g, m.num_vars());
    for (std::uint64_t x = 0; x < states; ++x) {
      const auto a = find(x), b = find(act(img, x));
      if (a != b)
        parent[std::max(a, b)] = std::min(a, b);
    }
  }
  OrbitPartition p;
  p.class_of.assign(states, 0);
  std::vector<std::int64_t> index_of_root(states, -1);
  for (std::uint64_t x = 0; x < states; ++x) {
    const auto r = find(x);
    if (index_of_root[r] < 0) {
      index_of_root[r] = static_cast<std::int64_t>(p.classes.size());
      p.classes.emplace_back();
    }
    p.class_of[x] = static_cast<std::uint32_t>(index_of_root[r]);
    p.classes[index_of_root[r]].push_back(x);
  }
  return p;
}

DenseDistribution uniform_orbit_distribution(const OrbitPartition &p) {
  DenseDistribution d(static_cast<Eigen::Index>(p.class_of.size()));
  const double k = static_cast<double>(p.classes.size());
  for (std::size_t x = 0; x < p.class_of.size(); ++x)
    d[static_cast<Eigen::Index>(x)] = 1.0 / (k * double(p.classes[p.class_of[x]].size()));
  return d;
}

DenseKernel kernel_burnside(const LiftedModel &lm, std::size_t k, const KernelCaps &caps) {
  const auto &m = lm.model();
  const auto states = kernel_states(m, caps);
  const auto n = static_cast<Eigen::Index>(states);

  // Distinct variable actions with multiplicities.
  std::map<std::vector<std::uint32_t>, std::uint64_t> actions;
  for (const auto &g : lm.aut().elements(BigInt(caps.group_elements)))
    ++actions[variable_images(g, m.num_vars())];

  DenseKernel b = DenseKernel::Zero(n, n);
  std::vector<double> stab(states, 0.0);
  std::vector<std::uint64_t> fixed;
  for (const auto &[img, mult] : actions) {
    // fix(g): states constant on every cycle of g.
    std::vector<std::uint64_t> cycle_masks;
    std::vector<std::uint8_t> seen(img.size(), 0);
    for (std::uint32_t v = 0; v < img.size(); ++v) {
      if (seen[v])
        continue;
      std::uint64_t mask = 0;
      for (auto u = v; !seen[u]; u = img[u]) {
        seen[u] = 1;
        mask |= std::uint64_t{1} << u;
      }
      cycle_masks.push_back(mask);
    }
    fixed.clear();
    for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << cycle_masks.size()); ++sel) {
      std::uint64_t x = 0;
      for (std::size_t c = 0; c < cycle_masks.size(); ++c)
        if ((sel >> c) & 1u)
          x |= cycle_masks[c];
      fixed.push_back(x);
    }
    const double w = double(mult) / double(fixed.size());
    for (auto x : fixed) {
      stab[x] += double(mult);
      for (auto y : fixed)
        b(Eigen::Index(x), Eigen::Index(y)) += w;
    }
  }
  for (Eigen::Index x = 0; x < n; ++x)
    b.row(x) /= stab[x];

  DenseKernel out = DenseKernel::Identity(n, n);
  for (std::size_t i = 0; i < k; ++i)
    out = out * b;
  return out;
}

DenseKernel kernel_orbit_jump(const LiftedModel &lm, Proposal proposal, const KernelCaps &caps) {
  const auto &m = lm.model();
  const auto states = kernel_states(m, caps);
  const auto n = static_cast<Eigen::Index>(states);
  const auto part = brute_orbit_partition(m, lm.generators(), 62);
  const auto scores = all_log_scores(m, states);

  DenseKernel q;
  if (proposal.kind == Proposal::Kind::Exact) {
    const DenseDistribution u = uniform_orbit_distribution(part);
    q = DenseKernel(n, n);
    for (Eigen::Index x = 0; x < n; ++x)
      q.row(x) = u.transpose();
  } else {
    if (proposal.k < 1)
      throw ConfigError("Burnside proposal needs at least one step");
    q = kernel_burnside(lm, proposal.k, caps);
  }
  return metropolize(q, scores, part);
}

DenseKernel kernel_gibbs(const Model &m, const KernelCaps &caps) {
  const auto states = kernel_states(m, caps);
  const auto n = static_cast<Eigen::Index>(states);
  const auto scores = all_log_scores(m, states);
  const double pick = 1.0 / double(m.num_vars());
  DenseKernel k = DenseKernel::Zero(n, n);
  for (std::uint64_t x = 0; x < states; ++x) {
    const auto ix = static_cast<Eigen::Index>(x);
    if (std::isinf(scores[x])) {
      k(ix, ix) = 1.0;
      continue;
    }
    const auto a = Assignment::from_index(x, m.num_vars());
    double stay = 1.0;
    for (VarId v = 0; v < m.num_vars(); ++v) {
      const double p1 = gibbs_conditional(m, a, v);
      const double p_flip = a[v] ? 1.0 - p1 : p1;
      const auto iy = static_cast<Eigen::Index>(x ^ (std::uint64_t{1} << v));
      k(ix, iy) += pick * p_flip;
      stay -= pick * p_flip;
    }
    k(ix, ix) += stay;
  }
  return k;
}

DenseKernel kernel_lifted(const LiftedModel &lm, const KernelCaps &caps) {
  const auto &m = lm.model();
  const auto states = kernel_states(m, caps);
  const auto n = static_cast<Eigen::Index>(states);
  const auto part = brute_orbit_partition(m, lm.generators(), 62);
  DenseKernel orbital = DenseKernel::Zero(n, n);
  for (const auto &cls : part.classes) {
    const double w = 1.0 / double(cls.size());
    for (auto x : cls)
      for (auto y : cls)
        orbital(Eigen::Index(x), Eigen::Index(y)) = w;
  }
  return kernel_gibbs(m, caps) * orbital;
}

DenseDistribution stationary_distribution(const DenseKernel &k, double tol,
                                          std::size_t max_iterations) {
  DenseDistribution mu = DenseDistribution::Constant(k.rows(), 1.0 / double(k.rows()));
  for (std::size_t i = 0; i < max_iterations; ++i) {
    DenseDistribution next = (mu.transpose() * k).transpose();
    next /= next.sum();
    const double delta = (next - mu).lpNorm<1>();
    mu = std::move(next);
    if (delta < tol)
      break;
  }
  return mu;
}

double tv(const DenseDistribution &mu, const DenseDistribution &nu) {
  if (mu.size() != nu.size())
    throw StructuralError("distributions have different lengths");
  return 0.5 * (mu - nu).lpNorm<1>();
}

std::vector<double> tv_curve(const DenseKernel &k, std::uint64_t start,
                             const DenseDistribution &target, std::size_t T) {
  if (static_cast<Eigen::Index>(start) >= k.rows())
    throw StructuralError("start state out of range");
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(k.rows());
  mu[static_cast<Eigen::Index>(start)] = 1.0;
  std::vector<double> out;
  out.reserve(T + 1);
  for (std::size_t t = 0; t <= T; ++t) {
    out.push_back(tv(mu.transpose(), target));
    if (t < T)
      mu = mu * k;
  }
  return out;
}

double mixing_upper_bound(std::size_t num_orbits, std::size_t t) {
  if (num_orbits < 1)
    throw ConfigError("orbit count must be positive");
  if (num_orbits == 1)
    return 0.0;
  const double r = double(num_orbits - 1) / double(num_orbits);
  return std::pow(r, double(t));
}

std::size_t steps_for_epsilon(std::size_t num_orbits, double epsilon) {
  if (num_orbits < 1)
    throw ConfigError("orbit count must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("epsilon must lie in (0, 1)");
  return static_cast<std::size_t>(std::ceil(std::log(1.0 / epsilon) * double(num_orbits)));
}

TvTable tv_table(const LiftedModel &lm, std::size_t T, std::size_t k, const KernelCaps &caps) {
  const auto &m = lm.model();
  const auto target = brute_force(m, 62).posterior;
  const auto part = brute_orbit_partition(m, lm.generators(), 62);
  TvTable table;
  table.orbit_jump = tv_curve(kernel_orbit_jump(lm, Proposal::burnside(k), caps), 0, target, T);
  table.lifted = tv_curve(kernel_lifted(lm, caps), 0, target, T);
  table.gibbs = tv_curve(kernel_gibbs(m, caps), 0, target, T);
  for (std::size_t t = 0; t <= T; ++t)
    table.upper_bound.push_back(mixing_upper_bound(part.classes.size(), t));
  return table;
}

void write_tv_csv(std::ostream &os, const TvTable &table, const std::vector<std::string> &metadata) {
  for (const auto &line : metadata)
    os << "# " << line << '\n';
  os << "t,tv_orbit_jump,tv_lifted,tv_gibbs,upper_bound\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t t = 0; t < table.orbit_jump.size(); ++t) {
    os << t << ',';
    put(table.orbit_jump[t]);
    os << ',';
    put(table.lifted[t]);
    os << ',';
    put(table.gibbs[t]);
    os << ',';
    put(table.upper_bound[t]);
    os << '\n';
  }
}

} // namespace symlift
