#include "symlift/canon.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "symlift/errors.hpp"

namespace symlift {

namespace {

std::uint64_t splitmix(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ull;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
  return v ^ (v >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  return splitmix(h ^ splitmix(v));
}

struct UnionFind {
  explicit UnionFind(std::size_t n = 0) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  void reset() { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b)
      parent[std::max(a, b)] = std::min(a, b);
  }
  void unite_perm(const Perm &g) {
    for (std::uint32_t i = 0; i < g.degree(); ++i)
      if (g[i] != i)
        unite(i, g[i]);
  }
  std::vector<std::uint32_t> parent;
};

// Ordered partition stored as contiguous cells of `lab`.
struct CellPartition {
  std::vector<std::uint32_t> lab;      // position -> vertex
  std::vector<std::uint32_t> pos;      // vertex -> position
  std::vector<std::uint32_t> cell_of;  // vertex -> start of its cell
  std::vector<std::uint32_t> cell_end; // cell start -> one past its end
  std::uint32_t num_cells = 0;

  std::uint32_t size() const { return static_cast<std::uint32_t>(lab.size()); }
  bool discrete() const { return num_cells == lab.size(); }

  std::vector<std::uint32_t> cell_starts() const {
    std::vector<std::uint32_t> s;
    for (std::uint32_t c = 0; c < size(); c = cell_end[c])
      s.push_back(c);
    return s;
  }
};

CellPartition from_partition(const Partition &p, std::uint32_t n) {
  CellPartition cp;
  cp.lab.reserve(n);
  cp.pos.assign(n, 0);
  cp.cell_of.assign(n, 0);
  cp.cell_end.assign(n, 0);
  std::vector<std::uint8_t> hit(n, 0);
  for (const auto &cell : p.cells) {
    if (cell.empty())
      throw StructuralError("partition cells must be non-empty");
    const auto start = static_cast<std::uint32_t>(cp.lab.size());
    for (auto v : cell) {
      if (v >= n || hit[v])
        throw StructuralError("partition must cover each vertex exactly once");
      hit[v] = 1;
      cp.pos[v] = static_cast<std::uint32_t>(cp.lab.size());
      cp.cell_of[v] = start;
      cp.lab.push_back(v);
    }
    cp.cell_end[start] = static_cast<std::uint32_t>(cp.lab.size());
    ++cp.num_cells;
  }
  if (cp.lab.size() != n)
    throw StructuralError("partition must cover each vertex exactly once");
  return cp;
}

Partition to_partition(const CellPartition &cp) {
  Partition p;
  for (auto c : cp.cell_starts())
    p.cells.emplace_back(cp.lab.begin() + c, cp.lab.begin() + cp.cell_end[c]);
  return p;
}

// Equitable refinement with a splitter queue. Every decision depends only
// on cell positions and neighbor counts, so the result commutes with
// vertex relabeling; the returned trace hash is an isomorphism invariant.
class Refiner {
public:
  explicit Refiner(const ColoredGraph &g)
      : g_(g), count_(g.num_vertices(), 0), touched_in_cell_(g.num_vertices(), 0),
        in_queue_(g.num_vertices(), 0) {}

  std::uint64_t refine(CellPartition &p, const std::vector<std::uint32_t> &initial) {
    std::uint64_t trace = 0x243f6a8885a308d3ull;
    queue_.clear();
    for (auto c : initial) {
      queue_.push_back(c);
      in_queue_[c] = 1;
    }
    std::size_t head = 0;
    while (head < queue_.size() && !p.discrete()) {
      const auto w_start = queue_[head++];
      in_queue_[w_start] = 0;
      splitter_.assign(p.lab.begin() + w_start,
                       p.lab.begin() + p.cell_end[w_start]);
      trace = mix(trace, w_start);

      for (auto w : splitter_) {
        for (auto u : g_.neighbors(w)) {
          if (count_[u]++ != 0)
            continue;
          touched_.push_back(u);
          const auto c = p.cell_of[u];
          const auto cend = p.cell_end[c];
          if (cend - c == 1)
            continue;
          if (touched_in_cell_[c] == 0)
            touched_cells_.push_back(c);
          const auto target = cend - 1 - touched_in_cell_[c];
          const auto other = p.lab[target];
          const auto from = p.pos[u];
          p.lab[from] = other;
          p.pos[other] = from;
          p.lab[target] = u;
          p.pos[u] = target;
          ++touched_in_cell_[c];
        }
      }

      std::sort(touched_cells_.begin(), touched_cells_.end());
      for (auto c : touched_cells_)
        trace = split_cell(p, c, trace);

      for (auto u : touched_)
        count_[u] = 0;
      touched_.clear();
      touched_cells_.clear();
    }
    for (; head < queue_.size(); ++head)
      in_queue_[queue_[head]] = 0;
    return mix(trace, p.num_cells);
  }

private:
  std::uint64_t split_cell(CellPartition &p, std::uint32_t c, std::uint64_t trace) {
    const auto cend = p.cell_end[c];
    const auto seg = cend - touched_in_cell_[c];
    touched_in_cell_[c] = 0;
    auto *lab = p.lab.data();
    std::sort(lab + seg, lab + cend, [this](std::uint32_t a, std::uint32_t b) {
      return count_[a] < count_[b];
    });

    frags_.clear();
    if (seg > c)
      frags_.push_back(c);
    for (auto i = seg; i < cend; ++i)
      if (i == seg || count_[lab[i]] != count_[lab[i - 1]])
        frags_.push_back(i);

    if (frags_.size() == 1) {
      for (auto i = seg; i < cend; ++i)
        p.pos[lab[i]] = i;
      return trace;
    }

    trace = mix(trace, c);
    trace = mix(trace, frags_.size());
    std::uint32_t largest = 0, largest_size = 0;
    for (std::size_t f = 0; f < frags_.size(); ++f) {
      const auto fs = frags_[f];
      const auto fe = f + 1 < frags_.size() ? frags_[f + 1] : cend;
      const std::uint32_t cnt = fs < seg ? 0 : count_[lab[fs]];
      trace = mix(trace, (static_cast<std::uint64_t>(cnt) << 32) | (fe - fs));
      p.cell_end[fs] = fe;
      if (fs >= seg) {
        for (auto i = fs; i < fe; ++i) {
          p.pos[lab[i]] = i;
          p.cell_of[lab[i]] = fs;
        }
      }
      if (fe - fs > largest_size) {
        largest_size = fe - fs;
        largest = static_cast<std::uint32_t>(f);
      }
    }
    p.num_cells += static_cast<std::uint32_t>(frags_.size()) - 1;

    const bool was_queued = in_queue_[c] != 0;
    for (std::size_t f = 0; f < frags_.size(); ++f) {
      const auto fs = frags_[f];
      if (was_queued ? fs == c : f == largest)
        continue;
      if (!in_queue_[fs]) {
        in_queue_[fs] = 1;
        queue_.push_back(fs);
      }
    }
    return trace;
  }

  const ColoredGraph &g_;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint32_t> touched_in_cell_;
  std::vector<std::uint8_t> in_queue_;
  std::vector<std::uint32_t> queue_;
  std::vector<std::uint32_t> splitter_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::uint32_t> touched_cells_;
  std::vector<std::uint32_t> frags_;
};

std::uint64_t individualize(Refiner &refiner, CellPartition &p, std::uint32_t v) {
  const auto c = p.cell_of[v];
  const auto cend = p.cell_end[c];
  const auto from = p.pos[v];
  const auto other = p.lab[c];
  p.lab[from] = other;
  p.pos[other] = from;
  p.lab[c] = v;
  p.pos[v] = c;
  p.cell_end[c] = c + 1;
  p.cell_end[c + 1] = cend;
  for (auto i = c + 1; i < cend; ++i)
    p.cell_of[p.lab[i]] = c + 1;
  ++p.num_cells;
  return mix(refiner.refine(p, {c}), c);
}

// First smallest non-singleton cell.
std::uint32_t target_cell(const CellPartition &p) {
  std::uint32_t best = p.size(), best_size = p.size() + 1;
  for (std::uint32_t c = 0; c < p.size(); c = p.cell_end[c]) {
    const auto sz = p.cell_end[c] - c;
    if (sz > 1 && sz < best_size) {
      best = c;
      best_size = sz;
      if (sz == 2)
        break;
    }
  }
  return best;
}

void build_certificate(const ColoredGraph &g, const std::vector<std::uint32_t> &lab,
                       const std::vector<std::uint32_t> &pos,
                       std::vector<std::uint8_t> &out) {
  const std::uint64_t n = lab.size();
  const std::uint64_t header = 4 + 4 * n;
  const std::uint64_t nbits = n * (n - (n > 0 ? 1 : 0)) / 2;
  out.assign(header + (nbits + 7) / 8, 0);
  auto put32 = [&out](std::size_t at, std::uint32_t v) {
    out[at] = static_cast<std::uint8_t>(v >> 24);
    out[at + 1] = static_cast<std::uint8_t>(v >> 16);
    out[at + 2] = static_cast<std::uint8_t>(v >> 8);
    out[at + 3] = static_cast<std::uint8_t>(v);
  };
  put32(0, static_cast<std::uint32_t>(n));
  for (std::uint64_t i = 0; i < n; ++i)
    put32(4 + 4 * i, g.color(lab[i]));
  std::uint8_t *bits = out.data() + header;
  for (std::uint32_t u = 0; u < n; ++u) {
    const std::uint64_t i = pos[u];
    for (auto v : g.neighbors(u)) {
      const std::uint64_t j = pos[v];
      if (i >= j)
        continue;
      const std::uint64_t k = i * (2 * n - i - 1) / 2 + (j - i - 1);
      bits[k >> 3] |= static_cast<std::uint8_t>(0x80u >> (k & 7));
    }
  }
}

int compare_bytes(const std::vector<std::uint8_t> &a, const std::vector<std::uint8_t> &b) {
  if (a.size() != b.size())
    return a.size() < b.size() ? -1 : 1;
  const int r = std::memcmp(a.data(), b.data(), a.size());
  return r < 0 ? -1 : (r > 0 ? 1 : 0);
}

std::size_t common_prefix(const std::vector<std::uint32_t> &a,
                          const std::vector<std::uint32_t> &b) {
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[k] == b[k])
    ++k;
  return k;
}

// Individualization-refinement search. Leaves are ordered by the sequence of
// refinement traces along their path, then by certificate bytes; the
// canonical leaf is the minimum. Automorphisms are collected whenever a leaf
// reproduces the first or the best leaf.
class Search {
public:
  Search(const ColoredGraph &g, const CanonOptions &opt)
      : g_(g), opt_(opt), refiner_(g), n_(g.num_vertices()) {}

  AutResult run() {
    AutResult result;
    if (n_ == 0) {
      result.canonical_labeling = Perm(0);
      build_certificate(g_, {}, {}, result.certificate.bytes);
      return result;
    }

    CellPartition root = from_partition(Partition::by_color(g_), n_);
    cur_traces_.push_back(refiner_.refine(root, root.cell_starts()));
    ++stats_.nodes;

    CellPartition p = root;
    while (!p.discrete()) {
      const auto c = target_cell(p);
      const auto v = p.lab[c];
      first_nodes_.push_back(p);
      first_path_.push_back(v);
      cur_path_.push_back(v);
      cur_traces_.push_back(individualize(refiner_, p, v));
      ++stats_.nodes;
    }
    ++stats_.leaves;
    first_lab_ = p.lab;
    build_certificate(g_, p.lab, p.pos, first_cert_);
    first_traces_ = cur_traces_;
    best_lab_ = first_lab_;
    best_cert_ = first_cert_;
    best_traces_ = first_traces_;
    best_path_ = first_path_;

    const auto depth = first_nodes_.size();
    level_orbits_.assign(depth, UnionFind(n_));

    for (std::size_t d = depth; d-- > 0;) {
      const auto c = target_cell(first_nodes_[d]);
      const std::vector<std::uint32_t> cell(
          first_nodes_[d].lab.begin() + c,
          first_nodes_[d].lab.begin() + first_nodes_[d].cell_end[c]);
      std::vector<std::uint32_t> explored{first_path_[d]};
      for (auto w : cell) {
        if (w == first_path_[d])
          continue;
        if (opt_.automorphism_pruning && in_explored_orbit(level_orbits_[d], explored, w))
          continue;
        explored.push_back(w);

        cur_path_.assign(first_path_.begin(), first_path_.begin() + d);
        cur_path_.push_back(w);
        cur_traces_.assign(first_traces_.begin(), first_traces_.begin() + d + 1);
        CellPartition child = first_nodes_[d];
        cur_traces_.push_back(individualize(refiner_, child, w));
        explore(child, d + 1);
      }
    }

    result.generators = std::move(gens_);
    result.certificate.bytes = std::move(best_cert_);
    std::vector<std::uint32_t> labeling(n_);
    for (std::uint32_t i = 0; i < n_; ++i)
      labeling[best_lab_[i]] = i;
    result.canonical_labeling = Perm(std::move(labeling));
    result.stats = stats_;
    return result;
  }

private:
  static bool in_explored_orbit(UnionFind &uf, const std::vector<std::uint32_t> &explored,
                                std::uint32_t w) {
    const auto rw = uf.find(w);
    for (auto u : explored)
      if (uf.find(u) == rw)
        return true;
    return false;
  }

  // Lexicographic comparison of the current trace sequence with `other`,
  // restricted to the current length.
  int compare_traces(const std::vector<std::uint64_t> &other) const {
    for (std::size_t i = 0; i < cur_traces_.size(); ++i) {
      if (i >= other.size())
        return 1;
      if (cur_traces_[i] != other[i])
        return cur_traces_[i] < other[i] ? -1 : 1;
    }
    return 0;
  }

  // Returns the depth of the node that should continue with its remaining
  // children; deeper frames unwind.
  std::ptrdiff_t explore(CellPartition &p, std::size_t depth) {
    ++stats_.nodes;
    const bool eq_first = compare_traces(first_traces_) == 0;
    const int cmp_best = compare_traces(best_traces_);
    const auto parent = static_cast<std::ptrdiff_t>(depth) - 1;
    if (!eq_first && cmp_best > 0)
      return parent;
    if (p.discrete())
      return process_leaf(p, cmp_best);

    const auto c = target_cell(p);
    const std::vector<std::uint32_t> cell(p.lab.begin() + c, p.lab.begin() + p.cell_end[c]);
    std::vector<std::uint32_t> explored;
    UnionFind orbits;
    std::size_t orbits_built_for = static_cast<std::size_t>(-1);

    for (auto w : cell) {
      if (opt_.automorphism_pruning && !explored.empty()) {
        if (orbits_built_for != gens_.size()) {
          orbits = stabilizer_orbits(cur_path_);
          orbits_built_for = gens_.size();
        }
        if (in_explored_orbit(orbits, explored, w))
          continue;
      }
      explored.push_back(w);
      CellPartition child = p;
      cur_path_.push_back(w);
      cur_traces_.push_back(individualize(refiner_, child, w));
      const auto r = explore(child, depth + 1);
      cur_path_.pop_back();
      cur_traces_.pop_back();
      if (r < static_cast<std::ptrdiff_t>(depth))
        return r;
    }
    return parent;
  }

  std::ptrdiff_t process_leaf(const CellPartition &p, int cmp_best) {
    ++stats_.leaves;
    const auto parent = static_cast<std::ptrdiff_t>(cur_path_.size()) - 1;
    build_certificate(g_, p.lab, p.pos, leaf_cert_);

    if (leaf_cert_ == first_cert_) {
      add_automorphism(p.lab, first_lab_);
      if (!opt_.automorphism_pruning)
        return parent;
      return static_cast<std::ptrdiff_t>(common_prefix(cur_path_, first_path_));
    }
    if (cmp_best == 0)
      cmp_best = compare_bytes(leaf_cert_, best_cert_);
    if (cmp_best < 0) {
      best_lab_ = p.lab;
      best_cert_ = leaf_cert_;
      best_traces_ = cur_traces_;
      best_path_ = cur_path_;
      return parent;
    }
    if (cmp_best == 0) {
      add_automorphism(p.lab, best_lab_);
      if (!opt_.automorphism_pruning)
        return parent;
      return static_cast<std::ptrdiff_t>(common_prefix(cur_path_, best_path_));
    }
    return parent;
  }

  // Records the automorphism mapping from[i] -> to[i].
  void add_automorphism(const std::vector<std::uint32_t> &from,
                        const std::vector<std::uint32_t> &to) {
    std::vector<std::uint32_t> images(n_);
    for (std::uint32_t i = 0; i < n_; ++i)
      images[from[i]] = to[i];
    Perm g(std::move(images));
    if (g.is_identity())
      return;
    for (std::size_t d = 0; d < level_orbits_.size(); ++d) {
      level_orbits_[d].unite_perm(g);
      if (g[first_path_[d]] != first_path_[d])
        break;
    }
    gens_.push_back(std::move(g));
  }

  UnionFind stabilizer_orbits(const std::vector<std::uint32_t> &fixed) const {
    UnionFind uf(n_);
    for (const auto &g : gens_) {
      bool fixes = true;
      for (auto v : fixed)
        if (g[v] != v) {
          fixes = false;
          break;
        }
      if (fixes)
        uf.unite_perm(g);
    }
    return uf;
  }

  const ColoredGraph &g_;
  CanonOptions opt_;
  Refiner refiner_;
  std::uint32_t n_;
  CanonStats stats_;

  std::vector<CellPartition> first_nodes_;
  std::vector<std::uint32_t> first_path_;
  std::vector<std::uint64_t> first_traces_;
  std::vector<std::uint32_t> first_lab_;
  std::vector<std::uint8_t> first_cert_;

  std::vector<std::uint32_t> best_path_;
  std::vector<std::uint64_t> best_traces_;
  std::vector<std::uint32_t> best_lab_;
  std::vector<std::uint8_t> best_cert_;

  std::vector<std::uint32_t> cur_path_;
  std::vector<std::uint64_t> cur_traces_;
  std::vector<std::uint8_t> leaf_cert_;

  std::vector<Perm> gens_;
  std::vector<UnionFind> level_orbits_;
};

} // namespace

Partition Partition::by_color(const ColoredGraph &g) {
  Partition p;
  std::vector<std::vector<std::uint32_t>> by(g.num_colors());
  for (std::uint32_t v = 0; v < g.num_vertices(); ++v)
    by[g.color(v)].push_back(v);
  for (auto &cell : by)
    if (!cell.empty())
      p.cells.push_back(std::move(cell));
  return p;
}

Partition refine(const ColoredGraph &g, const Partition &p) {
  CellPartition cp = from_partition(p, g.num_vertices());
  Refiner r(g);
  r.refine(cp, cp.cell_starts());
  return to_partition(cp);
}

std::size_t CertificateHash::operator()(const Certificate &c) const noexcept {
  std::uint64_t h = 0x51ed270b27f3c1a5ull;
  std::size_t i = 0;
  for (; i + 8 <= c.bytes.size(); i += 8) {
    std::uint64_t w;
    std::memcpy(&w, c.bytes.data() + i, 8);
    h = mix(h, w);
  }
  for (; i < c.bytes.size(); ++i)
    h = mix(h, c.bytes[i]);
  return static_cast<std::size_t>(h);
}

AutResult canonical_form(const ColoredGraph &g, const CanonOptions &opt) {
  return Search(g, opt).run();
}

ModelCanonizer::ModelCanonizer(const Model &m, CanonOptions opt)
    : model_(m), induced_(induce(m)), opt_(opt),
      base_(canonical_form(induced_.graph, opt)),
      base_inverse_(base_.canonical_labeling.inverse()) {}

AutResult ModelCanonizer::canonize(const Assignment &x) const {
  return canonical_form(encode_assignment(model_, induced_.graph, x), opt_);
}

Assignment ModelCanonizer::representative(const Assignment &x,
                                          const AutResult &encoded) const {
  if (x.size() != model_.num_vars())
    throw StructuralError("assignment length does not match the model");
  // The canonical encoded graph with the assignment colors merged back is a
  // relabeled copy of the induced graph; canonizing it yields a canonical
  // isomorphism back onto the induced graph.
  const auto &lab = encoded.canonical_labeling;
  const ColoredGraph relabeled = induced_.graph.relabeled(lab.images());
  const AutResult back = canonical_form(relabeled, opt_);
  if (back.certificate != base_.certificate)
    throw InvariantError("canonical relabeling is not isomorphic to the model graph");

  const auto num_vars = static_cast<std::uint32_t>(model_.num_vars());
  Assignment y(num_vars);
  for (std::uint32_t v = 0; v < num_vars; ++v) {
    const auto target = base_inverse_[back.canonical_labeling[lab[v]]];
    if (target >= num_vars)
      throw InvariantError("canonical map sends a variable to a non-variable");
    y.set(target, x[v]);
  }
  return y;
}

Assignment ModelCanonizer::canonical_assignment(const Assignment &x) const {
  return representative(x, canonize(x));
}

Assignment canonical_assignment(const Model &m, const Assignment &x) {
  return ModelCanonizer(m).canonical_assignment(x);
}

} // namespace symlift
