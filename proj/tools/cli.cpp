#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "symlift/errors.hpp"
#include "symlift/eval.hpp"
#include "symlift/exact.hpp"
#include "symlift/model_io.hpp"
#include "symlift/sampler.hpp"

namespace symlift::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string exact_decimal(double v) {
  if (std::isinf(v))
    return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes to `path`, or to `fallback` when the path is empty or "-".
void emit(const std::string &path, std::ostream &fallback,
          const std::function<void(std::ostream &)> &write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw ConfigError("cannot open '" + path + "' for writing");
  write(f);
  if (!f)
    throw ConfigError("failed writing '" + path + "'");
}

Model load_model(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw ConfigError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_model(ss.str());
}

std::vector<double> parse_table(const std::string &text, std::size_t expected,
                                const char *name) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw ConfigError(std::string("invalid number in ") + name + ": '" + item + "'");
    }
  }
  if (out.size() != expected)
    throw ConfigError(std::string(name) + " needs " + std::to_string(expected) + " entries");
  return out;
}

struct GenerateArgs {
  std::string family = "pigeonhole";
  std::size_t n = 3;
  std::size_t holes = 2;
  double weight = 2.0;
  std::string pair_table = "1,0,1";
  std::string ev_table = "0,1";
  std::string out;
};

Model make_family(const GenerateArgs &a) {
  if (a.family == "pigeonhole")
    return gen_pigeonhole(a.n, a.holes, a.weight, true);
  if (a.family == "quantum-pigeonhole")
    return gen_pigeonhole(a.n, a.holes, a.weight, false);
  if (a.family == "pairwise")
    return gen_pairwise(a.n, parse_table(a.pair_table, 3, "pair table"),
                        parse_table(a.ev_table, 2, "evidence table"));
  throw ConfigError("unknown family '" + a.family + "'");
}

void add_family_options(CLI::App *cmd, GenerateArgs &a) {
  cmd->add_option("--family", a.family, "pigeonhole, quantum-pigeonhole or pairwise")
      ->capture_default_str();
  cmd->add_option("--holes", a.holes, "holes (pigeonhole families)")->capture_default_str();
  cmd->add_option("--weight", a.weight, "soft clause log-weight (pigeonhole families)")
      ->capture_default_str();
  cmd->add_option("--pair-table", a.pair_table, "pairwise count table t0,t1,t2")
      ->capture_default_str();
  cmd->add_option("--ev-table", a.ev_table, "unary count table t0,t1 on variable 1")
      ->capture_default_str();
}

json model_summary(const std::string &path, const Model &m) {
  json j;
  j["model"] = path;
  j["num_vars"] = m.num_vars();
  j["num_clauses"] = m.clauses().size();
  j["num_factors"] = m.factors().size();
  j["evidence"] = m.evidence().kind == Evidence::Kind::True ? "true" : "cardinality";
  return j;
}

struct ExactArgs {
  std::string model;
  std::string report;
  std::string census;
  unsigned threads = 1;
  bool no_pruning = false;
  bool timings = false;
};

void cmd_exact(const ExactArgs &a, std::ostream &out) {
  const auto t0 = Clock::now();
  const Model m = load_model(a.model);
  const LiftedModel lm(m);
  lm.check_evidence(m.evidence());
  ExactOptions opt;
  opt.threads = a.threads;
  opt.expansion_pruning = !a.no_pruning;
  const auto census = generate_orbits(lm, opt);
  const double log_z = partition_function(census);
  const double p = prob_evidence(lm, census);
  const auto best = mpe(lm, census);

  json report;
  report["command"] = "exact";
  report["inputs"] = model_summary(a.model, m);
  report["inputs"]["threads"] = a.threads;
  report["inputs"]["expansion_pruning"] = !a.no_pruning;
  report["seed"] = nullptr;
  json r;
  r["log_z"] = exact_decimal(log_z);
  r["p_evidence"] = p;
  r["mpe_bits"] = best.state.to_string();
  r["mpe_log_score"] = exact_decimal(best.log_score);
  r["orbit_count"] = census.records.size();
  r["aut_order"] = census.aut_order.str();
  r["certificate_calls"] = census.stats.certificate_calls;
  r["representative_calls"] = census.stats.representative_calls;
  r["expansions"] = census.stats.expansions;
  report["results"] = r;
  if (a.timings)
    report["timings"] = {{"orbit_generation_seconds", census.stats.wall_seconds},
                         {"total_seconds", seconds_since(t0)}};

  if (!a.census.empty())
    emit(a.census, out, [&](std::ostream &os) { write_census_jsonl(os, census); });
  emit(a.report, out, [&](std::ostream &os) { os << report.dump(2) << '\n'; });
}

struct SampleArgs {
  std::string model;
  std::string kind = "orbit-jump";
  std::uint64_t seed = 0;
  std::size_t iterations = 1000;
  std::size_t burn_in = 0;
  std::size_t thinning = 1;
  std::size_t k = 7;
  std::size_t gibbs_updates = 1;
  std::size_t stabilizer_burn_in = 30;
  std::string init;
  std::string samples;
  std::string report;
  bool timings = false;
};

ChainKind parse_kind(const std::string &s) {
  if (s == "orbit-jump")
    return ChainKind::OrbitJump;
  if (s == "lifted")
    return ChainKind::Lifted;
  if (s == "gibbs")
    return ChainKind::Gibbs;
  throw ConfigError("unknown chain kind '" + s + "'");
}

void cmd_sample(const SampleArgs &a, std::ostream &out) {
  const auto t0 = Clock::now();
  const Model m = load_model(a.model);
  const LiftedModel lm(m);
  ChainConfig cfg;
  cfg.kind = parse_kind(a.kind);
  cfg.seed = a.seed;
  cfg.iterations = a.iterations;
  cfg.burn_in = a.burn_in;
  cfg.thinning = a.thinning;
  cfg.burnside_steps = a.k;
  cfg.gibbs_updates_per_orbital_move = a.gibbs_updates;
  cfg.stabilizer_burn_in = a.stabilizer_burn_in;
  if (!a.init.empty()) {
    try {
      cfg.init = Assignment::from_string(a.init);
    } catch (const std::exception &e) {
      throw ConfigError(std::string("invalid --init: ") + e.what());
    }
  }

  std::unique_ptr<std::ofstream> file;
  std::ostream *csv = nullptr;
  if (!a.samples.empty() && a.samples != "-") {
    file = std::make_unique<std::ofstream>(a.samples, std::ios::binary);
    if (!*file)
      throw ConfigError("cannot open '" + a.samples + "' for writing");
    csv = file.get();
  } else if (a.samples == "-") {
    csv = &out;
  }
  if (csv)
    *csv << "iteration,bits,log_score,accepted\n";
  const auto result = run_chain(lm, cfg, m.evidence(), [&](const ChainSample &s) {
    if (csv)
      *csv << s.iteration << ',' << s.state.to_string() << ',' << exact_decimal(s.log_score)
           << ',' << (s.accepted ? 1 : 0) << '\n';
  });
  if (file && !*file)
    throw ConfigError("failed writing '" + a.samples + "'");

  json report;
  report["command"] = "sample";
  report["inputs"] = model_summary(a.model, m);
  report["inputs"]["kind"] = a.kind;
  report["inputs"]["iterations"] = a.iterations;
  report["inputs"]["burn_in"] = a.burn_in;
  report["inputs"]["thinning"] = a.thinning;
  report["inputs"]["burnside_steps"] = a.k;
  report["inputs"]["gibbs_updates_per_orbital_move"] = a.gibbs_updates;
  report["inputs"]["stabilizer_burn_in"] = a.stabilizer_burn_in;
  report["inputs"]["init"] = a.init.empty() ? std::string("all-false") : a.init;
  report["seed"] = std::to_string(a.seed);
  report["results"] = {{"estimate", result.estimate},
                       {"samples", result.samples},
                       {"accepted", result.accepted},
                       {"steps", result.steps}};
  if (a.timings)
    report["timings"] = {{"total_seconds", seconds_since(t0)}};
  emit(a.report, out, [&](std::ostream &os) { os << report.dump(2) << '\n'; });
}

struct TvArgs {
  std::string model;
  std::size_t T = 200;
  std::size_t k = 7;
  std::string out;
};

void cmd_tveval(const TvArgs &a, std::ostream &out) {
  const Model m = load_model(a.model);
  const LiftedModel lm(m);
  const auto table = tv_table(lm, a.T, a.k);
  const auto orbits = brute_orbit_partition(m, lm.generators(), 62).classes.size();
  const std::vector<std::string> meta = {
      "start: all-false; target: model posterior",
      "tv_orbit_jump: Metropolis-Hastings with " + std::to_string(a.k) +
          " collapsed Burnside steps as proposal, one proposal per t",
      "tv_lifted: one random-scan Gibbs site update then a uniform move within the orbit, per t",
      "tv_gibbs: one random-scan Gibbs site update per t",
      "upper_bound: ((N-1)/N)^t with N = " + std::to_string(orbits) + " orbits"};
  emit(a.out, out, [&](std::ostream &os) { write_tv_csv(os, table, meta); });
}

struct BenchArgs {
  GenerateArgs family;
  std::size_t from = 2;
  std::size_t to = 10;
  std::size_t brute_cap = 20;
  unsigned threads = 1;
  std::string out;
};

void cmd_bench(const BenchArgs &a, std::ostream &out) {
  if (a.from < 1 || a.to < a.from)
    throw ConfigError("bench range must satisfy 1 <= from <= to");
  std::ostringstream csv;
  csv << "size,num_vars,wall_seconds,orbit_count,certificate_calls,log_z,brute_seconds,"
         "brute_log_z\n";
  auto flush = [&] {
    emit(a.out, out, [&](std::ostream &os) { os << csv.str(); });
  };
  for (std::size_t n = a.from; n <= a.to; ++n) {
    GenerateArgs g = a.family;
    g.n = n;
    const Model m = make_family(g);
    const auto t0 = Clock::now();
    ExactOptions opt;
    opt.threads = a.threads;
    const auto census = generate_orbits(m, opt);
    const double log_z = partition_function(census);
    const double wall = seconds_since(t0);
    csv << n << ',' << m.num_vars() << ',' << exact_decimal(wall) << ','
        << census.records.size() << ',' << census.stats.certificate_calls << ','
        << exact_decimal(log_z) << ',';
    if (m.num_vars() <= a.brute_cap) {
      const auto b0 = Clock::now();
      const auto bf = brute_force(m, a.brute_cap);
      csv << exact_decimal(seconds_since(b0)) << ',' << exact_decimal(bf.log_z);
    } else {
      csv << ',';
    }
    csv << '\n';
  }
  flush();
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Exact lifted inference and orbit-jump MCMC on symmetric factor graphs",
               "symlift"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto *generate = app.add_subcommand("generate", "write a benchmark model file");
  add_family_options(generate, gen);
  generate->add_option("--n", gen.n, "pigeons, or variables for pairwise")->required();
  generate->add_option("-o,--out", gen.out, "output path (default stdout)");

  ExactArgs ex;
  auto *exact = app.add_subcommand("exact", "orbit census, log Z, P(evidence) and MPE");
  exact->add_option("model", ex.model, "model file")->required();
  exact->add_option("--report", ex.report, "report JSON path (default stdout)");
  exact->add_option("--census", ex.census, "orbit census JSON-lines path");
  exact->add_option("--threads", ex.threads, "frontier worker threads")->capture_default_str();
  exact->add_flag("--no-pruning", ex.no_pruning, "expand every false variable");
  exact->add_flag("--timings", ex.timings, "include wall-clock timings in the report");

  SampleArgs sa;
  auto *sample = app.add_subcommand("sample", "run a Markov chain and estimate P(evidence)");
  sample->add_option("model", sa.model, "model file")->required();
  sample->add_option("--seed", sa.seed, "random seed")->required();
  sample->add_option("--kind", sa.kind, "orbit-jump, lifted or gibbs")->capture_default_str();
  sample->add_option("--iterations", sa.iterations)->capture_default_str();
  sample->add_option("--burn-in", sa.burn_in)->capture_default_str();
  sample->add_option("--thinning", sa.thinning)->capture_default_str();
  sample->add_option("-k,--burnside-steps", sa.k)->capture_default_str();
  sample->add_option("--gibbs-updates", sa.gibbs_updates, "Gibbs updates per orbital move")
      ->capture_default_str();
  sample->add_option("--stabilizer-burn-in", sa.stabilizer_burn_in)->capture_default_str();
  sample->add_option("--init", sa.init, "initial state bits (default all-false)");
  sample->add_option("--samples", sa.samples, "sample CSV path ('-' for stdout)");
  sample->add_option("--report", sa.report, "report JSON path (default stdout)");
  sample->add_flag("--timings", sa.timings, "include wall-clock timings in the report");

  TvArgs tva;
  auto *tveval = app.add_subcommand("tveval", "exact total-variation curves");
  tveval->add_option("model", tva.model, "model file")->required();
  tveval->add_option("-T,--steps", tva.T)->capture_default_str();
  tveval->add_option("-k,--burnside-steps", tva.k)->capture_default_str();
  tveval->add_option("-o,--out", tva.out, "CSV path (default stdout)");

  BenchArgs ba;
  auto *bench = app.add_subcommand("bench", "time exact inference over a size range");
  add_family_options(bench, ba.family);
  bench->add_option("--from", ba.from)->capture_default_str();
  bench->add_option("--to", ba.to)->capture_default_str();
  bench->add_option("--brute-cap", ba.brute_cap, "largest variable count for brute force")
      ->capture_default_str();
  bench->add_option("--threads", ba.threads)->capture_default_str();
  bench->add_option("-o,--out", ba.out, "CSV path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "symlift: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*generate) {
      const auto m = make_family(gen);
      emit(gen.out, out, [&](std::ostream &os) { os << serialize_model(m); });
    } else if (*exact) {
      cmd_exact(ex, out);
    } else if (*sample) {
      cmd_sample(sa, out);
    } else if (*tveval) {
      cmd_tveval(tva, out);
    } else if (*bench) {
      cmd_bench(ba, out);
    }
  } catch (const ParseError &e) {
    err << "symlift: parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const InvariantError &e) {
    err << "symlift: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const CapExceeded &e) {
    err << "symlift: " << e.what() << '\n';
    return kExitCap;
  } catch (const std::exception &e) {
    err << "symlift: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

} // namespace symlift::cli
