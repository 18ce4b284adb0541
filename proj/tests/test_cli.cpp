#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace symlift;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("symlift_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string &name) const { return (path / name).string(); }
};

void write(const std::string &path, const std::string &text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
}

} // namespace

TEST_CASE("generate then exact on pigeonhole(3,2)") {
  TempDir dir;
  const auto model = dir / "ph.model";
  CHECK(run_cli({"generate", "--family", "pigeonhole", "--n", "3", "-o", model}).code == 0);
  const auto census = dir / "census.jsonl";
  const auto r = run_cli({"exact", model, "--census", census});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["command"] == "exact");
  CHECK(j["results"]["p_evidence"].get<double>() == 1.0);
  CHECK(j["results"]["orbit_count"].get<int>() == 13);
  CHECK(j["results"]["aut_order"] == "12");
  CHECK(j["results"]["mpe_bits"] == "000000");
  CHECK(j["results"]["mpe_log_score"] == "12");
  CHECK(std::stod(j["results"]["log_z"].get<std::string>()) ==
        doctest::Approx(14.683004554587528).epsilon(1e-14));
  CHECK_FALSE(j.contains("timings"));
  std::istringstream lines(slurp(census));
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line))
    ++count;
  CHECK(count == 13);

  const auto t = run_cli({"exact", model, "--timings"});
  CHECK(nlohmann::json::parse(t.out).contains("timings"));
}

TEST_CASE("exact and sample are byte-identical on rerun") {
  TempDir dir;
  const auto model = dir / "q.model";
  CHECK(run_cli({"generate", "--family", "quantum-pigeonhole", "--n", "4", "-o", model}).code ==
        0);
  CHECK(run_cli({"exact", model}).out == run_cli({"exact", model}).out);
  for (const char *kind : {"orbit-jump", "lifted", "gibbs"}) {
    const std::vector<std::string> args{"sample",  model,      "--seed", "17",     "--kind",
                                        kind,      "--iterations", "300", "--samples", "-"};
    const auto a = run_cli(args), b = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("iteration,bits,log_score,accepted\n", 0) == 0);
  }
}

TEST_CASE("sample report") {
  TempDir dir;
  const auto model = dir / "u.model";
  write(model, "vars 1\nclause 0.6931471805599453 1\nevidence card eq 1 1\n");
  const auto r = run_cli({"sample", model, "--seed", "3", "--kind", "gibbs", "--iterations",
                          "20000", "--burn-in", "100"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["seed"] == "3");
  CHECK(j["results"]["samples"].get<int>() == 20000);
  CHECK(j["results"]["estimate"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(0.03));
}

TEST_CASE("tveval and bench outputs") {
  TempDir dir;
  const auto model = dir / "ph.model";
  run_cli({"generate", "--n", "3", "-o", model});
  const auto tv = run_cli({"tveval", model, "-T", "5", "-k", "2"});
  REQUIRE(tv.code == 0);
  CHECK(tv.out.find("t,tv_orbit_jump,tv_lifted,tv_gibbs,upper_bound\n") != std::string::npos);
  CHECK(tv.out.find("N = 13 orbits") != std::string::npos);

  const auto b = run_cli({"bench", "--family", "pigeonhole", "--from", "2", "--to", "4",
                          "--brute-cap", "6"});
  REQUIRE(b.code == 0);
  std::istringstream lines(b.out);
  std::string header, row;
  std::getline(lines, header);
  CHECK(header ==
        "size,num_vars,wall_seconds,orbit_count,certificate_calls,log_z,brute_seconds,brute_log_z");
  std::vector<std::string> rows;
  while (std::getline(lines, row))
    rows.push_back(row);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("2,4,", 0) == 0);
  CHECK(rows[1].find(",13,") != std::string::npos);
  // size 4 has 8 variables, above the brute-force cap: trailing columns empty
  CHECK(rows[2].substr(rows[2].size() - 2) == ",,");
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"exact"}).code == cli::kExitUsage);
  CHECK(run_cli({"sample", "x.model"}).code == cli::kExitUsage);
  CHECK(run_cli({"--help"}).code == cli::kExitOk);

  const auto dup = dir / "dup.model";
  write(dup, "vars 2\nclause hard 1 1\n");
  const auto r = run_cli({"exact", dup});
  CHECK(r.code == cli::kExitParse);
  CHECK(r.err.find("line 2") != std::string::npos);

  const auto contra = dir / "contra.model";
  write(contra, "vars 1\nclause hard 1\nclause hard -1\n");
  CHECK(run_cli({"exact", contra}).code == cli::kExitInvariant);

  const auto skew = dir / "skew.model";
  write(skew, "vars 2\nclause 1 1\nclause 1 2\nevidence card ge 1 1\n");
  CHECK(run_cli({"exact", skew}).code == cli::kExitInvariant);

  const auto big = dir / "big.model";
  run_cli({"generate", "--family", "pairwise", "--n", "13", "-o", big});
  CHECK(run_cli({"tveval", big, "-T", "2"}).code == cli::kExitCap);

  CHECK(run_cli({"exact", dir / "missing.model"}).code != 0);
  CHECK(run_cli({"generate", "--family", "nope", "--n", "2"}).code != 0);
}
