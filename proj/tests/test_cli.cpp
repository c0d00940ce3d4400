#include "catch2/catch_amalgamated.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "unent/cli.hpp"

using namespace unent;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("unent_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

// small satisfiable instance: (x0 | x1 | x2) & (~x1 | x2 | x3)
const char* kSatInstance = "p 3sat 4 2\n1 2 3\n-2 3 4\n";

std::string make_cert(const TempDir& dir) {
  std::string in = dir.file("inst.txt");
  std::string cert = dir.file("cert.json");
  write_file(in, kSatInstance);
  ReduceConfig cfg;
  cfg.input = in;
  cfg.cert_out = cert;
  cmd_reduce(cfg);
  return cert;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(UNENT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cmd_reduce report") {
  TempDir dir;
  std::string in = dir.file("inst.txt");
  write_file(in, kSatInstance);
  ReduceConfig cfg;
  cfg.input = in;
  cfg.cert_out = dir.file("cert.json");
  nlohmann::json rep = cmd_reduce(cfg);
  CHECK(rep.at("schema") == "reduce-report-v1");
  CHECK(rep.at("source").at("n") == 4);
  CHECK(rep.at("source").at("m") == 2);
  CHECK(rep.at("source_satisfiable") == true);
  CHECK(rep.at("gap") == 0.0);
  CHECK(rep.at("lift_completeness") == 1.0);
  CHECK(rep.at("target").at("c").get<int>() <= kDefaultBalanceC);

  // certificate file parses back
  ReductionCertificate cert =
      certificate_from_json(nlohmann::json::parse(read_file(cfg.cert_out)));
  CHECK(cert.source.num_vars == 4);

  ReduceConfig missing;
  missing.input = dir.file("nope.txt");
  CHECK_THROWS_AS(cmd_reduce(missing), input_error);
  std::string bad = dir.file("bad.txt");
  write_file(bad, "p 3sat 3 1\n1 2\n");
  ReduceConfig badcfg;
  badcfg.input = bad;
  CHECK_THROWS_AS(cmd_reduce(badcfg), input_error);
}

TEST_CASE("cmd_simulate honest acceptance and determinism") {
  TempDir dir;
  std::string cert = make_cert(dir);
  SimulateConfig cfg;
  cfg.cert_path = cert;
  cfg.trials = 200;
  cfg.seed = 5;
  cfg.records_out = dir.file("rec.jsonl");
  nlohmann::json s1 = cmd_simulate(cfg);
  CHECK(s1.at("schema") == "simulate-summary-v1");
  CHECK(s1.at("acceptance") == 1.0);  // perfect completeness
  std::string rec1 = read_file(cfg.records_out);

  // byte-identical rerun
  nlohmann::json s2 = cmd_simulate(cfg);
  CHECK(s1.dump() == s2.dump());
  CHECK(read_file(cfg.records_out) == rec1);

  // different seed gives different records but still accepts everything
  cfg.seed = 6;
  nlohmann::json s3 = cmd_simulate(cfg);
  CHECK(s3.at("acceptance") == 1.0);
  CHECK(read_file(cfg.records_out) != rec1);
  CHECK(s3.at("config_hash") != s1.at("config_hash"));
}

TEST_CASE("cmd_simulate adversaries reject sometimes") {
  TempDir dir;
  std::string cert = make_cert(dir);
  SimulateConfig cfg;
  cfg.cert_path = cert;
  cfg.trials = 400;
  cfg.seed = 7;
  cfg.strategy = "concentrated";
  nlohmann::json rep = cmd_simulate(cfg);
  CHECK(rep.at("acceptance").get<double>() < 1.0);
  cfg.strategy = "no-such-strategy";
  CHECK_THROWS_AS(cmd_simulate(cfg), input_error);
}

TEST_CASE("cmd_simulate explicit assignment") {
  TempDir dir;
  std::string cert = make_cert(dir);
  SimulateConfig cfg;
  cfg.cert_path = cert;
  cfg.trials = 50;
  cfg.assignment = "1010";  // satisfies both clauses
  nlohmann::json rep = cmd_simulate(cfg);
  CHECK(rep.at("acceptance") == 1.0);
  cfg.assignment = "101";
  CHECK_THROWS_AS(cmd_simulate(cfg), input_error);
  cfg.assignment = "0100";  // x1 only: violates both clauses after decoding
  CHECK_THROWS_AS(cmd_simulate(cfg), precondition_error);
}

TEST_CASE("cmd_lemmas small scale") {
  TempDir dir;
  LemmasConfig cfg;
  cfg.seed = 3;
  cfg.scale = 0.05;
  cfg.report_out = dir.file("lemmas.json");
  nlohmann::json rep = cmd_lemmas(cfg);
  CHECK(rep.at("schema") == "lemma-report-v1");
  CHECK(rep.at("all_pass") == true);
  CHECK(rep.at("checks").size() >= 10);
  // report file round trips
  nlohmann::json file = nlohmann::json::parse(read_file(cfg.report_out));
  CHECK(file == rep);
  // deterministic rerun
  CHECK(cmd_lemmas(cfg).dump() == rep.dump());
}

TEST_CASE("cmd_sweep output shape and determinism") {
  SweepConfig cfg;
  cfg.dims = {8};
  cfg.betas = {1.0, 2.0};
  cfg.strategies = {"honest", "phased"};
  cfg.trials = 100;
  cfg.seed = 9;
  std::string csv = cmd_sweep(cfg);
  // header + one row per (dim, strategy, beta)
  std::size_t rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == 1 + 1 * 2 * 2);
  CHECK(csv.rfind("N,beta,K,strategy,trials,", 0) == 0);
  CHECK(cmd_sweep(cfg) == csv);  // byte-identical rerun

  // honest rows never reject
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  while (std::getline(ss, line)) {
    if (line.find("honest") != std::string::npos)
      CHECK(line.find(",0.000000,") != std::string::npos);
  }

  SweepConfig odd;
  odd.dims = {7};
  CHECK_THROWS_AS(cmd_sweep(odd), input_error);
}

TEST_CASE("binary exit codes") {
  TempDir dir;
  std::string in = dir.file("inst.txt");
  write_file(in, kSatInstance);
  std::string cert = make_cert(dir);

  CHECK(run_cli("reduce --input " + in) == 0);
  CHECK(run_cli("reduce") == 2);                          // missing required flag
  CHECK(run_cli("reduce --input " + dir.file("no.txt")) == 2);
  std::string bad = dir.file("bad.txt");
  write_file(bad, "p 3sat 3 1\n1 2\n");
  CHECK(run_cli("reduce --input " + bad) == 2);

  CHECK(run_cli("simulate --cert " + cert + " --trials 20") == 0);
  // unsatisfiable source: honest strategy refuses
  std::string unsat_in = dir.file("unsat.txt");
  std::string unsat_txt = "p 3sat 3 8\n";
  for (int p = 0; p < 8; ++p) {
    unsat_txt += std::to_string(p & 1 ? -1 : 1);
    unsat_txt += ' ';
    unsat_txt += std::to_string(p & 2 ? -2 : 2);
    unsat_txt += ' ';
    unsat_txt += std::to_string(p & 4 ? -3 : 3);
    unsat_txt += '\n';
  }
  write_file(unsat_in, unsat_txt);
  std::string unsat_cert = dir.file("unsat_cert.json");
  CHECK(run_cli("reduce --input " + unsat_in + " --cert " + unsat_cert + " --cap 28") == 0);
  CHECK(run_cli("simulate --cert " + unsat_cert + " --trials 5 --cap 28") == 3);

  CHECK(run_cli("lemmas --scale 0.02") == 0);
  CHECK(run_cli("sweep --dims 7") == 2);
  CHECK(run_cli("definitely-not-a-subcommand") == 2);

  // config file overrides flags
  std::string conf = dir.file("conf.json");
  write_file(conf, std::string("{\"input\": \"") + in + "\"}");
  CHECK(run_cli("reduce --input " + dir.file("no.txt") + " --config " + conf) == 0);
  std::string badconf = dir.file("badconf.json");
  write_file(badconf, "{not json");
  CHECK(run_cli("reduce --input " + in + " --config " + badconf) == 2);
}
