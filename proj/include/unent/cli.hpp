#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "unent/checks.hpp"
#include "unent/merlin.hpp"
#include "unent/reduction.hpp"
#include "unent/sat.hpp"
#include "unent/verifier.hpp"

namespace unent {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write file: " + path);
  out << content;
}

// ---- reduce ----

struct ReduceConfig {
  std::string input;
  std::string cert_out;
  int c = kDefaultBalanceC;
  int cap = kDefaultBruteForceCap;
  bool measure = true;
};

inline nlohmann::json cmd_reduce(const ReduceConfig& cfg) {
  std::istringstream in(read_file(cfg.input));
  ThreeSatInstance src = parse_3sat(in);
  ReductionCertificate cert = reduce_full(src, cfg.c);
  if (!cfg.cert_out.empty()) write_file(cfg.cert_out, certificate_to_json(cert).dump(2) + "\n");
  nlohmann::json rep;
  rep["schema"] = "reduce-report-v1";
  rep["source"] = {{"n", src.num_vars}, {"m", src.num_clauses()}};
  rep["target"] = {{"N", cert.target.num_vars},
                   {"M", cert.target.num_clauses()},
                   {"c", cert.target.max_occurrence}};
  if (cfg.measure && cert.target.num_vars <= cfg.cap && src.num_vars <= cfg.cap) {
    MaxSatResult srcmax = brute_force_max_sat(src, cfg.cap);
    rep["source_satisfiable"] = srcmax.max_fraction == 1.0;
    rep["gap"] = measure_gap(cert, cfg.cap);
    if (srcmax.max_fraction == 1.0) {
      Assignment lifted = lift(cert, srcmax.argmax);
      rep["lift_completeness"] = eval_2in4(cert.target, lifted);
    }
  } else {
    rep["gap"] = nullptr;
  }
  return rep;
}

// ---- simulate ----

struct SimulateConfig {
  std::string cert_path;
  std::string strategy = "honest";  // honest|concentrated|phased|nonidentical
  double sigma = 1.5707963267948966;
  double delta = 0.1;
  double support_frac = 0.5;
  double beta = 2.0;
  int k_override = -1;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::string assignment;  // optional explicit source assignment bits
  int cap = kDefaultBruteForceCap;
  std::string records_out;
  std::string summary_out;
};

inline nlohmann::json simulate_config_json(const SimulateConfig& c) {
  return {{"cert_path", c.cert_path}, {"strategy", c.strategy},    {"sigma", c.sigma},
          {"delta", c.delta},         {"support_frac", c.support_frac}, {"beta", c.beta},
          {"k_override", c.k_override}, {"trials", c.trials},      {"seed", c.seed},
          {"assignment", c.assignment}, {"cap", c.cap}};
}

inline WitnessBundle make_bundle(const SimulateConfig& cfg, int n, int k,
                                 const Assignment& honest_target, Rng& rng) {
  if (cfg.strategy == "honest") return honest_bundle(honest_target, k);
  if (cfg.strategy == "concentrated") {
    int sz = std::max(1, static_cast<int>(std::lround(cfg.support_frac * n)));
    std::vector<int> support;
    for (int i = 0; i < sz && i < n; ++i) support.push_back(i);
    return adversary_concentrated(support, n, k, rng);
  }
  if (cfg.strategy == "phased")
    return adversary_phased(Assignment::zeros(static_cast<std::size_t>(n)), cfg.sigma, k, rng);
  if (cfg.strategy == "nonidentical")
    return adversary_nonidentical(proper_state(Assignment::zeros(static_cast<std::size_t>(n)), n),
                                  cfg.delta, k, rng);
  throw input_error("unknown strategy: " + cfg.strategy);
}

inline nlohmann::json cmd_simulate(const SimulateConfig& cfg) {
  ReductionCertificate cert = certificate_from_json(nlohmann::json::parse(read_file(cfg.cert_path)));
  const TwoOutOfFourInstance& inst = cert.target;
  int n = inst.num_vars;
  if (n < 2 || n % 2 != 0) throw precondition_error("target dimension must be even and >= 2");
  BlockPartition part = partition_blocks(inst);
  int k = cfg.k_override > 0
              ? cfg.k_override
              : static_cast<int>(std::ceil(cfg.beta * std::sqrt(static_cast<double>(n))));

  Assignment honest_target = Assignment::zeros(static_cast<std::size_t>(n));
  if (cfg.strategy == "honest") {
    Assignment src_assign = Assignment::zeros(static_cast<std::size_t>(cert.source.num_vars));
    if (!cfg.assignment.empty()) {
      if (cfg.assignment.size() != static_cast<std::size_t>(cert.source.num_vars))
        throw input_error("assignment length does not match source instance");
      for (std::size_t i = 0; i < cfg.assignment.size(); ++i) {
        if (cfg.assignment[i] != '0' && cfg.assignment[i] != '1')
          throw input_error("assignment must be a 0/1 string");
        src_assign.bits[i] = cfg.assignment[i] == '1';
      }
    } else {
      MaxSatResult m = brute_force_max_sat(cert.source, cfg.cap);
      if (m.max_fraction < 1.0) throw precondition_error("source instance is unsatisfiable");
      src_assign = m.argmax;
    }
    honest_target = lift(cert, src_assign);
    if (eval_2in4(inst, honest_target) < 1.0)
      throw precondition_error("lifted assignment does not satisfy the target");
  }

  std::ostringstream records;
  std::uint64_t accepts = 0;
  std::uint64_t branch_n[3] = {0, 0, 0}, branch_acc[3] = {0, 0, 0};
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    Rng bundle_rng = Rng::substream(cfg.seed, t, 0);
    Rng proto_rng = Rng::substream(cfg.seed, t, 1);
    WitnessBundle b = make_bundle(cfg, n, k, honest_target, bundle_rng);
    TestReport rep = run_protocol(b, inst, part, proto_rng);
    int bi = static_cast<int>(rep.branch);
    ++branch_n[bi];
    if (rep.accept) {
      ++accepts;
      ++branch_acc[bi];
    }
    nlohmann::json rec = {{"trial", t},
                          {"branch", branch_name(rep.branch)},
                          {"accept", rep.accept},
                          {"detail", rep.detail}};
    records << rec.dump() << '\n';
  }
  if (!cfg.records_out.empty()) write_file(cfg.records_out, records.str());

  nlohmann::json cfg_json = simulate_config_json(cfg);
  WilsonInterval wi = wilson95(accepts, cfg.trials);
  nlohmann::json agg;
  agg["schema"] = "simulate-summary-v1";
  agg["config"] = cfg_json;
  agg["config_hash"] = fnv1a(cfg_json.dump());
  agg["N"] = n;
  agg["K"] = k;
  agg["trials"] = cfg.trials;
  agg["accepts"] = accepts;
  agg["acceptance"] = static_cast<double>(accepts) / static_cast<double>(cfg.trials);
  agg["wilson95"] = {wi.lower, wi.upper};
  agg["branches"] = {
      {"satisfiability", {{"trials", branch_n[0]}, {"accepts", branch_acc[0]}}},
      {"symmetry", {{"trials", branch_n[1]}, {"accepts", branch_acc[1]}}},
      {"uniformity", {{"trials", branch_n[2]}, {"accepts", branch_acc[2]}}}};
  if (!cfg.summary_out.empty()) write_file(cfg.summary_out, agg.dump(2) + "\n");
  return agg;
}

// ---- lemmas ----

struct LemmasConfig {
  std::uint64_t seed = 1;
  double scale = 1.0;
  std::string report_out;
};

inline nlohmann::json cmd_lemmas(const LemmasConfig& cfg) {
  auto results = run_lemma_battery(cfg.seed, cfg.scale);
  nlohmann::json rep;
  rep["schema"] = "lemma-report-v1";
  rep["seed"] = cfg.seed;
  bool all = true;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    arr.push_back({{"check", r.name}, {"status", r.status}, {"info", r.info}});
    if (r.status == "fail") all = false;
  }
  rep["checks"] = arr;
  rep["all_pass"] = all;
  if (!cfg.report_out.empty()) write_file(cfg.report_out, rep.dump(2) + "\n");
  return rep;
}

// ---- sweep ----

struct SweepConfig {
  std::vector<int> dims = {16, 64};
  std::vector<double> betas = {1.0, 2.0};
  std::vector<std::string> strategies = {"honest", "concentrated", "phased"};
  std::uint64_t trials = 200;
  std::uint64_t seed = 1;
  double sigma = 1.5707963267948966;
  double delta = 0.1;
  double support_frac = 0.5;
  std::string csv_out;
};

// Witness-format sweep over (N, beta, strategy): measures every witness in a
// random matching basis and tabulates disagreement (reject) and collision
// frequencies. Substreams are keyed by (N, strategy, trial) but not beta, so
// outcomes at smaller K are a prefix of outcomes at larger K and collision
// frequency is monotone in beta by construction.
inline std::string cmd_sweep(const SweepConfig& cfg) {
  std::string csv = "N,beta,K,strategy,trials,reject_rate,collision_rate,disagree_given_collision\n";
  char line[256];
  for (std::size_t ni = 0; ni < cfg.dims.size(); ++ni) {
    int n = cfg.dims[ni];
    if (n < 2 || n % 2 != 0) throw input_error("sweep dimensions must be even and >= 2");
    for (std::size_t si = 0; si < cfg.strategies.size(); ++si) {
      const std::string& strat = cfg.strategies[si];
      std::uint64_t cell = cfg.seed ^ splitmix64(ni * 1000003ULL + si * 1009ULL + 7ULL);
      for (double beta : cfg.betas) {
        int k = static_cast<int>(std::ceil(beta * std::sqrt(static_cast<double>(n))));
        std::uint64_t rejects = 0, collisions = 0, disagrees = 0;
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
          Rng mrng = Rng::substream(cell, t, 0);
          Matching m = random_matching(n, mrng);
          Rng srng = Rng::substream(cell, t, 1);
          SimulateConfig sc;
          sc.strategy = strat;
          sc.sigma = cfg.sigma;
          sc.delta = cfg.delta;
          sc.support_frac = cfg.support_frac;
          WitnessBundle b = make_bundle(sc, n, k, Assignment::zeros(static_cast<std::size_t>(n)), srng);
          std::map<Edge, std::array<int, 2>> seen;
          for (int w = 0; w < k; ++w) {
            Rng wrng = Rng::substream(cell, t, 100 + static_cast<std::uint64_t>(w));
            MatchingOutcome o = measure_matching(b.witnesses[static_cast<std::size_t>(w)], m, wrng);
            seen[o.edge][o.sign > 0 ? 0 : 1] += 1;
          }
          bool col = false, dis = false;
          for (const auto& [e, cnt] : seen) {
            (void)e;
            if (cnt[0] + cnt[1] >= 2) col = true;
            if (cnt[0] > 0 && cnt[1] > 0) dis = true;
          }
          if (col) ++collisions;
          if (dis) {
            ++disagrees;
            ++rejects;
          }
        }
        double tr = static_cast<double>(cfg.trials);
        double dgc = collisions ? static_cast<double>(disagrees) / static_cast<double>(collisions) : 0.0;
        std::snprintf(line, sizeof(line), "%d,%.3f,%d,%s,%llu,%.6f,%.6f,%.6f\n", n, beta, k,
                      strat.c_str(), static_cast<unsigned long long>(cfg.trials),
                      static_cast<double>(rejects) / tr, static_cast<double>(collisions) / tr, dgc);
        csv += line;
      }
    }
  }
  if (!cfg.csv_out.empty()) write_file(cfg.csv_out, csv);
  return csv;
}

}  // namespace unent
