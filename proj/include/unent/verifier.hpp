#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "unent/common.hpp"
#include "unent/merlin.hpp"
#include "unent/sat.hpp"
#include "unent/state.hpp"

namespace unent {

// Clause blocks: within a block no two clauses share a variable, so the
// 4-coordinate groups of a block are disjoint and clause membership of a
// measurement outcome is well defined.
struct BlockPartition {
  std::vector<std::vector<std::size_t>> blocks;
  int s() const { return static_cast<int>(blocks.size()); }
};

// Greedy coloring of the clause conflict graph in clause-index order. For a
// balanced instance (max occurrence c) the conflict degree is at most 4(c-1),
// so s <= 4(c-1)+1.
inline BlockPartition partition_blocks(const TwoOutOfFourInstance& inst) {
  BlockPartition part;
  std::vector<std::vector<char>> block_used;  // per block, variable usage
  for (std::size_t ci = 0; ci < inst.clauses.size(); ++ci) {
    const auto& cl = inst.clauses[ci];
    std::size_t b = 0;
    for (; b < part.blocks.size(); ++b) {
      bool clash = false;
      for (const auto& l : cl)
        if (block_used[b][static_cast<std::size_t>(l.var)]) clash = true;
      if (!clash) break;
    }
    if (b == part.blocks.size()) {
      part.blocks.emplace_back();
      block_used.emplace_back(static_cast<std::size_t>(inst.num_vars), 0);
    }
    part.blocks[b].push_back(ci);
    for (const auto& l : cl) block_used[b][static_cast<std::size_t>(l.var)] = 1;
  }
  if (part.blocks.empty()) part.blocks.emplace_back();
  return part;
}

enum class Branch { satisfiability, symmetry, uniformity };

inline const char* branch_name(Branch b) {
  switch (b) {
    case Branch::satisfiability: return "satisfiability";
    case Branch::symmetry: return "symmetry";
    default: return "uniformity";
  }
}

struct TestReport {
  bool accept = true;
  Branch branch = Branch::satisfiability;
  nlohmann::json detail;
};

namespace detail {

// The three orthonormal basis vectors of a clause's satisfying subspace, as
// sign patterns over the clause's 4 coordinates (each entry +-1/2). A clause
// is satisfied when exactly two literal values are true, i.e. exactly two of
// the polarity-adjusted amplitude signs are -1; the span of these patterns
// (polarity-flipped per negated literal) captures exactly those sign vectors.
inline constexpr std::array<std::array<int, 4>, 3> kSatPatterns = {
    {{+1, +1, -1, -1}, {+1, -1, +1, -1}, {+1, -1, -1, +1}}};

inline std::array<std::array<double, 4>, 3> sat_basis(const Clause4& cl) {
  std::array<std::array<double, 4>, 3> basis{};
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t t = 0; t < 4; ++t)
      basis[b][t] = 0.5 * kSatPatterns[b][t] * (cl[t].negated ? -1.0 : 1.0);
  return basis;
}

}  // namespace detail

// Exact acceptance probability of the clause-measurement test on one witness:
// average over blocks of [mass outside the block's clauses] +
// [per clause, squared projection onto its satisfying subspace].
inline double satisfiability_test_exact(const StateVector& s, const TwoOutOfFourInstance& inst,
                                        const BlockPartition& part) {
  if (s.dim() != inst.num_vars) throw input_error("state dimension does not match instance");
  double total = 0.0;
  for (const auto& block : part.blocks) {
    double accept = 1.0;
    for (std::size_t ci : block) {
      const auto& cl = inst.clauses[ci];
      auto basis = detail::sat_basis(cl);
      double mass = 0.0;
      for (const auto& l : cl) mass += std::norm(s.amp(l.var));
      double psat = 0.0;
      for (const auto& u : basis) {
        cplx ip = 0.0;
        for (std::size_t t = 0; t < 4; ++t) ip += u[t] * s.amp(cl[t].var);
        psat += std::norm(ip);
      }
      accept += psat - mass;
    }
    total += accept;
  }
  return total / static_cast<double>(part.s());
}

// Exact-rational path for proper states: acceptance numerator/denominator in
// integers, so completeness can be asserted with zero tolerance.
struct ExactProbability {
  long long num = 0;
  long long den = 1;
  bool is_one() const { return num == den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline ExactProbability satisfiability_test_exact(const Assignment& a,
                                                  const TwoOutOfFourInstance& inst,
                                                  const BlockPartition& part) {
  if (a.bits.size() != static_cast<std::size_t>(inst.num_vars))
    throw input_error("assignment length mismatch");
  long long n = inst.num_vars;
  long long num = 0;
  for (const auto& block : part.blocks) {
    long long acc = 4 * n - 16 * static_cast<long long>(block.size());
    for (std::size_t ci : block) {
      const auto& cl = inst.clauses[ci];
      for (const auto& pat : detail::kSatPatterns) {
        long long sum = 0;
        for (std::size_t t = 0; t < 4; ++t) {
          int sgn = a.bits[static_cast<std::size_t>(cl[t].var)] ? -1 : 1;
          if (cl[t].negated) sgn = -sgn;
          sum += pat[t] * sgn;
        }
        acc += sum * sum;
      }
    }
    num += acc;
  }
  return {num, 4 * n * static_cast<long long>(part.s())};
}

// Sampled clause-measurement test: block uniform, then clause vs remainder by
// amplitude mass, then the projective outcome within the clause subspace.
inline TestReport satisfiability_test(const StateVector& s, const TwoOutOfFourInstance& inst,
                                      const BlockPartition& part, Rng& rng) {
  if (s.dim() != inst.num_vars) throw input_error("state dimension does not match instance");
  TestReport rep;
  rep.branch = Branch::satisfiability;
  std::size_t r = rng.uniform_int(static_cast<std::uint64_t>(part.s()));
  const auto& block = part.blocks[r];
  double u = rng.uniform01();
  double acc = 0.0;
  long long hit = -1;
  bool accept = true;
  for (std::size_t ci : block) {
    const auto& cl = inst.clauses[ci];
    double mass = 0.0;
    for (const auto& l : cl) mass += std::norm(s.amp(l.var));
    acc += mass;
    if (u < acc && mass > 0.0) {
      hit = static_cast<long long>(ci);
      double psat = 0.0;
      for (const auto& uv : detail::sat_basis(cl)) {
        cplx ip = 0.0;
        for (std::size_t t = 0; t < 4; ++t) ip += uv[t] * s.amp(cl[t].var);
        psat += std::norm(ip);
      }
      accept = rng.bernoulli(psat / mass);
      break;
    }
  }
  rep.accept = accept;
  rep.detail = {{"block", r}, {"clause", hit}};
  return rep;
}

inline TestReport symmetry_test(const WitnessBundle& b, Rng& rng) {
  check_bundle(b);
  if (b.k() < 2) throw precondition_error("symmetry test needs at least two witnesses");
  int k = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(b.k() - 1)));
  const StateVector& w0 = b.witnesses.front();
  const StateVector& wk = b.witnesses[static_cast<std::size_t>(k)];
  double prob = swap_test_prob(w0, wk);
  TestReport rep;
  rep.branch = Branch::symmetry;
  rep.accept = rng.bernoulli(prob);
  rep.detail = {{"partner", k}, {"overlap_sq", std::norm(inner(w0, wk))}};
  return rep;
}

// Measures every witness in the same random matching basis; rejects iff some
// edge shows both the + and the - outcome. Collisions (repeated edges, any
// signs) are reported as evidence either way.
inline TestReport uniformity_test_at(const WitnessBundle& b, const Matching& m, Rng& rng) {
  check_bundle(b);
  if (b.dim() != m.dim()) throw input_error("bundle and matching dimensions differ");
  std::map<Edge, std::array<int, 2>> seen;  // edge -> counts of (+, -)
  std::vector<nlohmann::json> outcomes;
  for (const auto& w : b.witnesses) {
    MatchingOutcome o = measure_matching(w, m, rng);
    seen[o.edge][o.sign > 0 ? 0 : 1] += 1;
    outcomes.push_back({o.edge.i, o.edge.j, o.sign});
  }
  bool reject = false;
  int collisions = 0;
  nlohmann::json disagreements = nlohmann::json::array();
  for (const auto& [edge, counts] : seen) {
    int tot = counts[0] + counts[1];
    if (tot >= 2) collisions += tot * (tot - 1) / 2;
    if (counts[0] > 0 && counts[1] > 0) {
      reject = true;
      disagreements.push_back({edge.i, edge.j});
    }
  }
  TestReport rep;
  rep.branch = Branch::uniformity;
  rep.accept = !reject;
  rep.detail = {{"collisions", collisions}, {"disagreements", disagreements},
                {"outcomes", outcomes}};
  return rep;
}

inline TestReport uniformity_test(const WitnessBundle& b, Rng& rng) {
  check_bundle(b);
  Matching m = random_matching(b.dim(), rng);
  return uniformity_test_at(b, m, rng);
}

// The composed protocol: one of the three tests, each with probability 1/3.
// The clause-measurement branch runs on a uniformly chosen witness.
inline TestReport run_protocol(const WitnessBundle& b, const TwoOutOfFourInstance& inst,
                               const BlockPartition& part, Rng& rng) {
  check_bundle(b);
  if (b.dim() != inst.num_vars) throw input_error("bundle dimension does not match instance");
  std::uint64_t branch = rng.uniform_int(3);
  if (branch == 0) {
    std::size_t w = rng.uniform_int(static_cast<std::uint64_t>(b.k()));
    TestReport rep = satisfiability_test(b.witnesses[w], inst, part, rng);
    rep.detail["witness"] = w;
    return rep;
  }
  if (branch == 1) {
    if (b.k() < 2) {
      TestReport rep;
      rep.branch = Branch::symmetry;
      rep.accept = true;
      rep.detail = {{"partner", nullptr}};
      return rep;
    }
    return symmetry_test(b, rng);
  }
  return uniformity_test(b, rng);
}

// Exact disagreement probability of the uniformity test at a fixed matching,
// by enumerating the product outcome distribution. Oracle for tiny configs.
inline double uniformity_exact_tiny(const WitnessBundle& b, const Matching& m) {
  check_bundle(b);
  if (b.dim() > 16 || b.k() > 4) throw refusal_error("exact uniformity oracle capped at N<=16, K<=4");
  std::vector<MatchingDistribution> dists;
  for (const auto& w : b.witnesses) dists.push_back(matching_distribution(w, m));
  std::size_t n_out = dists.front().probs.size();
  double p_reject = 0.0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(b.k()), 0);
  for (;;) {
    double p = 1.0;
    for (int w = 0; w < b.k(); ++w) p *= dists[static_cast<std::size_t>(w)].probs[idx[static_cast<std::size_t>(w)]];
    if (p > 0.0) {
      std::map<Edge, std::array<bool, 2>> seen;
      bool reject = false;
      for (int w = 0; w < b.k(); ++w) {
        const auto& o = dists[static_cast<std::size_t>(w)].outcomes[idx[static_cast<std::size_t>(w)]];
        auto& f = seen[o.edge];
        f[o.sign > 0 ? 0 : 1] = true;
        if (f[0] && f[1]) reject = true;
      }
      if (reject) p_reject += p;
    }
    int carry = b.k() - 1;
    while (carry >= 0 && ++idx[static_cast<std::size_t>(carry)] == n_out) {
      idx[static_cast<std::size_t>(carry)] = 0;
      --carry;
    }
    if (carry < 0) break;
  }
  return p_reject;
}

}  // namespace unent
