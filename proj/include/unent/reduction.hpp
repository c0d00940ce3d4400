#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "json.hpp"
#include "unent/sat.hpp"

namespace unent {

// 3SAT -> balanced 2-out-of-4-SAT.
//
// Solution sets of 2-out-of-4 clause systems are closed under complementing
// every variable (exactly-two-true maps to exactly-two-true), so no clause set
// can distinguish an assignment from its complement. Source truth values are
// therefore decoded relative to a global reference variable z: source variable
// i is read as [v_i == z]. The per-clause gadget below is satisfiable over its
// auxiliary variables exactly when the decoded source clause holds; the schema
// was found by exhaustive search and is re-verified exhaustively at startup.
//
// Gadget for source clause (l1,l2,l3), l_i on variable v_i with negation n_i,
// fresh aux a1,a2,a3 (literal written n?~v:v, i.e. negation flag n_i):
//   C1: ( n1 v1,  n2 v2, +a1, +a2)
//   C2: (~n1 v1, ~n2 v2, -a1, -a2)
//   C3: ( n3 v3,     -z, -a1, +a3)
//
// Equality of two variables y,w (used to chain copies during balancing) is
// forced by a two-clause gadget with fresh aux a,b:
//   (+y, -w, +a, -b) and (+y, -w, -a, +b)
// Both are satisfied iff y == w and a == b.

struct GadgetRecord {
  std::array<std::size_t, 3> clause_indices;  // into target.clauses
  std::array<int, 3> aux;                     // a1, a2, a3
};

struct EqualityRecord {
  std::array<std::size_t, 2> clause_indices;
  std::array<int, 2> aux;
  std::array<int, 2> vars;  // the pair forced equal
};

struct ReductionCertificate {
  ThreeSatInstance source;
  TwoOutOfFourInstance target;
  std::vector<std::vector<int>> var_map;  // source var -> its target copies
  std::vector<int> ref_copies;            // copies of the reference variable z
  std::vector<int> aux_vars;              // everything not a source-var copy
  std::vector<GadgetRecord> gadgets;
  std::vector<EqualityRecord> equalities;
  int padding_var = -1;  // dummy variable added to make N even, or -1
  int balance_c = 0;
};

namespace detail {

inline Clause4 gadget_c1(int v1, bool n1, int v2, bool n2, int a1, int a2) {
  return {Literal{v1, n1}, Literal{v2, n2}, Literal{a1, false}, Literal{a2, false}};
}
inline Clause4 gadget_c2(int v1, bool n1, int v2, bool n2, int a1, int a2) {
  return {Literal{v1, !n1}, Literal{v2, !n2}, Literal{a1, true}, Literal{a2, true}};
}
inline Clause4 gadget_c3(int v3, bool n3, int z, int a1, int a3) {
  return {Literal{v3, n3}, Literal{z, true}, Literal{a1, true}, Literal{a3, false}};
}
inline Clause4 eq_c1(int y, int w, int a, int b) {
  return {Literal{y, false}, Literal{w, true}, Literal{a, false}, Literal{b, true}};
}
inline Clause4 eq_c2(int y, int w, int a, int b) {
  return {Literal{y, false}, Literal{w, true}, Literal{a, true}, Literal{b, false}};
}

inline bool clause_ok(const Clause4& c, const std::vector<std::uint8_t>& bits) {
  int t = 0;
  for (const auto& l : c) t += (static_cast<bool>(bits[static_cast<std::size_t>(l.var)]) != l.negated) ? 1 : 0;
  return t == 2;
}

// Exhaustive schema checks, run once. Throws construction_error on failure.
inline void verify_gadget_schemas() {
  // clause gadget: vars v1=0,v2=1,v3=2,z=3,a1=4,a2=5,a3=6
  for (int negs = 0; negs < 8; ++negs) {
    bool n1 = negs & 1, n2 = negs & 2, n3 = negs & 4;
    Clause4 c1 = gadget_c1(0, n1, 1, n2, 4, 5);
    Clause4 c2 = gadget_c2(0, n1, 1, n2, 4, 5);
    Clause4 c3 = gadget_c3(2, n3, 3, 4, 6);
    for (int va = 0; va < 16; ++va) {
      std::vector<std::uint8_t> bits(7, 0);
      for (int i = 0; i < 4; ++i) bits[static_cast<std::size_t>(i)] = (va >> i) & 1;
      bool z = bits[3];
      bool want = ((bits[0] == z) != n1) || ((bits[1] == z) != n2) || ((bits[2] == z) != n3);
      bool exists = false;
      for (int aa = 0; aa < 8 && !exists; ++aa) {
        bits[4] = aa & 1;
        bits[5] = (aa >> 1) & 1;
        bits[6] = (aa >> 2) & 1;
        exists = clause_ok(c1, bits) && clause_ok(c2, bits) && clause_ok(c3, bits);
      }
      if (exists != want) throw construction_error("clause gadget schema self-check failed");
    }
  }
  // equality gadget: y=0,w=1,a=2,b=3
  for (int va = 0; va < 4; ++va) {
    std::vector<std::uint8_t> bits(4, 0);
    bits[0] = va & 1;
    bits[1] = (va >> 1) & 1;
    bool exists = false;
    for (int ab = 0; ab < 4 && !exists; ++ab) {
      bits[2] = ab & 1;
      bits[3] = (ab >> 1) & 1;
      exists = clause_ok(eq_c1(0, 1, 2, 3), bits) && clause_ok(eq_c2(0, 1, 2, 3), bits);
    }
    if (exists != (bits[0] == bits[1])) throw construction_error("equality gadget schema self-check failed");
  }
}

inline void ensure_gadget_schemas_verified() {
  static const bool ok = [] {
    verify_gadget_schemas();
    return true;
  }();
  (void)ok;
}

}  // namespace detail

// Fresh-variable allocator for gadget expansion.
class AuxAllocator {
 public:
  explicit AuxAllocator(int next) : next_(next) {}
  int fresh() { return next_++; }
  int next() const { return next_; }

 private:
  int next_;
};

// Expands one 3-literal clause against reference variable z. Appends the three
// gadget clauses to `out` and returns the record of clause/aux indices.
inline GadgetRecord gadget_3clause_to_2in4(const Clause3& clause, int z, AuxAllocator& alloc,
                                           std::vector<Clause4>& out) {
  detail::ensure_gadget_schemas_verified();
  int a1 = alloc.fresh(), a2 = alloc.fresh(), a3 = alloc.fresh();
  GadgetRecord rec;
  rec.aux = {a1, a2, a3};
  rec.clause_indices = {out.size(), out.size() + 1, out.size() + 2};
  out.push_back(detail::gadget_c1(clause[0].var, clause[0].negated, clause[1].var,
                                  clause[1].negated, a1, a2));
  out.push_back(detail::gadget_c2(clause[0].var, clause[0].negated, clause[1].var,
                                  clause[1].negated, a1, a2));
  out.push_back(detail::gadget_c3(clause[2].var, clause[2].negated, z, a1, a3));
  return rec;
}

struct BalanceResult {
  TwoOutOfFourInstance inst;
  std::vector<std::vector<int>> copies;  // old var -> its copies (first = old index)
  std::vector<EqualityRecord> equalities;
};

// Splits every variable occurring in more than c clauses into copies chained
// together by equality gadgets. Each copy carries at most c-4 original
// occurrences; the cyclic chain adds at most 4 more.
inline BalanceResult balance(const TwoOutOfFourInstance& inst, int c) {
  if (c < 8) throw input_error("balance parameter must be at least 8");
  detail::ensure_gadget_schemas_verified();

  BalanceResult res;
  res.copies.resize(static_cast<std::size_t>(inst.num_vars));
  for (int v = 0; v < inst.num_vars; ++v) res.copies[static_cast<std::size_t>(v)] = {v};
  if (inst.max_occurrence <= c) {
    res.inst = inst;
    return res;
  }

  auto occ = inst.occurrence_counts();
  int cap = c - 4;
  AuxAllocator alloc(inst.num_vars);
  for (int v = 0; v < inst.num_vars; ++v) {
    int t = occ[static_cast<std::size_t>(v)];
    if (t <= c) continue;
    int k = (t + cap - 1) / cap;
    for (int i = 1; i < k; ++i) res.copies[static_cast<std::size_t>(v)].push_back(alloc.fresh());
  }

  std::vector<Clause4> clauses = inst.clauses;
  std::vector<int> seen(static_cast<std::size_t>(inst.num_vars), 0);
  for (auto& cl : clauses) {
    for (auto& lit : cl) {
      const auto& cp = res.copies[static_cast<std::size_t>(lit.var)];
      if (cp.size() > 1) {
        int j = seen[static_cast<std::size_t>(lit.var)]++;
        lit.var = cp[static_cast<std::size_t>(j) % cp.size()];
      }
    }
  }

  for (int v = 0; v < inst.num_vars; ++v) {
    const auto& cp = res.copies[static_cast<std::size_t>(v)];
    std::size_t k = cp.size();
    if (k < 2) continue;
    std::size_t links = (k == 2) ? 1 : k;
    for (std::size_t i = 0; i < links; ++i) {
      int y = cp[i], w = cp[(i + 1) % k];
      int a = alloc.fresh(), b = alloc.fresh();
      EqualityRecord rec;
      rec.vars = {y, w};
      rec.aux = {a, b};
      rec.clause_indices = {clauses.size(), clauses.size() + 1};
      clauses.push_back(detail::eq_c1(y, w, a, b));
      clauses.push_back(detail::eq_c2(y, w, a, b));
      res.equalities.push_back(rec);
    }
  }

  res.inst = TwoOutOfFourInstance(alloc.next(), std::move(clauses));
  if (res.inst.max_occurrence > c) throw construction_error("balance failed to reach target occurrence bound");
  return res;
}

inline constexpr int kDefaultBalanceC = 8;

inline ReductionCertificate reduce_full(const ThreeSatInstance& inst, int c = kDefaultBalanceC) {
  detail::ensure_gadget_schemas_verified();
  ReductionCertificate cert;
  cert.source = inst;
  cert.balance_c = c;
  cert.var_map.resize(static_cast<std::size_t>(inst.num_vars));
  if (inst.clauses.empty()) {
    cert.target = TwoOutOfFourInstance(0, {});
    return cert;
  }

  int n = inst.num_vars;
  int z = n;
  AuxAllocator alloc(n + 1);
  std::vector<Clause4> clauses;
  std::vector<GadgetRecord> gadgets;
  for (const auto& cl : inst.clauses)
    gadgets.push_back(gadget_3clause_to_2in4(cl, z, alloc, clauses));
  TwoOutOfFourInstance mid(alloc.next(), std::move(clauses));

  BalanceResult bal = balance(mid, c);
  cert.equalities = std::move(bal.equalities);
  cert.gadgets = std::move(gadgets);
  // gadget records index clauses by position; balance preserves positions and
  // never renames aux variables (their occurrence counts are at most 3)
  for (int v = 0; v < n; ++v) cert.var_map[static_cast<std::size_t>(v)] = bal.copies[static_cast<std::size_t>(v)];
  cert.ref_copies = bal.copies[static_cast<std::size_t>(z)];

  TwoOutOfFourInstance target = bal.inst;
  if (target.num_vars % 2 != 0) {
    cert.padding_var = target.num_vars;
    target = TwoOutOfFourInstance(target.num_vars + 1, target.clauses);
  }
  cert.target = std::move(target);

  std::vector<char> is_copy(static_cast<std::size_t>(cert.target.num_vars), 0);
  for (const auto& cps : cert.var_map)
    for (int v : cps) is_copy[static_cast<std::size_t>(v)] = 1;
  for (int v = 0; v < cert.target.num_vars; ++v)
    if (!is_copy[static_cast<std::size_t>(v)]) cert.aux_vars.push_back(v);
  return cert;
}

// Maps a source assignment to a target assignment: copies take the source
// value, reference copies take 1 (so [v == z] decodes back to v), equality
// aux pairs take (0,0), and each clause gadget's aux triple is chosen by
// trying all 8 values and keeping the first that satisfies most of its
// three clauses.
inline Assignment lift(const ReductionCertificate& cert, const Assignment& a) {
  if (a.bits.size() != static_cast<std::size_t>(cert.source.num_vars))
    throw input_error("assignment length mismatch");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(cert.target.num_vars), 0);
  for (int v = 0; v < cert.source.num_vars; ++v)
    for (int cp : cert.var_map[static_cast<std::size_t>(v)])
      bits[static_cast<std::size_t>(cp)] = a.bits[static_cast<std::size_t>(v)];
  for (int cp : cert.ref_copies) bits[static_cast<std::size_t>(cp)] = 1;
  for (const auto& g : cert.gadgets) {
    int best = -1, best_sat = -1;
    for (int aa = 0; aa < 8; ++aa) {
      for (int i = 0; i < 3; ++i)
        bits[static_cast<std::size_t>(g.aux[static_cast<std::size_t>(i)])] = (aa >> i) & 1;
      int sat = 0;
      for (std::size_t ci : g.clause_indices)
        sat += detail::clause_ok(cert.target.clauses[ci], bits) ? 1 : 0;
      if (sat > best_sat) {
        best_sat = sat;
        best = aa;
      }
    }
    for (int i = 0; i < 3; ++i)
      bits[static_cast<std::size_t>(g.aux[static_cast<std::size_t>(i)])] = (best >> i) & 1;
  }
  return Assignment(std::move(bits));
}

inline double measure_gap(const ReductionCertificate& cert, int cap = kDefaultBruteForceCap) {
  if (cert.target.num_vars > cap) throw refusal_error("target exceeds brute-force variable cap");
  if (cert.source.num_vars > cap) throw refusal_error("source exceeds brute-force variable cap");
  MaxSatResult src = brute_force_max_sat(cert.source, cap);
  if (src.max_fraction == 1.0) return 0.0;
  MaxSatResult tgt = brute_force_max_sat(cert.target, cap);
  return 1.0 - tgt.max_fraction;
}

// ---- JSON serialization (versioned) ----

inline constexpr const char* kCertificateSchema = "reduction-certificate-v1";

inline void to_json(nlohmann::json& j, const Literal& l) { j = {l.var, l.negated}; }
inline void from_json(const nlohmann::json& j, Literal& l) {
  l.var = j.at(0).get<int>();
  l.negated = j.at(1).get<bool>();
}

inline nlohmann::json certificate_to_json(const ReductionCertificate& cert) {
  nlohmann::json j;
  j["schema"] = kCertificateSchema;
  j["source"] = {{"num_vars", cert.source.num_vars}, {"clauses", cert.source.clauses}};
  j["target"] = {{"num_vars", cert.target.num_vars}, {"clauses", cert.target.clauses}};
  j["var_map"] = cert.var_map;
  j["ref_copies"] = cert.ref_copies;
  j["aux_vars"] = cert.aux_vars;
  j["padding_var"] = cert.padding_var;
  j["balance_c"] = cert.balance_c;
  nlohmann::json gs = nlohmann::json::array();
  for (const auto& g : cert.gadgets) gs.push_back({{"clauses", g.clause_indices}, {"aux", g.aux}});
  j["gadgets"] = gs;
  nlohmann::json es = nlohmann::json::array();
  for (const auto& e : cert.equalities)
    es.push_back({{"clauses", e.clause_indices}, {"aux", e.aux}, {"vars", e.vars}});
  j["equalities"] = es;
  return j;
}

inline ReductionCertificate certificate_from_json(const nlohmann::json& j) {
  if (j.at("schema").get<std::string>() != kCertificateSchema)
    throw input_error("unsupported certificate schema");
  ReductionCertificate cert;
  cert.source = ThreeSatInstance(j.at("source").at("num_vars").get<int>(),
                                 j.at("source").at("clauses").get<std::vector<Clause3>>());
  cert.target = TwoOutOfFourInstance(j.at("target").at("num_vars").get<int>(),
                                     j.at("target").at("clauses").get<std::vector<Clause4>>());
  cert.var_map = j.at("var_map").get<std::vector<std::vector<int>>>();
  cert.ref_copies = j.at("ref_copies").get<std::vector<int>>();
  cert.aux_vars = j.at("aux_vars").get<std::vector<int>>();
  cert.padding_var = j.at("padding_var").get<int>();
  cert.balance_c = j.at("balance_c").get<int>();
  for (const auto& g : j.at("gadgets")) {
    GadgetRecord rec;
    rec.clause_indices = g.at("clauses").get<std::array<std::size_t, 3>>();
    rec.aux = g.at("aux").get<std::array<int, 3>>();
    cert.gadgets.push_back(rec);
  }
  for (const auto& e : j.at("equalities")) {
    EqualityRecord rec;
    rec.clause_indices = e.at("clauses").get<std::array<std::size_t, 2>>();
    rec.aux = e.at("aux").get<std::array<int, 2>>();
    rec.vars = e.at("vars").get<std::array<int, 2>>();
    cert.equalities.push_back(rec);
  }
  return cert;
}

}  // namespace unent
