#include "catch2/catch_amalgamated.hpp"

#include "unent/reduction.hpp"

using namespace unent;

namespace {

Clause3 c3(int a, int b, int c, bool na = false, bool nb = false, bool nc = false) {
  return {Literal{a, na}, Literal{b, nb}, Literal{c, nc}};
}

// decode a target assignment back to the source variables via the reference
bool decoded_value(const ReductionCertificate& cert, const Assignment& t, int src_var) {
  bool z = t.bits[static_cast<std::size_t>(cert.ref_copies[0])];
  bool v = t.bits[static_cast<std::size_t>(cert.var_map[static_cast<std::size_t>(src_var)][0])];
  return v == z;
}

// oracle: does any aux assignment satisfy all three gadget clauses, given the
// fixed values of the outer variables?
bool gadget_satisfiable(const std::array<Clause4, 3>& cls, std::vector<std::uint8_t>& bits,
                        const std::array<int, 3>& aux) {
  for (int aa = 0; aa < 8; ++aa) {
    for (int i = 0; i < 3; ++i)
      bits[static_cast<std::size_t>(aux[static_cast<std::size_t>(i)])] = (aa >> i) & 1;
    bool all = true;
    for (const auto& c : cls) all = all && detail::clause_ok(c, bits);
    if (all) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("clause gadget matches decoded clause truth for all polarities") {
  // independent re-derivation of the startup self-check, phrased via the
  // public gadget builder
  for (int negs = 0; negs < 8; ++negs) {
    Clause3 cl = c3(0, 1, 2, negs & 1, negs & 2, negs & 4);
    AuxAllocator alloc(4);  // vars: v1 v2 v3 z=3, aux from 4
    std::vector<Clause4> out;
    GadgetRecord rec = gadget_3clause_to_2in4(cl, 3, alloc, out);
    REQUIRE(out.size() == 3);
    REQUIRE(alloc.next() == 7);
    std::array<Clause4, 3> cls = {out[0], out[1], out[2]};
    for (int va = 0; va < 16; ++va) {
      std::vector<std::uint8_t> bits(7, 0);
      for (int i = 0; i < 4; ++i) bits[static_cast<std::size_t>(i)] = (va >> i) & 1;
      bool z = bits[3];
      bool want = false;
      for (int i = 0; i < 3; ++i) {
        bool dec = bits[static_cast<std::size_t>(i)] == z;
        want = want || (dec != cl[static_cast<std::size_t>(i)].negated);
      }
      CHECK(gadget_satisfiable(cls, bits, rec.aux) == want);
    }
  }
}

TEST_CASE("gadget aux variables are fresh and disjoint across clauses") {
  AuxAllocator alloc(4);
  std::vector<Clause4> out;
  GadgetRecord r1 = gadget_3clause_to_2in4(c3(0, 1, 2), 3, alloc, out);
  GadgetRecord r2 = gadget_3clause_to_2in4(c3(0, 1, 2, true), 3, alloc, out);
  for (int a : r1.aux)
    for (int b : r2.aux) CHECK(a != b);
  CHECK(out.size() == 6);
  CHECK(r2.clause_indices[0] == 3);
}

TEST_CASE("balance leaves compliant instances untouched") {
  TwoOutOfFourInstance inst(4, {{Literal{0, false}, Literal{1, false}, Literal{2, false}, Literal{3, false}}});
  BalanceResult res = balance(inst, 8);
  CHECK(res.inst.num_vars == 4);
  CHECK(res.inst.num_clauses() == 1);
  CHECK(res.equalities.empty());
  CHECK_THROWS_AS(balance(inst, 7), input_error);
}

TEST_CASE("balance splits overused variables and preserves satisfiability") {
  // variable 0 in 10 clauses, fillers rotated through a pool of 6 so only
  // variable 0 exceeds the occurrence bound
  std::vector<Clause4> cls;
  for (int i = 0; i < 10; ++i) {
    cls.push_back({Literal{0, false}, Literal{1 + i % 6, false}, Literal{1 + (i + 1) % 6, false},
                   Literal{1 + (i + 2) % 6, false}});
  }
  TwoOutOfFourInstance inst(7, cls);
  REQUIRE(inst.max_occurrence == 10);
  BalanceResult res = balance(inst, 8);
  CHECK(res.inst.max_occurrence <= 8);
  CHECK(res.copies[0].size() >= 2);
  // every equality clause pair uses four distinct variables
  for (const auto& e : res.equalities) {
    for (std::size_t ci : e.clause_indices) {
      const Clause4& c = res.inst.clauses[ci];
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          CHECK(c[static_cast<std::size_t>(i)].var != c[static_cast<std::size_t>(j)].var);
    }
  }
  // equisatisfiable under the split
  bool src_sat = brute_force_max_sat(inst).max_fraction == 1.0;
  bool bal_sat = brute_force_max_sat(res.inst, res.inst.num_vars).max_fraction == 1.0;
  CHECK(src_sat == bal_sat);
}

TEST_CASE("reduce_full structure invariants") {
  Rng rng(31);
  ThreeSatInstance inst = random_3sat(5, 6, rng);
  ReductionCertificate cert = reduce_full(inst);
  CHECK(cert.target.num_vars % 2 == 0);
  CHECK(cert.target.max_occurrence <= cert.balance_c);
  CHECK(cert.target.num_clauses() >= 3 * inst.num_clauses());
  // var_map copies, ref copies, aux vars and padding partition the target vars
  std::vector<int> seen(static_cast<std::size_t>(cert.target.num_vars), 0);
  for (const auto& cps : cert.var_map)
    for (int v : cps) ++seen[static_cast<std::size_t>(v)];
  for (int v : cert.aux_vars) ++seen[static_cast<std::size_t>(v)];
  for (int s : seen) CHECK(s == 1);
  bool ref_in_aux = false;
  for (int v : cert.aux_vars) ref_in_aux = ref_in_aux || v == cert.ref_copies[0];
  CHECK(ref_in_aux);
  if (cert.padding_var >= 0) CHECK(cert.padding_var == cert.target.num_vars - 1);
}

TEST_CASE("lift completeness on satisfiable instances") {
  Rng rng(32);
  int done = 0;
  while (done < 10) {
    ThreeSatInstance inst = random_3sat(4 + static_cast<int>(rng.uniform_int(3)), 8, rng);
    MaxSatResult src = brute_force_max_sat(inst);
    if (src.max_fraction < 1.0) continue;
    ReductionCertificate cert = reduce_full(inst);
    Assignment t = lift(cert, src.argmax);
    CHECK(eval_2in4(cert.target, t) == 1.0);
    // decoding the lifted assignment recovers the source assignment
    for (int v = 0; v < inst.num_vars; ++v)
      CHECK(decoded_value(cert, t, v) == static_cast<bool>(src.argmax.bits[static_cast<std::size_t>(v)]));
    ++done;
  }
}

TEST_CASE("unsatisfiable source gives positive target gap") {
  std::vector<Clause3> cls;
  for (int p = 0; p < 8; ++p) cls.push_back(c3(0, 1, 2, p & 1, p & 2, p & 4));
  ThreeSatInstance inst(3, cls);
  // c = 16 keeps the dense core unsplit, so the target stays brute-forceable
  ReductionCertificate cert = reduce_full(inst, 16);
  REQUIRE(cert.target.num_vars <= 28);
  double gap = measure_gap(cert, cert.target.num_vars);
  CHECK(gap > 0.0);
}

TEST_CASE("measure_gap is zero for satisfiable sources") {
  Rng rng(33);
  ThreeSatInstance inst = random_3sat(4, 3, rng);
  REQUIRE(brute_force_max_sat(inst).max_fraction == 1.0);
  ReductionCertificate cert = reduce_full(inst);
  CHECK(measure_gap(cert, cert.target.num_vars) == 0.0);
  ThreeSatInstance large = random_3sat(12, 40, rng);
  ReductionCertificate big = reduce_full(large);
  CHECK_THROWS_AS(measure_gap(big, 24), refusal_error);
}

TEST_CASE("empty source reduces to empty target") {
  ReductionCertificate cert = reduce_full(ThreeSatInstance(0, {}));
  CHECK(cert.target.num_vars == 0);
  CHECK(cert.target.num_clauses() == 0);
}

TEST_CASE("certificate json round trip") {
  Rng rng(34);
  ThreeSatInstance inst = random_3sat(5, 7, rng);
  ReductionCertificate cert = reduce_full(inst);
  nlohmann::json j = certificate_to_json(cert);
  ReductionCertificate back = certificate_from_json(j);
  CHECK(certificate_to_json(back) == j);
  CHECK(back.target.num_vars == cert.target.num_vars);
  CHECK(back.target.clauses == cert.target.clauses);
  nlohmann::json bad = j;
  bad["schema"] = "reduction-certificate-v0";
  CHECK_THROWS_AS(certificate_from_json(bad), input_error);
}
