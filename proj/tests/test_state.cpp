#include "catch2/catch_amalgamated.hpp"

#include <map>
#include <sstream>

#include "unent/state.hpp"

using namespace unent;

namespace {

StateVector random_state(int n, Rng& rng) {
  std::vector<cplx> amps(static_cast<std::size_t>(n));
  double n2 = 0.0;
  for (auto& a : amps) {
    a = cplx(rng.normal(), rng.normal());
    n2 += std::norm(a);
  }
  double nr = std::sqrt(n2);
  for (auto& a : amps) a /= nr;
  return StateVector(std::move(amps));
}

StateVector basis_state(int n, int i) {
  std::vector<cplx> amps(static_cast<std::size_t>(n), 0.0);
  amps[static_cast<std::size_t>(i)] = 1.0;
  return StateVector(std::move(amps));
}

Assignment rand_assignment(int n, Rng& rng) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  for (auto& b : bits) b = rng.bernoulli(0.5);
  return Assignment(std::move(bits));
}

}  // namespace

TEST_CASE("state vector normalization guard") {
  CHECK_THROWS_AS(StateVector({cplx(0.5, 0.0), cplx(0.5, 0.0)}), input_error);
  CHECK_THROWS_AS(StateVector(std::vector<cplx>{}), input_error);
  StateVector s({cplx(1.0 + 1e-8, 0.0)});
  CHECK(std::abs(s.amp(0)) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("proper state inner product closed form") {
  // <g_x|g_y> = (N - 2 hamming(x,y)) / N
  Rng rng(41);
  for (int t = 0; t < 30; ++t) {
    int n = 2 + static_cast<int>(rng.uniform_int(30));
    Assignment x = rand_assignment(n, rng), y = rand_assignment(n, rng);
    int ham = 0;
    for (int i = 0; i < n; ++i) ham += x.bits[static_cast<std::size_t>(i)] != y.bits[static_cast<std::size_t>(i)];
    double want = (n - 2.0 * ham) / n;
    cplx got = inner(proper_state(x, n), proper_state(y, n));
    CHECK(got.real() == Catch::Approx(want).margin(1e-12));
    CHECK(got.imag() == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("trace distance and swap test basics") {
  StateVector e0 = basis_state(2, 0), e1 = basis_state(2, 1);
  CHECK(trace_distance_pure(e0, e1) == Catch::Approx(1.0));
  CHECK(trace_distance_pure(e0, e0) == Catch::Approx(0.0).margin(1e-12));
  CHECK(swap_test_prob(e0, e1) == Catch::Approx(0.5));
  CHECK(swap_test_prob(e0, e0) == Catch::Approx(1.0));

  Rng rng(42);
  for (int t = 0; t < 30; ++t) {
    StateVector a = random_state(8, rng), b = random_state(8, rng), c = random_state(8, rng);
    double dab = trace_distance_pure(a, b), dbc = trace_distance_pure(b, c),
           dac = trace_distance_pure(a, c);
    CHECK(dac <= dab + dbc + 1e-12);  // triangle inequality
    CHECK(swap_test_prob(a, b) >= 0.5);
    CHECK(swap_test_prob(a, b) <= 1.0);
  }
}

TEST_CASE("swap test sampler matches its probability") {
  Rng rng(43);
  StateVector a = random_state(6, rng), b = random_state(6, rng);
  double p = swap_test_prob(a, b);
  int trials = 20000, acc = 0;
  for (int t = 0; t < trials; ++t) acc += swap_test(a, b, rng);
  double sigma = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(static_cast<double>(acc) / trials - p) < 4 * sigma + 1e-9);
}

TEST_CASE("nonuniformity examples and range") {
  Rng rng(44);
  Assignment a = rand_assignment(4, rng);
  CHECK(nonuniformity(proper_state(a, 4)) == Catch::Approx(0.0).margin(1e-12));
  CHECK(nonuniformity(basis_state(4, 1)) == Catch::Approx(0.75));
  for (int t = 0; t < 10000; ++t) {
    int n = 2 + static_cast<int>(rng.uniform_int(15));
    double nu = nonuniformity(random_state(n, rng));
    CHECK(nu >= 0.0);
    CHECK(nu <= 1.0 - 1.0 / n + 1e-12);
  }
}

TEST_CASE("impropriety examples") {
  Rng rng(45);
  Assignment a = rand_assignment(8, rng);
  CHECK(impropriety(proper_state(a, 8)) == Catch::Approx(0.0).margin(1e-9));
  // basis state: terms are |1 - r| and (n-1)|r|, minimized at r real positive
  int n = 8;
  double want = (1.0 - 1.0 / n) + (n - 1.0) / n;
  CHECK(impropriety(basis_state(n, 0)) == Catch::Approx(want).margin(1e-6));
  for (int t = 0; t < 200; ++t) {
    double imp = impropriety(random_state(6, rng));
    CHECK(imp >= -1e-12);
    CHECK(imp <= 2.0 + 1e-12);
  }
  // phase invariance: global phase does not change impropriety
  StateVector s = random_state(6, rng);
  std::vector<cplx> rot(s.amps());
  for (auto& amp : rot) amp *= std::polar(1.0, 1.234);
  CHECK(impropriety(StateVector(rot)) == Catch::Approx(impropriety(s)).margin(1e-7));
}

TEST_CASE("nearest proper state") {
  Rng rng(46);
  Assignment a = rand_assignment(16, rng);
  StateVector g = proper_state(a, 16);
  NearestProper np = nearest_proper(g);
  CHECK(np.dist == Catch::Approx(0.0).margin(1e-9));
  CHECK(std::abs(std::abs(inner(np.proper, g).real()) - 1.0) < 1e-9);

  // small perturbation of a proper state stays close
  std::vector<cplx> amps(g.amps());
  for (auto& amp : amps) amp += 0.01 * cplx(rng.normal(), rng.normal());
  double n2 = 0.0;
  for (auto& amp : amps) n2 += std::norm(amp);
  for (auto& amp : amps) amp /= std::sqrt(n2);
  StateVector pert(std::move(amps));
  NearestProper np2 = nearest_proper(pert);
  CHECK(np2.dist < 0.2);
  CHECK(np2.dist <= trace_distance_pure(pert, g) + 1e-9);

  // optimality against random proper states
  StateVector s = random_state(8, rng);
  NearestProper np3 = nearest_proper(s);
  for (int t = 0; t < 1000; ++t) {
    StateVector cand = proper_state(rand_assignment(8, rng), 8);
    CHECK(np3.dist <= trace_distance_pure(s, cand) + 1e-9);
  }
}

TEST_CASE("matching distribution closed forms") {
  // proper state, identity matching: same bits -> all mass on +, different -> -
  Assignment same(std::vector<std::uint8_t>{0, 0}), diff(std::vector<std::uint8_t>{0, 1});
  Matching m = Matching::identity(2);
  MatchingDistribution ds = matching_distribution(proper_state(same, 2), m);
  CHECK(ds.probs[0] == Catch::Approx(1.0));
  CHECK(ds.probs[1] == Catch::Approx(0.0).margin(1e-12));
  MatchingDistribution dd = matching_distribution(proper_state(diff, 2), m);
  CHECK(dd.probs[0] == Catch::Approx(0.0).margin(1e-12));
  CHECK(dd.probs[1] == Catch::Approx(1.0));

  // alpha_j = i alpha_i gives an even split on that edge
  StateVector si({cplx(1 / std::sqrt(2.0), 0), cplx(0, 1 / std::sqrt(2.0))});
  MatchingDistribution de = matching_distribution(si, m);
  CHECK(de.probs[0] == Catch::Approx(0.5));
  CHECK(de.probs[1] == Catch::Approx(0.5));

  // per-edge mass equals |alpha_i|^2 + |alpha_j|^2
  Rng rng(47);
  StateVector s = random_state(10, rng);
  Matching rm = random_matching(10, rng);
  MatchingDistribution d = matching_distribution(s, rm);
  for (std::size_t k = 0; k < d.outcomes.size(); k += 2) {
    const Edge& e = d.outcomes[k].edge;
    double mass = std::norm(s.amp(e.i)) + std::norm(s.amp(e.j));
    CHECK(d.probs[k] + d.probs[k + 1] == Catch::Approx(mass).margin(1e-12));
  }
}

TEST_CASE("measure_matching frequencies track the distribution") {
  Rng rng(48);
  StateVector s = random_state(6, rng);
  Matching m = Matching::identity(6);
  MatchingDistribution d = matching_distribution(s, m);
  std::map<std::pair<int, int>, int> counts;
  int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    MatchingOutcome o = measure_matching(s, m, rng);
    ++counts[{o.edge.i, o.sign}];
  }
  for (std::size_t k = 0; k < d.outcomes.size(); ++k) {
    double p = d.probs[k];
    double f = counts[{d.outcomes[k].edge.i, d.outcomes[k].sign}] / static_cast<double>(trials);
    double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) / trials);
    CHECK(std::abs(f - p) < 4 * sigma + 1e-3);
  }
}

TEST_CASE("close states give close acceptance statistics") {
  // |P(accept on A) - P(accept on B)| <= trace distance, for projective accepts
  Rng rng(49);
  for (int t = 0; t < 50; ++t) {
    StateVector a = random_state(6, rng);
    // small perturbation of a
    std::vector<cplx> amps(a.amps());
    for (auto& amp : amps) amp += 0.05 * cplx(rng.normal(), rng.normal());
    double n2 = 0.0;
    for (auto& amp : amps) n2 += std::norm(amp);
    for (auto& amp : amps) amp /= std::sqrt(n2);
    StateVector b(std::move(amps));
    double dist = trace_distance_pure(a, b);
    // random rank-3 projector via three orthonormal vectors (Gram-Schmidt)
    std::vector<StateVector> basis;
    while (basis.size() < 3) {
      StateVector v = random_state(6, rng);
      std::vector<cplx> w(v.amps());
      for (const auto& u : basis) {
        cplx ov = inner(u, v);
        for (int i = 0; i < 6; ++i) w[static_cast<std::size_t>(i)] -= ov * u.amp(i);
      }
      double m2 = 0.0;
      for (auto& x : w) m2 += std::norm(x);
      if (m2 < 1e-6) continue;
      for (auto& x : w) x /= std::sqrt(m2);
      basis.push_back(StateVector(std::move(w)));
    }
    double pa = 0.0, pb = 0.0;
    for (const auto& u : basis) {
      pa += std::norm(inner(u, a));
      pb += std::norm(inner(u, b));
    }
    CHECK(std::abs(pa - pb) <= dist + 1e-9);
  }
}

TEST_CASE("random matching distribution and determinism") {
  Rng r1(50), r2(50);
  Matching a = random_matching(8, r1), b = random_matching(8, r2);
  CHECK(a.edges() == b.edges());
  Rng r3(51);
  CHECK_THROWS_AS(random_matching(5, r3), input_error);
  CHECK(random_matching(2, r3).edges() == std::vector<Edge>{{0, 1}});

  // N=4 has 3 matchings, uniform: chi-square at 1% (df=2 critical 9.21)
  std::map<std::vector<Edge>, int> counts;
  int trials = 9000;
  for (int t = 0; t < trials; ++t) ++counts[random_matching(4, r3).edges()];
  CHECK(counts.size() == 3);
  double chi2 = 0.0;
  for (const auto& [k, v] : counts) chi2 += (v - 3000.0) * (v - 3000.0) / 3000.0;
  CHECK(chi2 < 9.21);
}

TEST_CASE("matching validation") {
  CHECK_THROWS_AS(Matching({{1, 0}}), input_error);
  CHECK_THROWS_AS(Matching({{0, 1}, {1, 2}}), input_error);
  CHECK_THROWS_AS(Matching({{0, 5}}), input_error);
}

TEST_CASE("state serialization round trip is bit exact") {
  Rng rng(52);
  StateVector s = random_state(7, rng);
  std::ostringstream out;
  write_state(out, s);
  std::istringstream in(out.str());
  StateVector back = read_state(in);
  REQUIRE(back.dim() == s.dim());
  for (int i = 0; i < s.dim(); ++i) {
    CHECK(back.amp(i).real() == s.amp(i).real());
    CHECK(back.amp(i).imag() == s.amp(i).imag());
  }
  std::istringstream bad("statevector v2 2\n0 0\n1 0\n");
  CHECK_THROWS_AS(read_state(bad), input_error);
  std::istringstream trunc("statevector v1 2\n1 0\n");
  CHECK_THROWS_AS(read_state(trunc), input_error);
}
