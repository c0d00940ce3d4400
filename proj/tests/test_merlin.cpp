#include "catch2/catch_amalgamated.hpp"

#include "unent/merlin.hpp"

using namespace unent;

namespace {

Assignment rand_assignment(int n, Rng& rng) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  for (auto& b : bits) b = rng.bernoulli(0.5);
  return Assignment(std::move(bits));
}

}  // namespace

TEST_CASE("honest bundle is k copies of the proper state") {
  Rng rng(61);
  Assignment a = rand_assignment(8, rng);
  WitnessBundle b = honest_bundle(a, 5);
  CHECK(b.k() == 5);
  CHECK(b.dim() == 8);
  check_bundle(b);
  StateVector g = proper_state(a, 8);
  for (const auto& w : b.witnesses) {
    CHECK(std::norm(inner(w, g)) == Catch::Approx(1.0));
    CHECK(nonuniformity(w) == Catch::Approx(0.0).margin(1e-12));
  }
}

TEST_CASE("bundle validation") {
  WitnessBundle empty;
  CHECK_THROWS_AS(check_bundle(empty), input_error);
  WitnessBundle mixed;
  mixed.witnesses.push_back(StateVector({cplx(1, 0)}));
  mixed.witnesses.push_back(StateVector({cplx(1, 0), cplx(0, 0)}));
  CHECK_THROWS_AS(check_bundle(mixed), input_error);
}

TEST_CASE("concentrated adversary nonuniformity") {
  Rng rng(62);
  int n = 16;
  // support of size m: NU = (1/2)(m |1/m - 1/n| + (n-m)/n) = 1 - m/n
  for (int m : {1, 8, 16}) {
    std::vector<int> support;
    for (int i = 0; i < m; ++i) support.push_back(i);
    WitnessBundle b = adversary_concentrated(support, n, 3, rng);
    check_bundle(b);
    CHECK(b.k() == 3);
    double want = 1.0 - static_cast<double>(m) / n;
    CHECK(nonuniformity(b.witnesses[0]) == Catch::Approx(want).margin(1e-12));
    // identical copies
    CHECK(std::norm(inner(b.witnesses[0], b.witnesses[2])) == Catch::Approx(1.0));
  }
  CHECK_THROWS_AS(adversary_concentrated({}, n, 1, rng), input_error);
  CHECK_THROWS_AS(adversary_concentrated({n}, n, 1, rng), input_error);
}

TEST_CASE("phased adversary") {
  Rng rng(63);
  Assignment a = rand_assignment(16, rng);
  WitnessBundle zero = adversary_phased(a, 0.0, 2, rng);
  CHECK(std::norm(inner(zero.witnesses[0], proper_state(a, 16))) == Catch::Approx(1.0));

  WitnessBundle noisy = adversary_phased(a, 1.5, 2, rng);
  // phases keep magnitudes uniform but break properness
  CHECK(nonuniformity(noisy.witnesses[0]) == Catch::Approx(0.0).margin(1e-12));
  CHECK(impropriety(noisy.witnesses[0]) > 0.1);
  CHECK_THROWS_AS(adversary_phased(a, -0.1, 1, rng), input_error);
}

TEST_CASE("nonidentical adversary stays within the overlap ball") {
  Rng rng(64);
  Assignment a = rand_assignment(16, rng);
  StateVector base = proper_state(a, 16);
  double delta = 0.05;
  WitnessBundle b = adversary_nonidentical(base, delta, 6, rng);
  CHECK(b.k() == 6);
  bool all_same = true;
  for (const auto& w : b.witnesses) {
    CHECK(std::abs(inner(base, w)) >= 1.0 - delta - 1e-12);
    CHECK(trace_distance_pure(base, w) <= std::sqrt(2.0 * delta) + 1e-12);
    all_same = all_same && std::norm(inner(base, w)) > 1.0 - 1e-12;
  }
  CHECK_FALSE(all_same);

  WitnessBundle exact = adversary_nonidentical(base, 0.0, 3, rng);
  for (const auto& w : exact.witnesses) CHECK(std::norm(inner(base, w)) == Catch::Approx(1.0));
  CHECK_THROWS_AS(adversary_nonidentical(base, 1.5, 1, rng), input_error);
}

TEST_CASE("adversaries are deterministic under a fixed seed") {
  Assignment a(std::vector<std::uint8_t>{0, 1, 1, 0, 1, 0, 0, 1});
  Rng r1(7), r2(7);
  WitnessBundle b1 = adversary_phased(a, 0.8, 3, r1);
  WitnessBundle b2 = adversary_phased(a, 0.8, 3, r2);
  for (int w = 0; w < 3; ++w)
    for (int i = 0; i < 8; ++i) CHECK(b1.witnesses[static_cast<std::size_t>(w)].amp(i) == b2.witnesses[static_cast<std::size_t>(w)].amp(i));
}

TEST_CASE("bundle manifest serialization") {
  BundleManifest m;
  m.strategy = "phased";
  m.k = 4;
  m.n = 16;
  m.seed = 99;
  m.params = {{"sigma", 0.5}};
  nlohmann::json j = manifest_to_json(m);
  CHECK(j.at("schema") == "bundle-manifest-v1");
  CHECK(j.at("k") == 4);
  CHECK(j.at("params").at("sigma") == 0.5);
}
