#pragma once

// Lemma-check battery shared by the `lemmas` subcommand and the test suites.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "unent/amplification.hpp"
#include "unent/analysis.hpp"
#include "unent/common.hpp"
#include "unent/state.hpp"

namespace unent {

struct CheckResult {
  std::string name;
  std::string status;  // "pass", "fail", or "skip"
  nlohmann::json info;
};

inline StateVector random_state(int n, Rng& rng) {
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

inline DiscreteDistribution random_distribution(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  for (auto& x : w) x = -std::log(1.0 - rng.uniform01());
  return DiscreteDistribution::from_weights(std::move(w));
}

inline CheckResult check_sort_inequality_sweep(std::uint64_t trials, std::uint64_t seed) {
  std::uint64_t fails = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, 101, t);
    std::size_t len = 1 + rng.uniform_int(64);
    std::vector<double> p(len);
    for (auto& x : p) x = rng.uniform01() * (rng.bernoulli(0.5) ? 10.0 : 0.1);
    if (!check_sort_inequality(p).holds) ++fails;
  }
  return {"sort-inequality", fails == 0 ? "pass" : "fail", {{"trials", trials}, {"violations", fails}}};
}

inline CheckResult check_overlap_bound_sweep(std::uint64_t trials, std::uint64_t seed) {
  std::uint64_t fails = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, 102, t);
    std::size_t n = 2 + rng.uniform_int(30);
    auto d1 = random_distribution(n, rng);
    auto d2 = random_distribution(n, rng);
    if (!overlap_bound(d1, d2).holds) ++fails;
  }
  return {"overlap-bound", fails == 0 ? "pass" : "fail", {{"trials", trials}, {"violations", fails}}};
}

inline CheckResult check_conditional_variation_sweep(std::uint64_t trials, std::uint64_t seed) {
  std::uint64_t fails = 0, vacuous = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, 103, t);
    std::size_t n = 2 + rng.uniform_int(16);
    auto d1 = random_distribution(n, rng);
    auto d2 = random_distribution(n, rng);
    std::vector<char> ev(n, 0);
    bool any = false;
    for (auto& e : ev) {
      e = rng.bernoulli(0.6);
      any = any || e;
    }
    if (!any) ev[0] = 1;
    auto rep = conditional_variation(d1, d2, ev);
    if (rep.vacuous)
      ++vacuous;
    else if (!rep.holds)
      ++fails;
  }
  return {"conditional-variation", fails == 0 ? "pass" : "fail",
          {{"trials", trials}, {"violations", fails}, {"vacuous", vacuous}}};
}

inline CheckResult check_unbalanced_transfer_sweep(std::uint64_t trials, std::uint64_t seed) {
  std::uint64_t fails = 0;
  const double c = 0.3, cp = 0.1;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, 104, t);
    std::size_t n = 2 + rng.uniform_int(12);
    std::vector<double> p(n), q(n);
    double sum = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      double s = 0.05 + rng.uniform01();
      double alpha = 0.2 + 0.6 * rng.uniform01();  // 2a(1-a) >= 0.32 > c
      p[x] = alpha * s;
      q[x] = (1.0 - alpha) * s;
      sum += s;
    }
    for (std::size_t x = 0; x < n; ++x) {
      p[x] /= sum;
      q[x] /= sum;
    }
    PairedDistribution base(p, q);
    // random perturbation with a small budget, then renormalize
    double lambda = 0.2 * rng.uniform01();
    std::vector<double> p2(n), q2(n);
    double sum2 = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      p2[x] = (1.0 - lambda) * p[x] + lambda * rng.uniform01();
      q2[x] = (1.0 - lambda) * q[x] + lambda * rng.uniform01();
      sum2 += p2[x] + q2[x];
    }
    for (std::size_t x = 0; x < n; ++x) {
      p2[x] /= sum2;
      q2[x] /= sum2;
    }
    if (!check_unbalanced_transfer(base, PairedDistribution(p2, q2), c, cp).holds) ++fails;
  }
  return {"unbalanced-transfer", fails == 0 ? "pass" : "fail",
          {{"trials", trials}, {"violations", fails}, {"c", c}, {"c_prime", cp}}};
}

inline CheckResult check_heavy_light_sweep(std::uint64_t trials, std::uint64_t seed) {
  std::uint64_t fails = 0, skipped = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, 105, t);
    std::size_t n = 4 + rng.uniform_int(60);
    auto p = random_distribution(n, rng);
    double nu = 0.0;
    for (std::size_t i = 0; i < n; ++i) nu += std::abs(p[i] - 1.0 / static_cast<double>(n));
    nu *= 0.5;
    if (nu < 1e-3) {
      ++skipped;
      continue;
    }
    try {
      heavy_light_decompose(p, 0.9 * nu);
    } catch (const check_error&) {
      ++fails;
    }
  }
  return {"heavy-light", fails == 0 ? "pass" : "fail",
          {{"trials", trials}, {"violations", fails}, {"skipped", skipped}}};
}

// Two jittered antipodal clusters: admissible for the sector lemma with
// kappa = 0.5 and small radial noise.
inline std::vector<Vec2> random_sector_family(Rng& rng, std::size_t size = 200) {
  const double two_pi = 6.283185307179586476925287;
  double base = two_pi * rng.uniform01();
  double frac = 0.3 + 0.4 * rng.uniform01();
  std::vector<Vec2> v;
  for (std::size_t i = 0; i < size; ++i) {
    double ang = base + (static_cast<double>(i) / size < frac ? 0.0 : 3.141592653589793);
    ang += 0.2 * (rng.uniform01() - 0.5);
    double r = 1.0 + 0.04 * (rng.uniform01() - 0.5);
    v.push_back({r * std::cos(ang), r * std::sin(ang)});
  }
  return v;
}

inline CheckResult check_sector_split_sweep(std::uint64_t trials, std::uint64_t seed) {
  const double kappa = 0.5, delta = 0.05;
  std::uint64_t fails = 0, inadmissible = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, 106, t);
    auto v = random_sector_family(rng);
    try {
      auto split = sector_split(v, kappa, delta, 2000);
      double floor = kappa * static_cast<double>(v.size()) / 40.0;
      bool ok = static_cast<double>(split.x.size()) >= floor &&
                static_cast<double>(split.y.size()) >= floor &&
                split.min_distance >= kappa / 20.0;
      if (!ok) ++fails;
    } catch (const precondition_error&) {
      ++inadmissible;
    }
  }
  return {"sector-split", fails == 0 ? "pass" : "fail",
          {{"trials", trials}, {"violations", fails}, {"inadmissible", inadmissible}}};
}

// Engineered mildly nonuniform distributions for the collision floor: 25
// outcomes at 0.03, 75 at 1/300; identical across draws so every pairwise
// variation distance is 0 <= 1/10.
inline std::vector<DiscreteDistribution> birthday_engineered(int k) {
  std::vector<double> p(100);
  for (std::size_t i = 0; i < 25; ++i) p[i] = 0.03;
  for (std::size_t i = 25; i < 100; ++i) p[i] = 0.25 / 75.0;
  DiscreteDistribution d(p);
  return std::vector<DiscreteDistribution>(static_cast<std::size_t>(k), d);
}

inline CheckResult check_birthday_suite(std::uint64_t seed) {
  nlohmann::json info;
  bool ok = true;

  double classic = collision_prob_uniform_iid(365, 23);
  info["classic"] = classic;
  ok = ok && classic >= 0.506 && classic <= 0.508;

  auto dists = birthday_engineered(320);
  double ey = expected_colliding_pairs(dists);
  double formula = 0.5 * 320.0 * 319.0 * 0.81 / 100.0;
  info["expected_pairs"] = ey;
  info["formula_bound"] = formula;
  ok = ok && ey >= 900.0 && ey >= formula;

  Rng rng = Rng::substream(seed, 107);
  auto mc = birthday_collision_mc(dists, 10000, rng);
  info["mc_frequency"] = mc.frequency;
  ok = ok && mc.frequency >= 0.5;

  // uniform minimizes collisions at equal (n, K), exact enumeration
  Rng rng2 = Rng::substream(seed, 108);
  bool uniform_min = true;
  for (int rep = 0; rep < 20; ++rep) {
    int n = 3 + static_cast<int>(rng2.uniform_int(4));
    int k = 2 + static_cast<int>(rng2.uniform_int(3));
    auto d = random_distribution(static_cast<std::size_t>(n), rng2);
    std::vector<DiscreteDistribution> nonuni(static_cast<std::size_t>(k), d);
    std::vector<DiscreteDistribution> uni(static_cast<std::size_t>(k),
                                          DiscreteDistribution::uniform(static_cast<std::size_t>(n)));
    if (birthday_collision_exact(uni) > birthday_collision_exact(nonuni) + 1e-12)
      uniform_min = false;
  }
  info["uniform_minimizes"] = uniform_min;
  ok = ok && uniform_min;

  return {"birthday", ok ? "pass" : "fail", info};
}

inline Matrix4 random_local_unitary(Rng& rng) {
  auto rand_u2 = [&rng]() {
    Eigen::Matrix2cd g;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(g);
    Eigen::Matrix2cd q = qr.householderQ();
    return q;
  };
  Eigen::Matrix2cd u = rand_u2(), v = rand_u2();
  Matrix4 out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) out(2 * a + b, 2 * c + d) = u(a, c) * v(b, d);
  return out;
}

inline TwoQubitDensity random_density(Rng& rng) {
  Matrix4 g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
  Matrix4 m = g * g.adjoint();
  return TwoQubitDensity(m / m.trace().real());
}

inline CheckResult check_ef_ppt_agreement(std::uint64_t trials, std::uint64_t seed) {
  std::uint64_t disagreements = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, 109, t);
    TwoQubitDensity rho = random_density(rng);
    bool sep_ppt = ppt_separable(rho, 1e-8);
    bool sep_ef = ef_two_qubit(rho) <= 1e-8;
    if (sep_ppt != sep_ef) ++disagreements;
  }
  return {"ef-ppt-agreement", disagreements == 0 ? "pass" : "fail",
          {{"trials", trials}, {"disagreements", disagreements}}};
}

inline CheckResult check_low_entanglement_sweep(std::uint64_t trials, std::uint64_t seed) {
  std::uint64_t fails = 0;
  double worst_slack = 1e9;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, 110, t);
    double p = 0.45 * rng.uniform01();
    Matrix4 u = random_local_unitary(rng);
    TwoQubitDensity rho(u * werner(p).mat() * u.adjoint());
    double eps = std::max(ef_two_qubit(rho), 1e-9);
    auto rep = check_low_entanglement_distance(rho, eps);
    if (!rep.holds) ++fails;
    worst_slack = std::min(worst_slack, rep.bound - rep.distance);
  }
  return {"low-entanglement-distance", fails == 0 ? "pass" : "fail",
          {{"trials", trials}, {"violations", fails}, {"worst_slack", worst_slack}}};
}

inline CheckResult check_measurement_growth_sweep(std::uint64_t trials, std::uint64_t seed) {
  std::uint64_t fails = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, 111, t);
    Eigen::Vector2cd a, b;
    for (int i = 0; i < 2; ++i) {
      a(i) = cplx(rng.normal(), rng.normal());
      b(i) = cplx(rng.normal(), rng.normal());
    }
    a.normalize();
    b.normalize();
    // random complete rank-1 measurement from a Haar-ish unitary
    Matrix4 g;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = cplx(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Matrix4> qr(g);
    Matrix4 q = qr.householderQ();
    std::vector<Matrix4> kraus;
    for (int k = 0; k < 4; ++k) {
      Vector4 col = q.col(k);
      kraus.push_back(col * col.adjoint());
    }
    if (!check_measurement_growth(a, b, kraus, 1).holds) ++fails;
  }
  return {"measurement-growth", fails == 0 ? "pass" : "fail",
          {{"trials", trials}, {"violations", fails}}};
}

inline CheckResult check_werner_threshold() {
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-9) {
    double mid = 0.5 * (lo + hi);
    if (ppt_separable(werner(mid), 0.0))
      lo = mid;
    else
      hi = mid;
  }
  double thr = 0.5 * (lo + hi);
  bool ok = std::abs(thr - 1.0 / 3.0) <= 1e-6;
  return {"werner-threshold", ok ? "pass" : "fail", {{"threshold", thr}}};
}

inline std::vector<CheckResult> run_lemma_battery(std::uint64_t seed, double scale = 1.0) {
  auto n = [scale](std::uint64_t base) {
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(base * scale));
  };
  std::vector<CheckResult> out;
  out.push_back(check_sort_inequality_sweep(n(100000), seed));
  out.push_back(check_overlap_bound_sweep(n(10000), seed));
  out.push_back(check_conditional_variation_sweep(n(10000), seed));
  out.push_back(check_unbalanced_transfer_sweep(n(10000), seed));
  out.push_back(check_heavy_light_sweep(n(10000), seed));
  out.push_back(check_sector_split_sweep(n(1000), seed));
  out.push_back(check_birthday_suite(seed));
  out.push_back(check_ef_ppt_agreement(n(10000), seed));
  out.push_back(check_low_entanglement_sweep(n(1000), seed));
  out.push_back(check_measurement_growth_sweep(n(1000), seed));
  out.push_back(check_werner_threshold());
  return out;
}

}  // namespace unent
