#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "unent/common.hpp"
#include "unent/state.hpp"

namespace unent {

// Finite probability distribution. Entries nonnegative, total 1 within 1e-12.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> p) : p_(std::move(p)) {
    double sum = 0.0;
    for (double x : p_) {
      if (x < 0.0) throw input_error("negative probability");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw input_error("probabilities must sum to 1");
  }
  static DiscreteDistribution from_weights(std::vector<double> w) {
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (sum <= 0.0) throw input_error("weights must have positive sum");
    for (double& x : w) x /= sum;
    return DiscreteDistribution(std::move(w));
  }
  static DiscreteDistribution uniform(std::size_t n) {
    return DiscreteDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }
  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }

  std::size_t sample(Rng& rng) const {
    double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p_.size(); ++i) {
      acc += p_[i];
      if (u < acc) return i;
    }
    return p_.size() - 1;
  }

 private:
  std::vector<double> p_;
};

inline double total_variation(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  if (a.size() != b.size()) throw input_error("distribution size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

// ---- matching edges: disagreement probability and unbalancedness ----

struct EdgeStats {
  Edge edge;
  double pair_mass = 0.0;     // |a_i|^2 + |a_j|^2
  double disagreement = 0.0;  // p_ij = 2 P+ P- / (P+ + P-)^2, in [0, 1/2]
};

// p_ij, with the zero-pair-mass convention p_ij = 0 (such edges never produce
// outcomes).
inline double disagreement_prob(const StateVector& s, const Edge& e) {
  cplx ai = s.amp(e.i), aj = s.amp(e.j);
  double pp = 0.5 * std::norm(ai + aj);
  double pm = 0.5 * std::norm(ai - aj);
  double mass = pp + pm;
  if (mass <= 0.0) return 0.0;
  return 2.0 * pp * pm / (mass * mass);
}

struct UnbalancedSet {
  std::vector<EdgeStats> edges;  // the threshold-unbalanced edges
  double largeness = 0.0;        // total pair mass over the set
};

// Edges whose endpoint squared amplitudes differ enough:
// |a_i^2 - a_j^2|^2 >= 2 * threshold * (pair mass)^2, equivalently
// p_ij >= threshold. Zero-mass edges are excluded.
inline UnbalancedSet unbalanced_set(const StateVector& s, const Matching& m, double threshold) {
  UnbalancedSet out;
  for (const auto& e : m.edges()) {
    cplx ai = s.amp(e.i), aj = s.amp(e.j);
    double mass = std::norm(ai) + std::norm(aj);
    if (mass <= 0.0) continue;
    double diff2 = std::norm(ai * ai - aj * aj);
    if (diff2 >= 2.0 * threshold * mass * mass) {
      out.edges.push_back({e, mass, disagreement_prob(s, e)});
      out.largeness += mass;
    }
  }
  return out;
}

struct FrequencyReport {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double frequency = 0.0;
  WilsonInterval wilson{0.0, 1.0};
};

// Monte-Carlo frequency, over random matchings, of the event that the
// (c * eps^8)-unbalanced edge set carries at least d * eps^4 pair mass.
// Precondition: s is eps-far from every proper state.
inline FrequencyReport check_matching_theorem(const StateVector& s, double eps, double c,
                                              double d, std::uint64_t trials, Rng& rng) {
  if (nearest_proper(s).dist < eps)
    throw precondition_error("state is not eps-far from the proper states");
  double threshold = c * std::pow(eps, 8);
  double floor = d * std::pow(eps, 4);
  FrequencyReport rep;
  rep.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Matching m = random_matching(s.dim(), rng);
    if (unbalanced_set(s, m, threshold).largeness >= floor) ++rep.successes;
  }
  rep.frequency = static_cast<double>(rep.successes) / static_cast<double>(trials);
  rep.wilson = wilson95(rep.successes, rep.trials);
  return rep;
}

// ---- heavy/light decomposition ----

struct HeavyLight {
  std::vector<std::size_t> heavy, very_heavy, light, very_light;  // H, H*, L, L*
  double very_heavy_weight = 0.0;                                 // W_{H*}
};

// Splits [N] by comparing p_i to 1/N with margins kappa/2 and kappa/4, and
// asserts |L*| >= kappa N / 2 and W_{H*} >= kappa / 2. Requires the
// distribution to be kappa-nonuniform.
inline HeavyLight heavy_light_decompose(const DiscreteDistribution& p, double kappa) {
  std::size_t n = p.size();
  double nu = 0.0;
  for (std::size_t i = 0; i < n; ++i) nu += std::abs(p[i] - 1.0 / static_cast<double>(n));
  nu *= 0.5;
  if (nu < kappa) throw precondition_error("distribution is not kappa-nonuniform");
  HeavyLight hl;
  double u = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] >= u) {
      hl.heavy.push_back(i);
      if (p[i] >= (1.0 + kappa / 2.0) * u) {
        hl.very_heavy.push_back(i);
        hl.very_heavy_weight += p[i];
      }
    } else {
      hl.light.push_back(i);
      if (p[i] <= (1.0 - kappa / 4.0) * u) hl.very_light.push_back(i);
    }
  }
  if (static_cast<double>(hl.very_light.size()) < kappa * static_cast<double>(n) / 2.0 - 1e-9)
    throw check_error("very-light set smaller than kappa N / 2");
  if (hl.very_heavy_weight < kappa / 2.0 - 1e-12)
    throw check_error("very-heavy weight below kappa / 2");
  return hl;
}

// ---- sector split of near-unit plane vectors ----

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline double vec2_dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct SectorSplit {
  std::vector<std::size_t> x, y;  // indices into V
  int sectors = 0;                // number of angular sectors used
  double min_distance = 0.0;      // min over pairs (x in X, y in Y)
};

// Picks the densest of K in [30/kappa, 40/kappa] half-open angular sectors as
// X and everything outside its 3-sector neighborhood as Y. Preconditions:
// all norms within delta of 1 (delta <= kappa/2), and V far from every unit
// vector w (checked on a dense grid of unit vectors; the objective is
// 1-Lipschitz in w per vector, so the grid spacing bounds the check error).
inline SectorSplit sector_split(const std::vector<Vec2>& v, double kappa, double delta,
                                int grid = 10000) {
  if (v.empty()) throw input_error("empty vector family");
  if (kappa <= 0.0 || kappa > 2.0) throw input_error("kappa must lie in (0, 2]");
  if (delta > kappa / 2.0) throw precondition_error("delta exceeds kappa / 2");
  for (const auto& p : v) {
    double nrm = std::hypot(p.x, p.y);
    if (nrm < 1.0 - delta - 1e-12 || nrm > 1.0 + delta + 1e-12)
      throw precondition_error("vector norm outside [1-delta, 1+delta]");
  }
  const double two_pi = 6.283185307179586476925287;
  for (int g = 0; g < grid; ++g) {
    double ang = two_pi * g / grid;
    Vec2 w{std::cos(ang), std::sin(ang)};
    double sum = 0.0;
    for (const auto& p : v) sum += vec2_dist(p, w);
    if (sum < kappa * static_cast<double>(v.size()))
      throw precondition_error("family is not kappa-far from every unit vector");
  }

  int k = static_cast<int>(std::ceil(30.0 / kappa));
  if (static_cast<double>(k) > 40.0 / kappa)
    throw construction_error("no admissible sector count");
  std::vector<int> sector(v.size());
  std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double ang = std::atan2(v[i].y, v[i].x);
    if (ang < 0) ang += two_pi;
    int s = static_cast<int>(ang / (two_pi / k));
    if (s >= k) s = k - 1;
    sector[i] = s;
    ++count[static_cast<std::size_t>(s)];
  }
  int dense = static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());

  SectorSplit out;
  out.sectors = k;
  int prev = (dense + k - 1) % k, next = (dense + 1) % k;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (sector[i] == dense)
      out.x.push_back(i);
    else if (sector[i] != prev && sector[i] != next)
      out.y.push_back(i);
  }
  out.min_distance = 4.0;
  for (std::size_t a : out.x)
    for (std::size_t b : out.y) out.min_distance = std::min(out.min_distance, vec2_dist(v[a], v[b]));
  if (out.y.empty()) out.min_distance = 0.0;
  return out;
}

// ---- conditioning bounds ----

struct ConditionalVariationReport {
  double kappa = 0.0;        // ||D1 - D2||
  double a = 0.0;            // P_{D1}[E]
  double conditioned = 0.0;  // ||D1' - D2'||
  double bound = 0.0;        // kappa / (a - kappa)
  bool vacuous = false;      // a <= kappa: bound carries no information
  bool holds = true;
};

inline ConditionalVariationReport conditional_variation(const DiscreteDistribution& d1,
                                                        const DiscreteDistribution& d2,
                                                        const std::vector<char>& event) {
  if (event.size() != d1.size() || d1.size() != d2.size())
    throw input_error("event/distribution size mismatch");
  ConditionalVariationReport rep;
  rep.kappa = total_variation(d1, d2);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < d1.size(); ++i)
    if (event[i]) {
      a += d1[i];
      b += d2[i];
    }
  rep.a = a;
  if (a <= rep.kappa || b <= 0.0) {
    rep.vacuous = true;
    rep.bound = 0.0;
    rep.conditioned = 0.0;
    return rep;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < d1.size(); ++i)
    if (event[i]) tv += std::abs(d1[i] / a - d2[i] / b);
  rep.conditioned = 0.5 * tv;
  rep.bound = rep.kappa / (a - rep.kappa);
  rep.holds = rep.conditioned <= rep.bound + 1e-12;
  return rep;
}

// ---- transfer of unbalancedness under perturbation ----

struct PairedDistribution {
  std::vector<double> p, q;  // over [N] x {0,1}; sum of all entries = 1

  PairedDistribution(std::vector<double> pp, std::vector<double> qq)
      : p(std::move(pp)), q(std::move(qq)) {
    if (p.size() != q.size()) throw input_error("paired distribution size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] < 0.0 || q[i] < 0.0) throw input_error("negative probability");
      sum += p[i] + q[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) throw input_error("probabilities must sum to 1");
  }
  std::size_t size() const { return p.size(); }
};

struct UnbalancedTransferReport {
  double mu = 0.0;    // ||D - D'||
  double mass = 0.0;  // sum over S of p' + q'
  double bound = 0.0; // 1 - 8 mu / (c - 2c')
  bool holds = true;
};

// Every x of D is c-unbalanced (2 p q >= c (p+q)^2); S collects the x that
// remain c'-unbalanced under D'. Asserts the retained mass bound.
inline UnbalancedTransferReport check_unbalanced_transfer(const PairedDistribution& d,
                                                          const PairedDistribution& dp,
                                                          double c, double cp) {
  if (!(c > 0.0 && c < 0.5)) throw input_error("c must lie in (0, 1/2)");
  if (!(cp > 0.0 && cp < c / 2.0)) throw input_error("c' must lie in (0, c/2)");
  if (d.size() != dp.size()) throw input_error("paired distribution size mismatch");
  for (std::size_t x = 0; x < d.size(); ++x) {
    double s = d.p[x] + d.q[x];
    if (2.0 * d.p[x] * d.q[x] < c * s * s - 1e-15)
      throw precondition_error("base distribution is not c-unbalanced everywhere");
  }
  UnbalancedTransferReport rep;
  double l1 = 0.0;
  for (std::size_t x = 0; x < d.size(); ++x)
    l1 += std::abs(d.p[x] - dp.p[x]) + std::abs(d.q[x] - dp.q[x]);
  rep.mu = 0.5 * l1;
  for (std::size_t x = 0; x < d.size(); ++x) {
    double s = dp.p[x] + dp.q[x];
    if (2.0 * dp.p[x] * dp.q[x] >= cp * s * s) rep.mass += s;
  }
  rep.bound = 1.0 - 8.0 * rep.mu / (c - 2.0 * cp);
  rep.holds = rep.mass >= rep.bound - 1e-12;
  return rep;
}

// ---- birthday collisions ----

// Exact collision probability for K iid uniform draws over [n].
inline double collision_prob_uniform_iid(int n, int k) {
  double no_col = 1.0;
  for (int i = 0; i < k; ++i) no_col *= 1.0 - static_cast<double>(i) / static_cast<double>(n);
  return 1.0 - no_col;
}

// E[number of colliding pairs] = sum_{i<j} sum_x p_i(x) p_j(x).
inline double expected_colliding_pairs(const std::vector<DiscreteDistribution>& dists) {
  double e = 0.0;
  for (std::size_t i = 0; i < dists.size(); ++i)
    for (std::size_t j = i + 1; j < dists.size(); ++j) {
      double o = 0.0;
      for (std::size_t x = 0; x < dists[i].size(); ++x) o += dists[i][x] * dists[j][x];
      e += o;
    }
  return e;
}

// Exact P[some two draws agree] for independent draws, by enumerating outcome
// tuples. Budget-capped.
inline double birthday_collision_exact(const std::vector<DiscreteDistribution>& dists,
                                       std::uint64_t budget = 10000000ULL) {
  std::size_t k = dists.size();
  if (k < 2) return 0.0;
  std::size_t n = dists.front().size();
  double tuples = std::pow(static_cast<double>(n), static_cast<double>(k));
  if (tuples > static_cast<double>(budget)) throw refusal_error("exact enumeration budget exceeded");
  double p_col = 0.0;
  std::vector<std::size_t> idx(k, 0);
  for (;;) {
    double p = 1.0;
    for (std::size_t i = 0; i < k; ++i) p *= dists[i][idx[i]];
    if (p > 0.0) {
      bool col = false;
      for (std::size_t i = 0; i < k && !col; ++i)
        for (std::size_t j = i + 1; j < k && !col; ++j)
          if (idx[i] == idx[j]) col = true;
      if (col) p_col += p;
    }
    std::size_t carry = k;
    while (carry > 0 && ++idx[carry - 1] == n) {
      idx[carry - 1] = 0;
      --carry;
    }
    if (carry == 0) break;
  }
  return p_col;
}

inline FrequencyReport birthday_collision_mc(const std::vector<DiscreteDistribution>& dists,
                                             std::uint64_t trials, Rng& rng) {
  // per-distribution cdf for fast inversion
  std::vector<std::vector<double>> cdfs;
  for (const auto& d : dists) {
    std::vector<double> c(d.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      acc += d[i];
      c[i] = acc;
    }
    cdfs.push_back(std::move(c));
  }
  std::size_t n = dists.empty() ? 0 : dists.front().size();
  FrequencyReport rep;
  rep.trials = trials;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> touched;
  for (std::uint64_t t = 0; t < trials; ++t) {
    bool col = false;
    touched.clear();
    for (const auto& cdf : cdfs) {
      double u = rng.uniform01();
      std::size_t x = static_cast<std::size_t>(
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (x >= n) x = n - 1;
      if (seen[x]) {
        col = true;
        break;
      }
      seen[x] = 1;
      touched.push_back(x);
    }
    for (std::size_t x : touched) seen[x] = 0;
    if (col) ++rep.successes;
  }
  rep.frequency = static_cast<double>(rep.successes) / static_cast<double>(trials);
  rep.wilson = wilson95(rep.successes, rep.trials);
  return rep;
}

// 4-wise independent sequence over [n] via a random cubic polynomial over a
// prime field (Mersenne prime 2^61 - 1). Exposes the theorem's stated
// independence assumption without full independence.
class FourwiseSequence {
 public:
  FourwiseSequence(std::uint64_t n, Rng& rng) : n_(n) {
    for (auto& c : coef_) c = rng.uniform_int(kP);
  }
  std::uint64_t value(std::uint64_t i) const {
    std::uint64_t x = i % kP;
    std::uint64_t h = coef_[3];
    for (int d = 2; d >= 0; --d) h = add(mul(h, x), coef_[static_cast<std::size_t>(d)]);
    return h % n_;
  }

 private:
  static constexpr std::uint64_t kP = (1ULL << 61) - 1;
  static std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a + b;
    return s >= kP ? s - kP : s;
  }
  static std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    std::uint64_t lo = static_cast<std::uint64_t>(p & kP);
    std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
    std::uint64_t s = lo + hi;
    return s >= kP ? s - kP : s;
  }
  std::uint64_t n_;
  std::array<std::uint64_t, 4> coef_{};
};

// Collision frequency for K draws produced by a fresh 4-wise independent
// sequence per trial (indices 0..K-1, values in [n]).
inline FrequencyReport birthday_collision_fourwise(std::uint64_t n, std::uint64_t k,
                                                   std::uint64_t trials, Rng& rng) {
  FrequencyReport rep;
  rep.trials = trials;
  std::vector<char> seen(n, 0);
  std::vector<std::uint64_t> touched;
  for (std::uint64_t t = 0; t < trials; ++t) {
    FourwiseSequence seq(n, rng);
    bool col = false;
    touched.clear();
    for (std::uint64_t i = 0; i < k; ++i) {
      std::uint64_t x = seq.value(i);
      if (seen[x]) {
        col = true;
        break;
      }
      seen[x] = 1;
      touched.push_back(x);
    }
    for (std::uint64_t x : touched) seen[x] = 0;
    if (col) ++rep.successes;
  }
  rep.frequency = static_cast<double>(rep.successes) / static_cast<double>(trials);
  rep.wilson = wilson95(rep.successes, rep.trials);
  return rep;
}

// ---- elementary symmetric inequality and overlap bound ----

struct SortCheck {
  double r = 0.0;  // sum over triples
  double s = 0.0;  // sum over pairs
  bool holds = true;  // r^2 <= 2 s^3
};

inline SortCheck check_sort_inequality(const std::vector<double>& p) {
  long double e1 = 0, p2 = 0, p3 = 0;
  for (double x : p) {
    if (x < 0.0) throw input_error("entries must be nonnegative");
    long double lx = x;
    e1 += lx;
    p2 += lx * lx;
    p3 += lx * lx * lx;
  }
  long double e2 = (e1 * e1 - p2) / 2.0L;
  long double e3 = (e1 * e1 * e1 - 3.0L * e1 * p2 + 2.0L * p3) / 6.0L;
  SortCheck out;
  out.r = static_cast<double>(e3);
  out.s = static_cast<double>(e2);
  long double lhs = e3 * e3, rhs = 2.0L * e2 * e2 * e2;
  out.holds = lhs <= rhs + 1e-12L * std::max<long double>(1.0L, rhs);
  return out;
}

struct OverlapBound {
  double overlap = 0.0;  // sum_x p_x q_x
  double bound = 0.0;    // (1 - ||D1 - D2||)^2 / n
  bool holds = true;
};

inline OverlapBound overlap_bound(const DiscreteDistribution& d1, const DiscreteDistribution& d2) {
  if (d1.size() != d2.size()) throw input_error("distribution size mismatch");
  OverlapBound out;
  for (std::size_t x = 0; x < d1.size(); ++x) out.overlap += d1[x] * d2[x];
  double eps = total_variation(d1, d2);
  out.bound = (1.0 - eps) * (1.0 - eps) / static_cast<double>(d1.size());
  out.holds = out.overlap >= out.bound - 1e-12;
  return out;
}

}  // namespace unent
