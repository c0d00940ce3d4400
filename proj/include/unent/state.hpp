#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "unent/common.hpp"
#include "unent/sat.hpp"

namespace unent {

using cplx = std::complex<double>;

// Unit-norm amplitude vector over [N]. Constructors reject vectors whose norm
// deviates from 1 by more than 1e-6 (caller bug), then renormalize so the
// stored norm is exact to 1e-12.
class StateVector {
 public:
  explicit StateVector(std::vector<cplx> amps) : amps_(std::move(amps)) {
    if (amps_.empty()) throw input_error("state vector needs dimension at least 1");
    double n2 = 0.0;
    for (const auto& a : amps_) n2 += std::norm(a);
    double n = std::sqrt(n2);
    if (std::abs(n - 1.0) > 1e-6) throw input_error("state vector is not normalized");
    for (auto& a : amps_) a /= n;
  }

  int dim() const { return static_cast<int>(amps_.size()); }
  const std::vector<cplx>& amps() const { return amps_; }
  cplx amp(int i) const { return amps_[static_cast<std::size_t>(i)]; }

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::vector<cplx> amps_;
};

struct Edge {
  int i = 0;
  int j = 0;  // i < j
  friend bool operator==(const Edge&, const Edge&) = default;
  friend bool operator<(const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  }
};

// Perfect matching on [N], N even.
class Matching {
 public:
  explicit Matching(std::vector<Edge> edges) : edges_(std::move(edges)) {
    std::size_t n = edges_.size() * 2;
    std::vector<char> seen(n, 0);
    for (const auto& e : edges_) {
      if (e.i >= e.j) throw input_error("matching edge must have i < j");
      if (e.j >= static_cast<int>(n)) throw input_error("matching edge out of range");
      if (seen[static_cast<std::size_t>(e.i)] || seen[static_cast<std::size_t>(e.j)])
        throw input_error("matching repeats an index");
      seen[static_cast<std::size_t>(e.i)] = seen[static_cast<std::size_t>(e.j)] = 1;
    }
  }
  static Matching identity(int n) {
    if (n % 2 != 0) throw input_error("matching needs even dimension");
    std::vector<Edge> es;
    for (int i = 0; i < n; i += 2) es.push_back({i, i + 1});
    return Matching(std::move(es));
  }
  int dim() const { return static_cast<int>(edges_.size()) * 2; }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  std::vector<Edge> edges_;
};

struct MatchingOutcome {
  Edge edge;
  int sign = +1;  // +1 for (|i>+|j>)/sqrt2, -1 for (|i>-|j>)/sqrt2
  friend bool operator==(const MatchingOutcome&, const MatchingOutcome&) = default;
};

inline StateVector proper_state(const Assignment& a, int n) {
  if (a.bits.size() != static_cast<std::size_t>(n)) throw input_error("assignment length mismatch");
  double v = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> amps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    amps[static_cast<std::size_t>(i)] = a.bits[static_cast<std::size_t>(i)] ? -v : v;
  return StateVector(std::move(amps));
}

inline cplx inner(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw input_error("state dimension mismatch");
  cplx s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += std::conj(a.amp(i)) * b.amp(i);
  return s;
}

inline double trace_distance_pure(const StateVector& a, const StateVector& b) {
  double f = std::norm(inner(a, b));
  return std::sqrt(std::max(0.0, 1.0 - f));
}

inline double swap_test_prob(const StateVector& a, const StateVector& b) {
  return 0.5 * (1.0 + std::norm(inner(a, b)));
}

inline bool swap_test(const StateVector& a, const StateVector& b, Rng& rng) {
  return rng.bernoulli(swap_test_prob(a, b));
}

inline double nonuniformity(const StateVector& s) {
  double nu = 0.0;
  double u = 1.0 / static_cast<double>(s.dim());
  for (const auto& a : s.amps()) nu += std::abs(std::norm(a) - u);
  return 0.5 * nu;
}

namespace detail {

inline double impropriety_at(const StateVector& s, double theta) {
  double n = static_cast<double>(s.dim());
  cplx r = std::polar(1.0 / n, theta);
  double sum = 0.0;
  for (const auto& a : s.amps()) sum += std::abs(a * a - r);
  return sum;
}

}  // namespace detail

// min over |r| = 1/N of sum |alpha_i^2 - r|; grid search over the phase of r
// plus ternary refinement.
inline double impropriety(const StateVector& s, int grid = 4096) {
  const double two_pi = 6.283185307179586476925287;
  double best = detail::impropriety_at(s, 0.0);
  double best_theta = 0.0;
  for (int g = 1; g < grid; ++g) {
    double theta = two_pi * g / grid;
    double v = detail::impropriety_at(s, theta);
    if (v < best) {
      best = v;
      best_theta = theta;
    }
  }
  double lo = best_theta - two_pi / grid, hi = best_theta + two_pi / grid;
  while (hi - lo > 1e-10) {
    double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (detail::impropriety_at(s, m1) < detail::impropriety_at(s, m2))
      hi = m2;
    else
      lo = m1;
  }
  return std::min(best, detail::impropriety_at(s, 0.5 * (lo + hi)));
}

struct NearestProper {
  StateVector proper;
  double dist = 0.0;
};

// Rounds each amplitude to the sign of +-sqrt(r) it is closest to (principal
// branch of sqrt at the impropriety-minimizing r), then improves the sign
// pattern by coordinate ascent on |<signs|s>|. The resulting proper state is
// phase-aligned with s, so the reported distance does not depend on the branch
// convention.
inline NearestProper nearest_proper(const StateVector& s) {
  const double two_pi = 6.283185307179586476925287;
  int n = s.dim();
  int grid = 4096;
  double best = detail::impropriety_at(s, 0.0), best_theta = 0.0;
  for (int g = 1; g < grid; ++g) {
    double theta = two_pi * g / grid;
    double v = detail::impropriety_at(s, theta);
    if (v < best) {
      best = v;
      best_theta = theta;
    }
  }
  cplx root = std::polar(1.0 / std::sqrt(static_cast<double>(n)), 0.5 * best_theta);

  std::vector<int> sign(static_cast<std::size_t>(n), +1);
  for (int i = 0; i < n; ++i) {
    if (std::abs(s.amp(i) - root) > std::abs(s.amp(i) + root)) sign[static_cast<std::size_t>(i)] = -1;
  }
  // maximizing |<g|s>| over sign flips: flip i when it increases |sum_i s_i conj(root)*alpha_i|
  auto overlap = [&] {
    cplx o = 0.0;
    for (int i = 0; i < n; ++i)
      o += static_cast<double>(sign[static_cast<std::size_t>(i)]) * std::conj(root) * s.amp(i);
    return o;
  };
  bool changed = true;
  int rounds = 0;
  while (changed && rounds++ < 64) {
    changed = false;
    cplx o = overlap();
    for (int i = 0; i < n; ++i) {
      cplx term = static_cast<double>(sign[static_cast<std::size_t>(i)]) * std::conj(root) * s.amp(i);
      if (std::abs(o - 2.0 * term) > std::abs(o) + 1e-15) {
        sign[static_cast<std::size_t>(i)] = -sign[static_cast<std::size_t>(i)];
        o -= 2.0 * term;
        changed = true;
      }
    }
  }

  double v = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<cplx> amps(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) amps[static_cast<std::size_t>(i)] = v * static_cast<double>(sign[static_cast<std::size_t>(i)]);
  StateVector g(std::move(amps));
  return {g, trace_distance_pure(g, s)};
}

// P[(i,j), +-] = |alpha_i +- alpha_j|^2 / 2, over the matching's edges.
struct MatchingDistribution {
  std::vector<MatchingOutcome> outcomes;
  std::vector<double> probs;
};

inline MatchingDistribution matching_distribution(const StateVector& s, const Matching& m) {
  if (s.dim() != m.dim()) throw input_error("state and matching dimensions differ");
  MatchingDistribution d;
  double total = 0.0;
  for (const auto& e : m.edges()) {
    cplx ai = s.amp(e.i), aj = s.amp(e.j);
    double pp = 0.5 * std::norm(ai + aj);
    double pm = 0.5 * std::norm(ai - aj);
    d.outcomes.push_back({e, +1});
    d.probs.push_back(pp);
    d.outcomes.push_back({e, -1});
    d.probs.push_back(pm);
    total += pp + pm;
  }
  if (std::abs(total - 1.0) > 1e-9) throw construction_error("matching distribution mass error");
  return d;
}

inline MatchingOutcome measure_matching(const StateVector& s, const Matching& m, Rng& rng) {
  MatchingDistribution d = matching_distribution(s, m);
  double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t k = 0; k < d.probs.size(); ++k) {
    acc += d.probs[k];
    if (u < acc) return d.outcomes[k];
  }
  return d.outcomes.back();
}

// Uniform over all (N-1)!! perfect matchings: pair up consecutive elements of
// a uniformly random permutation.
inline Matching random_matching(int n, Rng& rng) {
  if (n % 2 != 0) throw input_error("matching needs even dimension");
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  std::vector<Edge> edges;
  for (int i = 0; i < n; i += 2) {
    int a = perm[static_cast<std::size_t>(i)], b = perm[static_cast<std::size_t>(i + 1)];
    edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges.begin(), edges.end());
  return Matching(std::move(edges));
}

// ---- text serialization (versioned, bit-exact round trip) ----

inline void write_state(std::ostream& out, const StateVector& s) {
  out << "statevector v1 " << s.dim() << '\n';
  char buf[96];
  for (const auto& a : s.amps()) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", a.real(), a.imag());
    out << buf;
  }
}

inline StateVector read_state(std::istream& in) {
  std::string tag, ver;
  int n;
  if (!(in >> tag >> ver >> n) || tag != "statevector" || ver != "v1" || n < 1)
    throw input_error("bad state vector header");
  std::vector<cplx> amps;
  amps.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double re, im;
    if (!(in >> re >> im)) throw input_error("truncated state vector");
    amps.emplace_back(re, im);
  }
  return StateVector(std::move(amps));
}

}  // namespace unent
