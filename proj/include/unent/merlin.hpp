#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "unent/common.hpp"
#include "unent/state.hpp"

namespace unent {

// K unentangled pure witnesses of equal dimension. Unentanglement is
// structural: a bundle is a list of independent state vectors.
struct WitnessBundle {
  std::vector<StateVector> witnesses;

  int k() const { return static_cast<int>(witnesses.size()); }
  int dim() const { return witnesses.empty() ? 0 : witnesses.front().dim(); }
};

inline void check_bundle(const WitnessBundle& b) {
  if (b.witnesses.empty()) throw input_error("bundle needs at least one witness");
  for (const auto& w : b.witnesses)
    if (w.dim() != b.dim()) throw input_error("bundle witnesses have mixed dimensions");
}

inline WitnessBundle honest_bundle(const Assignment& a, int k) {
  StateVector s = proper_state(a, static_cast<int>(a.bits.size()));
  WitnessBundle b;
  for (int i = 0; i < k; ++i) b.witnesses.push_back(s);
  return b;
}

// Uniform magnitude on a support set S, zero elsewhere, random +-1 signs.
inline WitnessBundle adversary_concentrated(const std::vector<int>& support, int n, int k,
                                            Rng& rng) {
  if (support.empty()) throw input_error("support set must be nonempty");
  double v = 1.0 / std::sqrt(static_cast<double>(support.size()));
  std::vector<cplx> amps(static_cast<std::size_t>(n), 0.0);
  for (int i : support) {
    if (i < 0 || i >= n) throw input_error("support index out of range");
    amps[static_cast<std::size_t>(i)] = rng.bernoulli(0.5) ? -v : v;
  }
  StateVector s(std::move(amps));
  WitnessBundle b;
  for (int i = 0; i < k; ++i) b.witnesses.push_back(s);
  return b;
}

// Proper state with amplitudes rotated by e^{i theta_i}, theta_i ~ N(0, sigma^2).
inline WitnessBundle adversary_phased(const Assignment& a, double sigma, int k, Rng& rng) {
  if (sigma < 0) throw input_error("sigma must be nonnegative");
  StateVector base = proper_state(a, static_cast<int>(a.bits.size()));
  std::vector<cplx> amps(base.amps());
  for (auto& amp : amps) amp *= std::polar(1.0, sigma * rng.normal());
  StateVector s(std::move(amps));
  WitnessBundle b;
  for (int i = 0; i < k; ++i) b.witnesses.push_back(s);
  return b;
}

// K independent perturbations of a base state, each kept within overlap
// |<base|w>| >= 1 - delta by rejection sampling.
inline WitnessBundle adversary_nonidentical(const StateVector& base, double delta, int k,
                                            Rng& rng) {
  if (delta < 0.0 || delta > 1.0) throw input_error("delta must lie in [0,1]");
  WitnessBundle b;
  int n = base.dim();
  // perturbation scale chosen so draws usually land inside the overlap ball
  double scale = 0.5 * delta / std::sqrt(static_cast<double>(n));
  for (int w = 0; w < k; ++w) {
    if (delta == 0.0) {
      b.witnesses.push_back(base);
      continue;
    }
    int budget = 1000;
    for (;;) {
      if (budget-- == 0) throw precondition_error("rejection budget exceeded for overlap target");
      std::vector<cplx> amps(base.amps());
      double n2 = 0.0;
      for (auto& amp : amps) {
        amp += scale * cplx(rng.normal(), rng.normal());
        n2 += std::norm(amp);
      }
      double nr = std::sqrt(n2);
      for (auto& amp : amps) amp /= nr;
      StateVector cand(std::move(amps));
      if (std::abs(inner(base, cand)) >= 1.0 - delta) {
        b.witnesses.push_back(std::move(cand));
        break;
      }
    }
  }
  return b;
}

// Provenance manifest for serialized bundles.
struct BundleManifest {
  std::string strategy;
  int k = 0;
  int n = 0;
  std::uint64_t seed = 0;
  nlohmann::json params;
};

inline nlohmann::json manifest_to_json(const BundleManifest& m) {
  return {{"schema", "bundle-manifest-v1"}, {"strategy", m.strategy}, {"k", m.k},
          {"n", m.n},                       {"seed", m.seed},         {"params", m.params}};
}

}  // namespace unent
