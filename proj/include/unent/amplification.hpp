#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "unent/common.hpp"
#include "unent/merlin.hpp"
#include "unent/state.hpp"
#include "unent/verifier.hpp"

namespace unent {

using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;

// 4x4 density operator (two qubits): Hermitian, trace 1, PSD within 1e-10.
class TwoQubitDensity {
 public:
  explicit TwoQubitDensity(const Matrix4& m) : m_(m) {
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
      throw input_error("density matrix is not Hermitian");
    m_ = 0.5 * (m_ + m_.adjoint().eval());
    if (std::abs(m_.trace().real() - 1.0) > 1e-9 || std::abs(m_.trace().imag()) > 1e-12)
      throw input_error("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix4> es(m_);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw input_error("density matrix is not positive semidefinite");
  }
  static TwoQubitDensity pure(const Vector4& v) {
    Vector4 u = v.normalized();
    return TwoQubitDensity(u * u.adjoint());
  }
  const Matrix4& mat() const { return m_; }

 private:
  Matrix4 m_;
};

inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// Entanglement of formation via the two-qubit concurrence closed form:
// C = max(0, l1 - l2 - l3 - l4), li the decreasing square roots of the
// eigenvalues of rho (sy x sy) rho* (sy x sy); E_F = h((1 + sqrt(1-C^2))/2).
inline double concurrence(const TwoQubitDensity& rho) {
  Matrix4 yy = Matrix4::Zero();
  // sigma_y x sigma_y in the computational basis
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  Matrix4 r = rho.mat() * yy * rho.mat().conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix4> es(r);
  std::vector<double> lam;
  for (int i = 0; i < 4; ++i)
    lam.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i).real())));
  std::sort(lam.begin(), lam.end(), std::greater<double>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

inline double ef_two_qubit(const TwoQubitDensity& rho) {
  double c = concurrence(rho);
  return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))));
}

inline Matrix4 partial_transpose(const Matrix4& m) {
  // transpose the second qubit: (ab, cd) block index swap on the inner index
  Matrix4 out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) out(2 * a + d, 2 * c + b) = m(2 * a + b, 2 * c + d);
  return out;
}

// Exact separability at 2x2: positivity of the partial transpose.
inline bool ppt_separable(const TwoQubitDensity& rho, double tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Matrix4> es(partial_transpose(rho.mat()));
  return es.eigenvalues().minCoeff() >= -tol;
}

inline double trace_norm(const Matrix4& m) {
  return m.jacobiSvd().singularValues().sum();
}

inline double trace_distance(const TwoQubitDensity& a, const TwoQubitDensity& b) {
  return 0.5 * trace_norm(a.mat() - b.mat());
}

// Werner family p * Bell + (1-p) * I/4; separable iff p <= 1/3.
inline TwoQubitDensity werner(double p) {
  Vector4 bell;
  bell << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  Matrix4 m = p * (bell * bell.adjoint()) + (1.0 - p) * 0.25 * Matrix4::Identity();
  return TwoQubitDensity(m);
}

namespace detail {

// Frobenius projection onto the density-matrix set: Hermitianize, then
// project the spectrum onto the probability simplex.
inline Matrix4 project_density(const Matrix4& m) {
  Matrix4 h = 0.5 * (m + m.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Matrix4> es(h);
  Eigen::Vector4d lam = es.eigenvalues();
  // simplex projection
  std::vector<double> v(lam.data(), lam.data() + 4);
  std::sort(v.begin(), v.end(), std::greater<double>());
  double acc = 0.0, theta = 0.0;
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    acc += v[static_cast<std::size_t>(i)];
    double t = (acc - 1.0) / (i + 1);
    if (v[static_cast<std::size_t>(i)] - t > 0) {
      theta = t;
      k = i + 1;
    }
  }
  (void)k;
  Eigen::Vector4d proj;
  for (int i = 0; i < 4; ++i) proj(i) = std::max(0.0, lam(i) - theta);
  return es.eigenvectors() * proj.asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix4 project_ppt(const Matrix4& m) {
  return partial_transpose(project_density(partial_transpose(m)));
}

}  // namespace detail

// Nearest PPT density matrix (exactly the separable set at 2x2) by Dykstra's
// alternating projections in Frobenius norm; the result certifies an upper
// bound on the trace distance to the separable set.
inline TwoQubitDensity nearest_separable(const TwoQubitDensity& rho, double tol = 1e-6,
                                         int max_iter = 10000) {
  Matrix4 x = rho.mat();
  Matrix4 p = Matrix4::Zero(), q = Matrix4::Zero();
  for (int it = 0; it < max_iter; ++it) {
    Matrix4 y = detail::project_density(x + p);
    p = x + p - y;
    Matrix4 x2 = detail::project_ppt(y + q);
    q = y + q - x2;
    if ((x2 - x).cwiseAbs().maxCoeff() < tol) {
      x = x2;
      break;
    }
    x = x2;
  }
  // final feasibility pass
  Matrix4 z = detail::project_density(detail::project_ppt(x));
  return TwoQubitDensity(detail::project_density(z));
}

struct SeparableDistanceReport {
  double ef = 0.0;
  double distance = 0.0;  // trace distance to the certificate separable state
  double bound = 0.0;     // sqrt(2 eps)
  bool holds = true;
  TwoQubitDensity certificate;
};

// If E_F(rho) <= eps, some separable state lies within sqrt(2 eps) in trace
// distance; reports the distance to a constructed separable certificate.
inline SeparableDistanceReport check_low_entanglement_distance(const TwoQubitDensity& rho,
                                                               double eps) {
  double ef = ef_two_qubit(rho);
  if (ef > eps) throw precondition_error("entanglement of formation exceeds eps");
  TwoQubitDensity sigma = nearest_separable(rho);
  if (!ppt_separable(sigma, 1e-8)) throw construction_error("certificate is not separable");
  SeparableDistanceReport rep{ef, trace_distance(rho, sigma), std::sqrt(2.0 * eps), true, sigma};
  rep.holds = rep.distance <= rep.bound + 1e-9;
  return rep;
}

struct MeasurementGrowthReport {
  double max_ef = 0.0;
  double bound = 0.0;  // 2n
  bool holds = true;
};

// Applies an operator-sum measurement (elements over the joint 2x2 space,
// touching n = 1 qubit per register) to a product pure input and checks that
// each conditioned outcome satisfies E_F <= 2n.
inline MeasurementGrowthReport check_measurement_growth(const Eigen::Vector2cd& a,
                                                        const Eigen::Vector2cd& b,
                                                        const std::vector<Matrix4>& kraus,
                                                        int n = 1) {
  Matrix4 sum = Matrix4::Zero();
  for (const auto& e : kraus) sum += e.adjoint() * e;
  Eigen::SelfAdjointEigenSolver<Matrix4> es(0.5 * (sum + sum.adjoint().eval()));
  if (es.eigenvalues().maxCoeff() > 1.0 + 1e-9)
    throw input_error("measurement elements exceed the identity");

  Vector4 psi;
  psi << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  psi.normalize();
  Matrix4 rho = psi * psi.adjoint();

  MeasurementGrowthReport rep;
  rep.bound = 2.0 * n;
  for (const auto& e : kraus) {
    Matrix4 post = e * rho * e.adjoint();
    double tr = post.trace().real();
    if (tr < 1e-12) continue;
    TwoQubitDensity sigma(post / tr);
    rep.max_ef = std::max(rep.max_ef, ef_two_qubit(sigma));
  }
  rep.holds = rep.max_ef <= rep.bound + 1e-9;
  return rep;
}

// ---- protocol skeletons over a black-box verifier ----

struct AbstractVerifier {
  int k = 1;    // number of witnesses
  int dim = 2;  // per-witness dimension
  std::function<double(const std::vector<StateVector>&)> accept_prob;
};

inline double binomial_tail_at_least(int m, double q, int t) {
  // P[Bin(m, q) >= t]
  if (t <= 0) return 1.0;
  if (t > m) return 0.0;
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return 1.0;
  double logq = std::log(q), log1q = std::log1p(-q);
  double total = 0.0;
  double logc = 0.0;  // log C(m, i), i = 0
  for (int i = 0; i <= m; ++i) {
    if (i >= t) total += std::exp(logc + i * logq + (m - i) * log1q);
    logc += std::log(static_cast<double>(m - i)) - std::log(static_cast<double>(i + 1));
  }
  return std::min(1.0, total);
}

struct AmplifiedVerifier {
  AbstractVerifier verifier;
  int repetitions = 0;
  double threshold = 0.0;  // accept when at least this fraction of runs accept
};

// Parallel repetition with a threshold vote: m independent invocations,
// accept when at least a d fraction accept, d strictly inside
// (a / (1 - (b - a)), b). m is the smallest count (starting from
// ceil(p / (b-a)^2)) whose exact binomial tail at per-run probability b
// reaches 1 - 2^-p. Soundness a/d <= 1 - (b - a) follows from Markov when
// per-run acceptance averages at most a.
inline AmplifiedVerifier one_sided_amplify(const AbstractVerifier& v, double a, double b,
                                           int p) {
  if (!(a >= 0.0 && a < b && b < 1.0)) throw input_error("need 0 <= a < b < 1");
  double lo = a / (1.0 - (b - a));
  if (lo >= b) throw input_error("threshold interval is empty");
  double d = 0.5 * (lo + b);
  double target = 1.0 - std::pow(2.0, -p);
  int m = std::max(1, static_cast<int>(std::ceil(p / ((b - a) * (b - a)))));
  while (m < 100000) {
    int t = static_cast<int>(std::ceil(d * m));
    if (binomial_tail_at_least(m, b, t) >= target) break;
    m *= 2;
  }
  AmplifiedVerifier out;
  out.repetitions = m;
  out.threshold = d;
  out.verifier.k = v.k;
  out.verifier.dim = v.dim;
  auto inner = v.accept_prob;
  out.verifier.accept_prob = [inner, m, d](const std::vector<StateVector>& w) {
    double q = inner(w);
    return binomial_tail_at_least(m, q, static_cast<int>(std::ceil(d * m)));
  };
  return out;
}

// Two-prover wrapper: coin flip between a swap test on a uniformly chosen
// register pair (A_i, B_i) and running the inner verifier on bundle A.
inline TestReport k_to_two(const WitnessBundle& a, const WitnessBundle& b,
                           const AbstractVerifier& inner, Rng& rng) {
  if (a.k() != b.k() || a.dim() != b.dim()) throw input_error("bundle arity mismatch");
  if (a.k() != inner.k) throw input_error("verifier arity mismatch");
  TestReport rep;
  if (rng.bernoulli(0.5)) {
    int i = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(a.k())));
    rep.branch = Branch::symmetry;
    rep.accept = swap_test(a.witnesses[static_cast<std::size_t>(i)],
                           b.witnesses[static_cast<std::size_t>(i)], rng);
    rep.detail = {{"register", i}};
  } else {
    rep.branch = Branch::satisfiability;
    rep.accept = rng.bernoulli(inner.accept_prob(a.witnesses));
    rep.detail = {{"register", nullptr}};
  }
  return rep;
}

// Symmetrized-to-plain wrapper: coin flip between a swap test of the first
// witness against a random other, and the inner verifier on the bundle.
inline TestReport sym_to_plain(const WitnessBundle& bundle, const AbstractVerifier& inner,
                               Rng& rng) {
  check_bundle(bundle);
  if (bundle.k() < 2) throw precondition_error("need at least two witnesses");
  TestReport rep;
  if (rng.bernoulli(0.5)) {
    int i = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(bundle.k() - 1)));
    rep.branch = Branch::symmetry;
    rep.accept = swap_test(bundle.witnesses.front(),
                           bundle.witnesses[static_cast<std::size_t>(i)], rng);
    rep.detail = {{"partner", i}};
  } else {
    rep.branch = Branch::satisfiability;
    rep.accept = rng.bernoulli(inner.accept_prob(bundle.witnesses));
    rep.detail = {{"partner", nullptr}};
  }
  return rep;
}

}  // namespace unent
