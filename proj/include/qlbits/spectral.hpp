#pragma once

// Dense eigensolvers and spectral diagnostics: cyclic Jacobi for symmetric
// composites, shifted inverse iteration for a single real eigenpair of a
// directed composite, state verification, and the Erdos-Renyi gap bounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qlbits/error.hpp"
#include "qlbits/graphgen.hpp"
#include "qlbits/matrix.hpp"
#include "qlbits/qlcore.hpp"
#include "qlbits/rng.hpp"

namespace qlbits::spectral {

/// Eigenvalues in descending order; `vectors` holds matching unit columns.
struct EigenSystem {
  Vec values;
  Mat vectors;
  int sweeps = 0;
  bool converged = false;

  Vec vector(std::size_t i) const {
    Vec v(vectors.rows());
    for (std::size_t r = 0; r < v.size(); ++r) v[r] = vectors(r, i);
    return v;
  }
};

inline constexpr double kJacobiTolerance = 1e-11;
inline constexpr int kJacobiMaxSweeps = 100;

namespace detail {

inline double off_diagonal_norm(const Mat& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace detail

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// 1e-11 * ||R||_F.
inline EigenSystem jacobi_eigen(const Mat& R, bool with_vectors = true) {
  if (!is_symmetric(R)) throw ContractViolation("jacobi_eigen: matrix is not symmetric within 1e-12");
  const std::size_t n = R.rows();
  Mat a = R;
  Mat v = with_vectors ? Mat::identity(n) : Mat();
  const double threshold = kJacobiTolerance * frobenius(R);

  EigenSystem out;
  for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
    if (detail::off_diagonal_norm(a) <= threshold) {
      out.converged = true;
      out.sweeps = sweep;
      break;
    }
    if (sweep == kJacobiMaxSweeps) {
      out.sweeps = sweep;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double g = a(k, p);
          const double h = a(k, q);
          a(k, p) = a(p, k) = c * g - s * h;
          a(k, q) = a(q, k) = s * g + c * h;
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        if (with_vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            const double g = v(k, p);
            const double h = v(k, q);
            v(k, p) = c * g - s * h;
            v(k, q) = s * g + c * h;
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  out.values.resize(n);
  if (with_vectors) out.vectors = Mat(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    if (with_vectors)
      for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

inline Vec full_spectrum_symmetric(const Mat& R) { return jacobi_eigen(R, false).values; }

/// Norm of the projection of x onto the eigenspace spanned by all eigenvalues
/// within `tol` of lambda. For a unit x this is a degeneracy-safe fidelity.
inline double eigenspace_fidelity(const EigenSystem& sys, double lambda, std::span<const double> x,
                                  double tol = 1e-6) {
  double s = 0.0;
  for (std::size_t i = 0; i < sys.values.size(); ++i) {
    if (std::abs(sys.values[i] - lambda) > tol) continue;
    double d = 0.0;
    for (std::size_t r = 0; r < x.size(); ++r) d += sys.vectors(r, i) * x[r];
    s += d * d;
  }
  return std::sqrt(s);
}

inline std::size_t eigenspace_dimension(const EigenSystem& sys, double lambda, double tol = 1e-6) {
  return static_cast<std::size_t>(std::count_if(sys.values.begin(), sys.values.end(),
                                                [&](double v) { return std::abs(v - lambda) <= tol; }));
}

// ---------------------------------------------------------------------------
// Targeted eigenpair

struct EigenPair {
  double lambda = 0.0;
  Vec vector;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline constexpr double kShiftOffset = 1e-6;
inline constexpr double kPairTolerance = 1e-10;
inline constexpr int kInverseIterations = 200;

namespace detail {

/// In-place LU with partial pivoting. Returns false on an exactly singular pivot.
inline bool lu_factor(Mat& m, std::vector<std::size_t>& perm) {
  const std::size_t n = m.rows();
  perm.resize(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (m(piv, k) == 0.0) return false;
    if (piv != k) {
      std::swap_ranges(m.row(k).begin(), m.row(k).end(), m.row(piv).begin());
      std::swap(perm[k], perm[piv]);
    }
    const double inv = 1.0 / m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) * inv;
      m(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return true;
}

inline Vec lu_solve(const Mat& lu, const std::vector<std::size_t>& perm, std::span<const double> b) {
  const std::size_t n = lu.rows();
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
    x[i] = s / lu(i, i);
  }
  return x;
}

inline double rayleigh(const Mat& R, std::span<const double> x) {
  return dot(x, matvec(R, x)) / dot(x, x);
}

}  // namespace detail

/// Refines (lambda_hint, v_hint) by inverse iteration with shift
/// lambda_hint + 1e-6. Works for nonsymmetric R as long as the target
/// eigenvalue is real. If the solves break down, the hint is returned with its
/// raw residual and `converged == false`.
inline EigenPair targeted_eigenpair(const Mat& R, double lambda_hint, std::span<const double> v_hint) {
  if (!R.square() || R.rows() != v_hint.size()) throw ContractViolation("targeted_eigenpair: dimension mismatch");
  Vec hint(v_hint.begin(), v_hint.end());
  normalize(hint);

  auto fallback = [&](int iterations) {
    EigenPair p;
    p.lambda = lambda_hint;
    p.vector = hint;
    p.residual = eigen_residual(R, hint, lambda_hint);
    p.iterations = iterations;
    p.converged = false;
    return p;
  };

  Mat lu = R;
  for (std::size_t i = 0; i < lu.rows(); ++i) lu(i, i) -= lambda_hint + kShiftOffset;
  std::vector<std::size_t> perm;
  if (!detail::lu_factor(lu, perm)) return fallback(0);

  EigenPair best;
  Vec x = hint;
  for (int it = 1; it <= kInverseIterations; ++it) {
    Vec y = detail::lu_solve(lu, perm, x);
    const double ny = norm2(y);
    if (!std::isfinite(ny) || ny == 0.0) return fallback(it);
    for (double& v : y) v /= ny;
    if (dot(y, hint) < 0.0)
      for (double& v : y) v = -v;
    x = std::move(y);
    const double lam = detail::rayleigh(R, x);
    const double res = eigen_residual(R, x, lam);
    if (it == 1 || res < best.residual) {
      best.lambda = lam;
      best.vector = x;
      best.residual = res;
    }
    best.iterations = it;
    if (res <= kPairTolerance) {
      best.converged = true;
      break;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// State verification

struct SpectralReport {
  /// Descending. Full spectrum for symmetric R; for a directed R only the
  /// refined real eigenvalue is listed.
  Vec eigenvalues;
  double lambda_pred = 0.0;
  /// Refined eigenvalue (Rayleigh quotient of the refined vector).
  double lambda = 0.0;
  Vec vector;
  /// ||R psi - lambda_pred psi|| for the constructed state vector.
  double psi_residual = 0.0;
  /// ||R v - lambda v|| for the refined pair.
  double residual = 0.0;
  /// |<psi, v>|
  double fidelity = 0.0;
  std::optional<double> gap;
  /// 0-based position of lambda in `eigenvalues`.
  std::size_t rank = 0;
  bool converged = false;
  int iterations = 0;

  bool passes(double residual_tol = 1e-8, double fidelity_tol = 1e-8) const {
    return psi_residual <= residual_tol && residual <= residual_tol && fidelity >= 1.0 - fidelity_tol;
  }
};

/// (w1 V_A ; w2 V_B) with V the normalized all-ones vector on n vertices.
inline Vec state_vector(const core::QlState& s, int n) {
  const double v = 1.0 / std::sqrt(static_cast<double>(n));
  Vec psi(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    psi[i] = s.w1 * v;
    psi[n + i] = s.w2 * v;
  }
  return psi;
}

inline SpectralReport verify_state(const core::BlockNetwork& net, const core::QlState& state,
                                   const core::TuningPlan& plan) {
  if (net.n != plan.n) throw ContractViolation("verify_state: network and plan disagree on n");
  SpectralReport rep;
  const Vec psi = state_vector(state, net.n);
  rep.lambda_pred = core::predicted_lambda(plan, state);
  rep.psi_residual = eigen_residual(net.R, psi, rep.lambda_pred);

  const EigenPair pair = targeted_eigenpair(net.R, rep.lambda_pred, psi);
  rep.lambda = pair.lambda;
  rep.vector = pair.vector;
  rep.residual = pair.residual;
  rep.converged = pair.converged;
  rep.iterations = pair.iterations;
  rep.fidelity = std::min(1.0, std::abs(dot(psi, pair.vector)));

  if (net.symmetric) {
    rep.eigenvalues = full_spectrum_symmetric(net.R);
    if (rep.eigenvalues.size() >= 2) rep.gap = rep.eigenvalues[0] - rep.eigenvalues[1];
    std::size_t best = 0;
    for (std::size_t i = 1; i < rep.eigenvalues.size(); ++i)
      if (std::abs(rep.eigenvalues[i] - rep.lambda) < std::abs(rep.eigenvalues[best] - rep.lambda)) best = i;
    rep.rank = best;
  } else {
    rep.eigenvalues = {rep.lambda};
    rep.rank = 0;
  }
  return rep;
}

/// Verifies the state a plan actually realizes.
inline SpectralReport verify_plan(const core::BlockNetwork& net, const core::TuningPlan& plan) {
  return verify_state(net, core::achieved_state(plan), plan);
}

// ---------------------------------------------------------------------------
// Erdos-Renyi gap feasibility

/// Smallest p for which G(n, p) is expected to have spectral gap >= a.
inline double er_min_p(double n, double a) {
  if (!(a > 0.0)) throw ParameterError("er_min_p: gap must be positive");
  if (n < a) throw InfeasibleError("er_min_p: need n >= a (n=" + std::to_string(n) + ", a=" + std::to_string(a) + ")");
  return 2.0 * std::sqrt((-a * a + a * n + n) / (n * (n + 4.0) * (n + 4.0))) + (a + 2.0) / (n + 4.0);
}

/// Smallest n for which G(n, p) is expected to have spectral gap >= a. For
/// a = 1 this is (3 + 2 sqrt(p^2 - 3p + 2)) / p - 2.
inline double er_min_n(double p, double a = 1.0) {
  if (!(a > 0.0)) throw ParameterError("er_min_n: gap must be positive");
  if (!(p > 0.0)) throw InfeasibleError("er_min_n: p = 0 has no edges, so there is no graph with a gap");
  if (p > 1.0) throw ParameterError("er_min_n: need p <= 1");
  const double b = a + 2.0 - 2.0 * p;
  return (b + std::sqrt(std::max(0.0, b * b - a * a))) / p;
}

/// Limit of n*p (expected regularity) as n grows: 2 + a + 2 sqrt(1 + a).
inline double min_regularity_limit(double a) {
  if (!(a >= 0.0)) throw ParameterError("min_regularity_limit: gap must be nonnegative");
  return 2.0 + a + 2.0 * std::sqrt(1.0 + a);
}

struct GapFeasibility {
  std::optional<double> n;
  double a = 1.0;
  std::optional<double> min_p;
  std::optional<double> p;
  std::optional<double> min_n;
  double regularity_limit = 0.0;
  int min_regularity = 0;
};

inline GapFeasibility gap_feasibility(double a, std::optional<double> n = std::nullopt,
                                      std::optional<double> p = std::nullopt) {
  GapFeasibility g;
  g.a = a;
  g.n = n;
  g.p = p;
  if (n) g.min_p = er_min_p(*n, a);
  if (p) g.min_n = er_min_n(*p, a);
  g.regularity_limit = min_regularity_limit(a);
  g.min_regularity = static_cast<int>(std::ceil(g.regularity_limit));
  return g;
}

inline double spectral_gap(const Vec& descending) {
  if (descending.size() < 2) throw ContractViolation("spectral_gap: need at least two eigenvalues");
  return descending[0] - descending[1];
}

struct GapTrials {
  int n = 0;
  double p = 0.0;
  double a = 1.0;
  std::uint64_t seed = 0;
  Vec gaps;
  int passes = 0;

  double pass_rate() const { return gaps.empty() ? 0.0 : static_cast<double>(passes) / gaps.size(); }
};

/// Samples `trials` seeded G(n, p) graphs and records lambda_1 - lambda_2 for each.
inline GapTrials er_gap_trials(int n, double p, int trials, std::uint64_t seed, double a = 1.0) {
  if (trials <= 0) throw ParameterError("er_gap_trials: trials must be positive");
  GapTrials out{n, p, a, seed, {}, 0};
  out.gaps.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    auto g = graphgen::gen_er_graph(n, p, derive_seed(seed, static_cast<std::uint64_t>(t)));
    const double gap = spectral_gap(full_spectrum_symmetric(g.graph.adjacency));
    out.gaps.push_back(gap);
    if (gap >= a) ++out.passes;
  }
  return out;
}

}  // namespace qlbits::spectral
