#pragma once

// Random walks on the unsigned support of a composite network: transition
// matrices, stationary distributions by lazy power iteration, and the
// block-constant closed forms for regular constructions.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qlbits/error.hpp"
#include "qlbits/graphgen.hpp"
#include "qlbits/matrix.hpp"
#include "qlbits/qlcore.hpp"

namespace qlbits::walk {

/// P = D^-1 |R| with D the diagonal of absolute row sums.
inline Mat transition_matrix(const Mat& R) {
  if (!R.square()) throw ContractViolation("transition_matrix: R must be square");
  Mat P(R.rows(), R.cols());
  for (std::size_t i = 0; i < R.rows(); ++i) {
    double deg = 0.0;
    for (double v : R.row(i)) deg += std::abs(v);
    if (deg == 0.0) throw ParameterError("transition_matrix: vertex " + std::to_string(i) + " has zero degree");
    for (std::size_t j = 0; j < R.cols(); ++j) P(i, j) = std::abs(R(i, j)) / deg;
  }
  return P;
}

struct StationaryIteration {
  Vec pi;
  long steps = 0;
  double max_residual = 0.0;
  bool converged = false;
};

inline constexpr double kStationaryTolerance = 1e-12;
inline constexpr long kStationaryMaxSteps = 100000;

namespace detail {

inline double stationarity_residual(const Mat& P, const Vec& pi) {
  Vec next = vecmat(pi, P);
  double m = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) m = std::max(m, std::abs(next[i] - pi[i]));
  return m;
}

inline std::string describe_unreachable(const std::vector<bool>& seen, std::string_view how) {
  std::string list;
  int shown = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i]) continue;
    ++total;
    if (shown < 8) {
      list += (shown ? ", " : "") + std::to_string(i);
      ++shown;
    }
  }
  if (total > static_cast<std::size_t>(shown)) list += ", ...";
  return std::to_string(total) + " vertices {" + list + "} " + std::string(how) + " vertex 0";
}

}  // namespace detail

/// Left fixed point of P by lazy power iteration pi <- (pi + pi P) / 2,
/// started from the uniform vector. The laziness removes periodicity, so
/// bipartite supports converge too.
inline StationaryIteration stationary_iterative(const Mat& P) {
  const std::size_t n = P.rows();
  if (n == 0 || !P.square()) throw ContractViolation("stationary_iterative: P must be square and nonempty");
  auto fwd = graphgen::reachable(P, 0);
  if (std::find(fwd.begin(), fwd.end(), false) != fwd.end())
    throw ReducibleChainError("stationary_iterative: chain is reducible, " +
                              detail::describe_unreachable(fwd, "are unreachable from"));
  auto bwd = graphgen::reachable(P, 0, /*transpose=*/true);
  if (std::find(bwd.begin(), bwd.end(), false) != bwd.end())
    throw ReducibleChainError("stationary_iterative: chain is reducible, " +
                              detail::describe_unreachable(bwd, "cannot reach"));

  StationaryIteration out;
  out.pi.assign(n, 1.0 / static_cast<double>(n));
  for (long step = 1; step <= kStationaryMaxSteps; ++step) {
    Vec next = vecmat(out.pi, P);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = 0.5 * (next[i] + out.pi[i]);
      total += next[i];
    }
    for (double& v : next) v /= total;
    out.pi = std::move(next);
    out.steps = step;
    if (step % 16 == 0 || step < 16) {
      out.max_residual = detail::stationarity_residual(P, out.pi);
      if (out.max_residual <= kStationaryTolerance) {
        out.converged = true;
        break;
      }
    }
  }
  out.max_residual = detail::stationarity_residual(P, out.pi);
  return out;
}

// ---------------------------------------------------------------------------
// Closed forms

/// Block values of a block-constant stationary distribution, with the free
/// scaling parameters X and Y. `delta` is set for symmetric couplings.
struct BlockStationary {
  double pi_A = 0.0;
  double pi_B = 0.0;
  double X = 0.0;
  double Y = 0.0;
  std::optional<double> delta;
};

namespace detail {

inline void check_agreement(double u, double v, const char* what) {
  if (std::abs(u - v) > 1e-12 * std::max(1.0, std::abs(u)))
    throw ContractViolation(std::string("stationary closed form: ") + what + " forms disagree");
}

}  // namespace detail

/// Undirected coupling: pi is proportional to degree, so
/// pi_A = (k_A + l) / (n (k_A + k_B + 2l)), equivalently (X+1) / (2n(X+1-Delta))
/// with X = k_A/l, Y = k_B/l and Delta = (X - Y)/2.
inline BlockStationary stationary_symmetric(int n, double k_A, double k_B, double l) {
  if (n <= 0) throw ParameterError("stationary_symmetric: n must be positive");
  const double total = k_A + k_B + 2.0 * l;
  if (!(total > 0.0)) throw ParameterError("stationary_symmetric: zero total degree");
  BlockStationary s;
  s.pi_A = (k_A + l) / (n * total);
  s.pi_B = (k_B + l) / (n * total);
  if (l > 0.0) {
    s.X = k_A / l;
    s.Y = k_B / l;
    s.delta = (s.X - s.Y) / 2.0;
    detail::check_agreement(s.pi_A, (s.X + 1.0) / (2.0 * n * (s.X + 1.0 - *s.delta)), "(k,l) and (X,Delta)");
  }
  return s;
}

/// Row-regular directed couplings with in-degree equal to out-degree inside
/// each coupling block. Flow balance across the cut gives
/// pi_A = (k + l_A) l_B / (n ((k + l_A) l_B + (k + l_B) l_A)); in terms of
/// X = l_A/k, Y = l_B/k this is (1+X)Y / (n((1+X)Y + (1+Y)X)).
inline BlockStationary stationary_directed(int n, double k, double l_A, double l_B) {
  if (n <= 0) throw ParameterError("stationary_directed: n must be positive");
  if (!(k > 0.0)) throw ParameterError("stationary_directed: k must be positive");
  if (!(l_A > 0.0) || !(l_B > 0.0))
    throw ParameterError("stationary_directed: both couplings must be positive (otherwise the chain is reducible)");
  const double wa = (k + l_A) * l_B;
  const double wb = (k + l_B) * l_A;
  BlockStationary s;
  s.pi_A = wa / (n * (wa + wb));
  s.pi_B = wb / (n * (wa + wb));
  s.X = l_A / k;
  s.Y = l_B / k;
  detail::check_agreement(s.pi_A, (1 + s.X) * s.Y / (n * ((1 + s.X) * s.Y + (1 + s.Y) * s.X)), "(k,l) and (X,Y)");
  return s;
}

/// Degree-proportional values (k + l_A) / (n (2k + l_A + l_B)). Stationary
/// only when l_A = l_B; kept for comparison with the directed flow-balance form.
inline BlockStationary stationary_degree_form(int n, double k, double l_A, double l_B) {
  if (n <= 0) throw ParameterError("stationary_degree_form: n must be positive");
  const double total = 2.0 * k + l_A + l_B;
  if (!(total > 0.0)) throw ParameterError("stationary_degree_form: zero total degree");
  BlockStationary s;
  s.pi_A = (k + l_A) / (n * total);
  s.pi_B = (k + l_B) / (n * total);
  if (k > 0.0) {
    s.X = l_A / k;
    s.Y = l_B / k;
  }
  return s;
}

inline BlockStationary stationary_closed_form(const core::TuningPlan& plan) {
  if (plan.symmetric()) return stationary_symmetric(plan.n, plan.k_A, plan.k_B, plan.l_A_value());
  return stationary_directed(plan.n, plan.k_A, plan.l_A_value(), plan.l_B_value());
}

/// Integer degrees (k_A, k_B, l) with k_A = X l and Delta = (X - Y)/2, using the
/// smallest l that makes both degrees integers and realizable on n vertices.
struct WalkDegrees {
  int k_A = 0;
  int k_B = 0;
  int l = 0;
};

inline WalkDegrees degrees_for_scaling(double delta, double X, int n) {
  if (!std::isfinite(delta) || !std::isfinite(X) || !(X > 0.0))
    throw ParameterError("degrees_for_scaling: need finite delta and X > 0");
  const double Y = X - 2.0 * delta;
  if (!(Y > 0.0)) throw InfeasibleError("degrees_for_scaling: Y = X - 2 Delta must be positive");
  auto realizable = [n](double k) { return k > 0 && k < n && (static_cast<long>(n) * std::lround(k)) % 2 == 0; };
  for (int l = 1; l < n; ++l) {
    const double kA = X * l;
    const double kB = Y * l;
    if (std::abs(kA - std::round(kA)) > 1e-9 || std::abs(kB - std::round(kB)) > 1e-9) continue;
    if (kA >= n || kB >= n) break;
    if (!realizable(std::round(kA)) || !realizable(std::round(kB))) continue;
    return {static_cast<int>(std::lround(kA)), static_cast<int>(std::lround(kB)), l};
  }
  throw InfeasibleError("degrees_for_scaling: no integer (k_A, k_B, l) on n=" + std::to_string(n) +
                        " realizes Delta=" + std::to_string(delta) + ", X=" + std::to_string(X));
}

// ---------------------------------------------------------------------------
// Reports

struct StationaryReport {
  Vec pi;
  /// Block means of the iterated distribution.
  double pi_A = 0.0;
  double pi_B = 0.0;
  /// Largest deviation from the block mean inside either block.
  double block_spread = 0.0;
  std::optional<BlockStationary> closed;
  /// max_i |pi_i - closed block value|
  std::optional<double> closed_error;
  double max_residual = 0.0;
  long steps = 0;
  bool converged = false;
};

inline StationaryReport analyze_walk(const Mat& R, int n, std::optional<BlockStationary> closed = std::nullopt) {
  if (R.rows() != 2 * static_cast<std::size_t>(n)) throw ContractViolation("analyze_walk: R must be 2n x 2n");
  const Mat P = transition_matrix(R);
  auto it = stationary_iterative(P);
  StationaryReport rep;
  rep.pi = std::move(it.pi);
  rep.max_residual = it.max_residual;
  rep.steps = it.steps;
  rep.converged = it.converged;
  for (int i = 0; i < n; ++i) {
    rep.pi_A += rep.pi[i];
    rep.pi_B += rep.pi[n + i];
  }
  rep.pi_A /= n;
  rep.pi_B /= n;
  for (int i = 0; i < n; ++i) {
    rep.block_spread = std::max(rep.block_spread, std::abs(rep.pi[i] - rep.pi_A));
    rep.block_spread = std::max(rep.block_spread, std::abs(rep.pi[n + i] - rep.pi_B));
  }
  if (closed) {
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      err = std::max(err, std::abs(rep.pi[i] - closed->pi_A));
      err = std::max(err, std::abs(rep.pi[n + i] - closed->pi_B));
    }
    rep.closed = closed;
    rep.closed_error = err;
  }
  return rep;
}

}  // namespace qlbits::walk
