#pragma once

// State and tuning mathematics for single quantum-like bits.
//
// A state psi = a|+> + b|-> is realized as the vector (w1 V_A ; w2 V_B) with
// w1 = (a+b)/sqrt2, w2 = (a-b)/sqrt2 and V_A, V_B the normalized all-ones
// vectors of two regular subgraphs. Four tuning ratios map a state onto graph
// regularities:
//
//   Delta      = (k_A - k_B) / (2 l)      = 2ab / (b^2 - a^2)
//   Delta^-1   = 2 l / (k_A - k_B)
//   Delta_C    = l_A / l_B  (signed)       = t |t|,  t = w1 / w2
//   Delta_C^-1 = l_B / l_A  (signed)       = s |s|,  s = w2 / w1
//
// Couplings carry their sign in the C blocks; the effective signed coupling
// that enters every formula is l_eff = -sign * l, so the default negative
// couplings have l_eff = l. The sign of Delta_C is not structural: l_A/l_B fixes
// |w1/w2| and the sign picks which of the two block eigenvectors is meant.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qlbits/error.hpp"
#include "qlbits/graphgen.hpp"
#include "qlbits/matrix.hpp"
#include "qlbits/rng.hpp"

namespace qlbits::core {

inline const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

/// |a| (or |b|) at which the symmetric branches cross: Delta = Delta^-1 = +-1.
inline double switch_amplitude() { return 0.5 * std::sqrt(2.0 + std::sqrt(2.0)); }

// ---------------------------------------------------------------------------
// States

struct QlState {
  double a = 1.0;
  double b = 0.0;
  double w1 = kInvSqrt2;
  double w2 = kInvSqrt2;
  bool renormalized = false;
};

inline constexpr double kNormTolerance = 1e-9;

/// Builds a state from its |+>/|-> amplitudes. Inputs within 1e-9 of the unit
/// circle are renormalized silently; anything further off is rejected.
inline QlState state_from_amplitudes(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidStateError("amplitudes must be finite");
  const double n2 = a * a + b * b;
  if (n2 == 0.0) throw InvalidStateError("a = b = 0 is not a state");
  if (std::abs(n2 - 1.0) > kNormTolerance)
    throw InvalidStateError("a^2 + b^2 = " + std::to_string(n2) + " is not 1 within 1e-9");
  QlState s;
  s.renormalized = n2 != 1.0;
  const double norm = std::sqrt(n2);
  s.a = a / norm;
  s.b = b / norm;
  s.w1 = (s.a + s.b) * kInvSqrt2;
  s.w2 = (s.a - s.b) * kInvSqrt2;
  return s;
}

inline QlState state_from_weights(double w1, double w2) {
  const double n = std::hypot(w1, w2);
  if (n == 0.0 || !std::isfinite(n)) throw InvalidStateError("block weights must be finite and not both zero");
  w1 /= n;
  w2 /= n;
  QlState s;
  s.w1 = w1;
  s.w2 = w2;
  s.a = (w1 + w2) * kInvSqrt2;
  s.b = (w1 - w2) * kInvSqrt2;
  return s;
}

// ---------------------------------------------------------------------------
// Branches and ratios

enum class Branch { Delta, DeltaInv, DeltaC, DeltaCInv };

inline constexpr std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::Delta: return "delta";
    case Branch::DeltaInv: return "delta_inv";
    case Branch::DeltaC: return "delta_c";
    case Branch::DeltaCInv: return "delta_c_inv";
  }
  return "?";
}

inline Branch branch_from_string(std::string_view s) {
  for (Branch b : {Branch::Delta, Branch::DeltaInv, Branch::DeltaC, Branch::DeltaCInv})
    if (to_string(b) == s) return b;
  throw ParameterError("unknown branch '" + std::string(s) + "'");
}

inline constexpr bool is_symmetric_branch(Branch b) { return b == Branch::Delta || b == Branch::DeltaInv; }

namespace detail {
inline constexpr double kPoleTolerance = 1e-14;
inline double signed_square(double t) { return t * std::abs(t); }
inline double signed_sqrt(double r) { return std::copysign(std::sqrt(std::abs(r)), r); }
}  // namespace detail

/// 2ab / (b^2 - a^2). Diverges for balanced states |a| = |b|.
inline double delta_for_state(const QlState& s) {
  const double den = (s.b - s.a) * (s.b + s.a);
  if (std::abs(den) <= detail::kPoleTolerance)
    throw PoleError("Delta diverges at |a| = |b|; use the delta_inv branch");
  return 2.0 * s.a * s.b / den;
}

inline double delta_inv_for_state(const QlState& s) {
  const double den = 2.0 * s.a * s.b;
  if (std::abs(den) <= detail::kPoleTolerance)
    throw PoleError("Delta^-1 diverges when a = 0 or b = 0; use the delta branch");
  return (s.b - s.a) * (s.b + s.a) / den;
}

/// Signed l_A/l_B ratio: (w1/w2)|w1/w2|. Diverges at a = b.
inline double delta_c_for_state(const QlState& s) {
  if (std::abs(s.w2) <= detail::kPoleTolerance)
    throw PoleError("Delta_C diverges at a = b; use the delta_c_inv branch");
  return detail::signed_square(s.w1 / s.w2);
}

inline double delta_c_inv_for_state(const QlState& s) {
  if (std::abs(s.w1) <= detail::kPoleTolerance)
    throw PoleError("Delta_C^-1 diverges at a = -b; use the delta_c branch");
  return detail::signed_square(s.w2 / s.w1);
}

inline double ratio_for_state(Branch branch, const QlState& s) {
  switch (branch) {
    case Branch::Delta: return delta_for_state(s);
    case Branch::DeltaInv: return delta_inv_for_state(s);
    case Branch::DeltaC: return delta_c_for_state(s);
    case Branch::DeltaCInv: return delta_c_inv_for_state(s);
  }
  throw ParameterError("unknown branch");
}

/// Delta when max(|a|,|b|) reaches the crossover amplitude (there |Delta| <= 1),
/// Delta^-1 otherwise. At the crossover both are +-1 and Delta is returned.
inline Branch select_branch_sym(const QlState& s) {
  const double m = std::max(std::abs(s.a), std::abs(s.b));
  return m >= switch_amplitude() - 1e-15 ? Branch::Delta : Branch::DeltaInv;
}

/// Delta_C for opposite-sign amplitudes, Delta_C^-1 for same-sign ones. When a
/// or b vanishes the two coincide (both equal 1) and Delta_C is returned.
inline Branch select_branch_asym(const QlState& s) {
  if (s.a == 0.0 || s.b == 0.0) return Branch::DeltaC;
  return std::signbit(s.a) != std::signbit(s.b) ? Branch::DeltaC : Branch::DeltaCInv;
}

// ---------------------------------------------------------------------------
// Quadrant selectors: a ratio determines a state only up to these choices.

enum class Quadrant {
  // delta: sign of a, and whether |a| >= |b|
  PosAMajor,
  PosAMinor,
  NegAMajor,
  NegAMinor,
  // delta_inv: signs of a and b
  PosAPosB,
  PosANegB,
  NegAPosB,
  NegANegB,
  // delta_c: a > b or b > a
  AAboveB,
  BAboveA,
  // delta_c_inv: a > -b or -b > a
  AAboveNegB,
  NegBAboveA,
};

inline constexpr std::array<Quadrant, 12> kAllQuadrants = {
    Quadrant::PosAMajor, Quadrant::PosAMinor, Quadrant::NegAMajor, Quadrant::NegAMinor,
    Quadrant::PosAPosB,  Quadrant::PosANegB,  Quadrant::NegAPosB,  Quadrant::NegANegB,
    Quadrant::AAboveB,   Quadrant::BAboveA,   Quadrant::AAboveNegB, Quadrant::NegBAboveA};

inline constexpr std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::PosAMajor: return "pos_a_major";
    case Quadrant::PosAMinor: return "pos_a_minor";
    case Quadrant::NegAMajor: return "neg_a_major";
    case Quadrant::NegAMinor: return "neg_a_minor";
    case Quadrant::PosAPosB: return "pos_a_pos_b";
    case Quadrant::PosANegB: return "pos_a_neg_b";
    case Quadrant::NegAPosB: return "neg_a_pos_b";
    case Quadrant::NegANegB: return "neg_a_neg_b";
    case Quadrant::AAboveB: return "a_above_b";
    case Quadrant::BAboveA: return "b_above_a";
    case Quadrant::AAboveNegB: return "a_above_neg_b";
    case Quadrant::NegBAboveA: return "neg_b_above_a";
  }
  return "?";
}

inline Quadrant quadrant_from_string(std::string_view s) {
  for (Quadrant q : kAllQuadrants)
    if (to_string(q) == s) return q;
  throw ParameterError("unknown quadrant '" + std::string(s) + "'");
}

inline constexpr bool valid_for(Branch b, Quadrant q) {
  const int i = static_cast<int>(q);
  switch (b) {
    case Branch::Delta: return i <= 3;
    case Branch::DeltaInv: return i >= 4 && i <= 7;
    case Branch::DeltaC: return i == 8 || i == 9;
    case Branch::DeltaCInv: return i == 10 || i == 11;
  }
  return false;
}

inline std::vector<Quadrant> quadrants_for(Branch b) {
  std::vector<Quadrant> out;
  for (Quadrant q : kAllQuadrants)
    if (valid_for(b, q)) out.push_back(q);
  return out;
}

inline Quadrant quadrant_of(Branch branch, const QlState& s) {
  const bool pos_a = !std::signbit(s.a);
  const bool pos_b = !std::signbit(s.b);
  switch (branch) {
    case Branch::Delta: {
      const bool major = std::abs(s.a) >= std::abs(s.b);
      if (pos_a) return major ? Quadrant::PosAMajor : Quadrant::PosAMinor;
      return major ? Quadrant::NegAMajor : Quadrant::NegAMinor;
    }
    case Branch::DeltaInv:
      if (pos_a) return pos_b ? Quadrant::PosAPosB : Quadrant::PosANegB;
      return pos_b ? Quadrant::NegAPosB : Quadrant::NegANegB;
    case Branch::DeltaC: return s.a >= s.b ? Quadrant::AAboveB : Quadrant::BAboveA;
    case Branch::DeltaCInv: return s.a >= -s.b ? Quadrant::AAboveNegB : Quadrant::NegBAboveA;
  }
  throw ParameterError("unknown branch");
}

/// Inverts a tuning ratio back to amplitudes on the unit circle, using the
/// quadrant selector to fix the signs the ratio cannot see.
inline QlState amplitudes_from_ratio(Branch branch, double ratio, Quadrant q) {
  if (!std::isfinite(ratio)) throw ParameterError("ratio must be finite");
  if (!valid_for(branch, q))
    throw ParameterError("quadrant '" + std::string(to_string(q)) + "' is not a selector for branch '" +
                         std::string(to_string(branch)) + "'");
  const double h = std::hypot(1.0, ratio);
  switch (branch) {
    case Branch::Delta: {
      // |cos 2theta| = 1/h; the small side is computed without cancellation.
      const double big = 0.5 * (1.0 + 1.0 / h);
      const double small = 0.5 * ratio * ratio / (h * (h + 1.0));
      const bool major = q == Quadrant::PosAMajor || q == Quadrant::NegAMajor;
      const double a_sign = (q == Quadrant::PosAMajor || q == Quadrant::PosAMinor) ? 1.0 : -1.0;
      const double a = a_sign * std::sqrt(major ? big : small);
      double b = std::sqrt(major ? small : big);
      // sign(b) = sign(Delta) * sign(b^2 - a^2) * sign(a)
      if (ratio != 0.0) b *= (ratio > 0 ? 1.0 : -1.0) * (major ? -1.0 : 1.0) * a_sign;
      return state_from_weights((a + b) * kInvSqrt2, (a - b) * kInvSqrt2);
    }
    case Branch::DeltaInv: {
      const double a_sign = (q == Quadrant::PosAPosB || q == Quadrant::PosANegB) ? 1.0 : -1.0;
      const double b_sign = (q == Quadrant::PosAPosB || q == Quadrant::NegAPosB) ? 1.0 : -1.0;
      const double big = 0.5 * (1.0 + std::abs(ratio) / h);
      const double small = 0.5 / (h * (h + std::abs(ratio)));
      // a^2 = (1 - sign(ab) r / h) / 2
      const bool a_small = a_sign * b_sign * ratio >= 0.0;
      const double a = a_sign * std::sqrt(a_small ? small : big);
      const double b = b_sign * std::sqrt(a_small ? big : small);
      return state_from_weights((a + b) * kInvSqrt2, (a - b) * kInvSqrt2);
    }
    case Branch::DeltaC: {
      const double t = detail::signed_sqrt(ratio);  // w1 / w2
      const double w2 = (q == Quadrant::AAboveB ? 1.0 : -1.0) / std::hypot(1.0, t);
      return state_from_weights(t * w2, w2);
    }
    case Branch::DeltaCInv: {
      const double s = detail::signed_sqrt(ratio);  // w2 / w1
      const double w1 = (q == Quadrant::AAboveNegB ? 1.0 : -1.0) / std::hypot(1.0, s);
      return state_from_weights(w1, s * w1);
    }
  }
  throw ParameterError("unknown branch");
}

/// Unified eigen-condition for psi on the block network with
/// subgraph degrees k_A, k_B and effective (sign-adjusted) coupling row sums
/// l_A, l_B: w2^2 l_A - w1^2 l_B + w1 w2 (k_B - k_A). Zero exactly when psi
/// is an eigenvector; its magnitude equals min_lambda ||R psi - lambda psi||.
inline double characteristic_residual(double k_A, double k_B, double l_A, double l_B, const QlState& s) {
  return s.w2 * s.w2 * l_A - s.w1 * s.w1 * l_B + s.w1 * s.w2 * (k_B - k_A);
}

// ---------------------------------------------------------------------------
// Tuning plans

struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational make(long long num, long long den) {
    if (den == 0) throw ParameterError("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    return {num, den};
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct TuningPlan {
  Branch branch = Branch::Delta;
  double target = 0.0;
  int n = 0;
  int k_A = 0;
  int k_B = 0;
  int l_A = 0;
  int l_B = 0;
  int sign = -1;
  /// Real coupling degree in continuous-l mode (symmetric branches only).
  std::optional<double> l_real;
  Rational achieved;
  Quadrant quadrant = Quadrant::PosAMajor;
  double lambda_pred = 0.0;
  double abs_error = 0.0;

  bool symmetric() const { return is_symmetric_branch(branch); }
  bool continuous() const { return l_real.has_value(); }
  double l_A_value() const { return l_real.value_or(static_cast<double>(l_A)); }
  double l_B_value() const { return l_real.value_or(static_cast<double>(l_B)); }
  /// Signed couplings that enter the eigen-equations.
  double l_eff_A() const { return -sign * l_A_value(); }
  double l_eff_B() const { return -sign * l_B_value(); }

  double achieved_ratio() const {
    if (!l_real) return achieved.value();
    const double d = static_cast<double>(k_A - k_B);
    return branch == Branch::Delta ? d / (2.0 * l_eff_A()) : 2.0 * l_eff_A() / d;
  }
};

/// The state a plan actually realizes: its achieved ratio mapped back through
/// the plan's quadrant.
inline QlState achieved_state(const TuningPlan& plan) {
  return amplitudes_from_ratio(plan.branch, plan.achieved_ratio(), plan.quadrant);
}

/// Eigenvalue carried by `state` on networks built from `plan`. Both block
/// equations are evaluated and must agree; at a pole only the well-defined one
/// is used.
inline double predicted_lambda(const TuningPlan& plan, const QlState& s) {
  const double kA = plan.k_A;
  const double kB = plan.k_B;
  const double lA = plan.l_eff_A();
  const double lB = plan.l_eff_B();
  constexpr double tiny = detail::kPoleTolerance;
  if (std::abs(s.w1) <= tiny) return kB - (s.w1 / s.w2) * lB;
  if (std::abs(s.w2) <= tiny) return kA - (s.w2 / s.w1) * lA;
  const double from_a = kA - (s.w2 / s.w1) * lA;
  const double from_b = kB - (s.w1 / s.w2) * lB;
  const double scale = std::max({1.0, std::abs(from_a), std::abs((s.w2 / s.w1) * lA)});
  if (std::abs(from_a - from_b) > 1e-10 * scale)
    throw ContractViolation("predicted_lambda: state is not consistent with the plan (block eigenvalues " +
                            std::to_string(from_a) + " vs " + std::to_string(from_b) + ")");
  return from_a;
}

struct RationalizeOptions {
  int sign = -1;
  /// Upper bound on every degree; 0 means n - 1.
  int max_degree = 0;
  /// Shared subgraph degree for the asymmetric branches; defaults to the
  /// largest feasible one.
  std::optional<int> k;
  /// Selector used for lambda_pred; defaults to the one with the largest
  /// eigenvalue (the emergent eigenvector).
  std::optional<Quadrant> quadrant;
};

namespace detail {

inline bool degree_feasible(int n, int k, int floor, int kmax) {
  return k >= floor && k <= kmax && (static_cast<long>(n) * k) % 2 == 0;
}

inline void finish_plan(TuningPlan& plan, const RationalizeOptions& opts) {
  plan.abs_error = std::abs(plan.target - plan.achieved_ratio());
  if (opts.quadrant) {
    if (!valid_for(plan.branch, *opts.quadrant))
      throw ParameterError("quadrant selector does not belong to the plan's branch");
    plan.quadrant = *opts.quadrant;
    plan.lambda_pred = predicted_lambda(plan, achieved_state(plan));
    return;
  }
  bool first = true;
  for (Quadrant q : quadrants_for(plan.branch)) {
    plan.quadrant = q;
    const double lam = predicted_lambda(plan, achieved_state(plan));
    if (first || lam > plan.lambda_pred) {
      plan.lambda_pred = lam;
      first = false;
    }
  }
  for (Quadrant q : quadrants_for(plan.branch)) {
    plan.quadrant = q;
    if (predicted_lambda(plan, achieved_state(plan)) == plan.lambda_pred) break;
  }
}

inline int resolve_kmax(int n, int max_degree) {
  return max_degree <= 0 ? n - 1 : std::min(max_degree, n - 1);
}

}  // namespace detail

/// Best integer realization of a target ratio on subgraphs of order n.
///
/// Symmetric branches search (k_A, k_B, l) with floor <= degrees <= n-1 and
/// n*k even; asymmetric branches search (l_A, l_B) with a shared k. The search
/// is exhaustive over differences d = k_A - k_B and couplings, so the returned
/// plan attains the grid minimum of |target - achieved|. Ties go to the larger
/// coupling, then to larger subgraph degrees.
inline TuningPlan rationalize(Branch branch, double target, int n, int floor, const RationalizeOptions& opts = {}) {
  if (!std::isfinite(target)) throw ParameterError("rationalize: target must be finite");
  if (n < 2) throw ParameterError("rationalize: need n >= 2");
  if (floor < 1) throw ParameterError("rationalize: degree floor must be >= 1");
  if (opts.sign != -1 && opts.sign != 1) throw ParameterError("rationalize: sign must be -1 or +1");
  const int kmax = detail::resolve_kmax(n, opts.max_degree);
  if (floor > kmax)
    throw InfeasibleError("rationalize: degree floor " + std::to_string(floor) + " exceeds the largest degree " +
                          std::to_string(kmax) + " allowed on n=" + std::to_string(n));

  TuningPlan plan;
  plan.branch = branch;
  plan.target = target;
  plan.n = n;
  plan.sign = opts.sign;

  if (is_symmetric_branch(branch)) {
    // best (k_A, k_B) for each difference d, maximizing min(k_A, k_B)
    const int span = n - 1;
    std::vector<std::optional<std::pair<int, int>>> pair_for(2 * span + 1);
    for (int kB = kmax; kB >= floor; --kB) {
      if (!detail::degree_feasible(n, kB, floor, kmax)) continue;
      for (int kA = kmax; kA >= floor; --kA) {
        if (!detail::degree_feasible(n, kA, floor, kmax)) continue;
        const int d = kA - kB;
        if (std::abs(d) >= n) continue;
        auto& slot = pair_for[static_cast<std::size_t>(d + span)];
        if (!slot || std::min(kA, kB) > std::min(slot->first, slot->second)) slot = std::make_pair(kA, kB);
      }
    }

    bool found = false;
    double best_err = 0.0;
    int best_d = 0;
    int best_l = 0;
    for (int l = floor; l <= kmax; ++l) {
      const double l_eff = -opts.sign * static_cast<double>(l);
      for (int d = -span; d <= span; ++d) {
        const auto& slot = pair_for[static_cast<std::size_t>(d + span)];
        if (!slot) continue;
        if (branch == Branch::DeltaInv && d == 0) continue;
        const double ratio = branch == Branch::Delta ? d / (2.0 * l_eff) : 2.0 * l_eff / d;
        const double err = std::abs(target - ratio);
        bool better = !found || err < best_err;
        if (found && err == best_err) {
          const int cur_min = std::min(pair_for[static_cast<std::size_t>(best_d + span)]->first,
                                       pair_for[static_cast<std::size_t>(best_d + span)]->second);
          better = l > best_l || (l == best_l && std::min(slot->first, slot->second) > cur_min);
        }
        if (better) {
          found = true;
          best_err = err;
          best_d = d;
          best_l = l;
        }
      }
    }
    if (!found)
      throw InfeasibleError("rationalize: no feasible (k_A, k_B, l) on n=" + std::to_string(n) +
                            " with degree floor " + std::to_string(floor) + " (n*k must be even)");
    const auto [kA, kB] = *pair_for[static_cast<std::size_t>(best_d + span)];
    plan.k_A = kA;
    plan.k_B = kB;
    plan.l_A = plan.l_B = best_l;
    const long long l_eff = -static_cast<long long>(opts.sign) * best_l;
    plan.achieved = branch == Branch::Delta ? Rational::make(best_d, 2 * l_eff) : Rational::make(2 * l_eff, best_d);
  } else {
    int k = 0;
    if (opts.k) {
      k = *opts.k;
      if (k <= 0 || k >= n || (static_cast<long>(n) * k) % 2 != 0)
        throw InfeasibleError("rationalize: subgraph degree k=" + std::to_string(k) + " is not realizable on n=" +
                              std::to_string(n));
    } else {
      for (int c = kmax; c >= floor && k == 0; --c)
        if (detail::degree_feasible(n, c, floor, kmax)) k = c;
      if (k == 0) throw InfeasibleError("rationalize: no feasible subgraph degree on n=" + std::to_string(n));
    }
    plan.k_A = plan.k_B = k;

    int num = 0;
    int den = 0;
    if (std::abs(target) <= 1e-12) {
      // pole plan: the numerator coupling is switched off entirely
      num = 0;
      den = kmax;
    } else {
      bool found = false;
      double best_err = 0.0;
      const double sgn = target < 0 ? -1.0 : 1.0;
      for (int p = floor; p <= kmax; ++p) {
        for (int q = floor; q <= kmax; ++q) {
          const double err = std::abs(target - sgn * p / q);
          bool better = !found || err < best_err;
          if (found && err == best_err)
            better = std::min(p, q) > std::min(num, den) || (std::min(p, q) == std::min(num, den) && q > den);
          if (better) {
            found = true;
            best_err = err;
            num = p;
            den = q;
          }
        }
      }
    }
    if (branch == Branch::DeltaC) {
      plan.l_A = num;
      plan.l_B = den;
    } else {
      plan.l_B = num;
      plan.l_A = den;
    }
    plan.achieved = Rational::make(target < 0 ? -num : num, den);
  }

  detail::finish_plan(plan, opts);
  return plan;
}

/// Continuous-l realization of a symmetric branch: integer subgraph degrees
/// and a real coupling degree l in [0, n-1] that hits the target exactly.
/// Without explicit degrees, the largest feasible k is used for the denser
/// subgraph and the difference is chosen to maximize l.
inline TuningPlan continuous_plan(Branch branch, double target, int n, int sign = -1,
                                  std::optional<int> k_A = std::nullopt, std::optional<int> k_B = std::nullopt,
                                  std::optional<Quadrant> quadrant = std::nullopt) {
  if (!is_symmetric_branch(branch)) throw ParameterError("continuous-l mode supports the symmetric branches only");
  if (!std::isfinite(target)) throw ParameterError("continuous_plan: target must be finite");
  if (n < 2) throw ParameterError("continuous_plan: need n >= 2");
  if (sign != -1 && sign != 1) throw ParameterError("continuous_plan: sign must be -1 or +1");
  if (k_A.has_value() != k_B.has_value()) throw ParameterError("continuous_plan: give both k_A and k_B or neither");

  auto realizable = [n](int k) { return k > 0 && k < n && (static_cast<long>(n) * k) % 2 == 0; };
  // l_eff = -sign * l; solve the branch equation for l given d = k_A - k_B
  auto coupling_for = [&](int d) -> double {
    if (branch == Branch::Delta) return target == 0.0 ? 1.0 : d / (2.0 * target) * -sign;
    return target * d / 2.0 * -sign;
  };

  TuningPlan plan;
  plan.branch = branch;
  plan.target = target;
  plan.n = n;
  plan.sign = sign;

  if (k_A) {
    if (!realizable(*k_A) || !realizable(*k_B))
      throw ParameterError("continuous_plan: subgraph degrees must satisfy 0 < k < n with n*k even");
    const int d = *k_A - *k_B;
    if (branch == Branch::DeltaInv && d == 0) throw ParameterError("continuous_plan: delta_inv needs k_A != k_B");
    if (branch == Branch::Delta && target != 0.0 && d == 0)
      throw ParameterError("continuous_plan: a nonzero Delta needs k_A != k_B");
    const double l = coupling_for(d);
    if (!(l >= 0.0) || l > n - 1)
      throw InfeasibleError("continuous_plan: required coupling l=" + std::to_string(l) + " is outside [0, n-1]");
    if (l == 0.0 && branch == Branch::Delta) throw InfeasibleError("continuous_plan: zero coupling");
    plan.k_A = *k_A;
    plan.k_B = *k_B;
    plan.l_real = l;
  } else {
    int high = 0;
    for (int k = n - 1; k > 0 && high == 0; --k)
      if (realizable(k)) high = k;
    if (high == 0) throw InfeasibleError("continuous_plan: no realizable subgraph degree");
    bool found = false;
    if (branch == Branch::Delta && target == 0.0) {
      plan.k_A = plan.k_B = high;
      plan.l_real = 1.0;
      found = true;
    }
    for (int mag = high - 1; mag >= 1 && !found; --mag) {
      const int low = high - mag;
      if (!realizable(low)) continue;
      for (int d : {mag, -mag}) {
        const double l = coupling_for(d);
        if (l >= 0.0 && l <= n - 1 && !(branch == Branch::Delta && l == 0.0)) {
          plan.k_A = d > 0 ? high : low;
          plan.k_B = d > 0 ? low : high;
          plan.l_real = l;
          found = true;
          break;
        }
      }
    }
    if (!found)
      throw InfeasibleError("continuous_plan: no degree pair on n=" + std::to_string(n) +
                            " puts the coupling inside [0, n-1] for target " + std::to_string(target));
  }
  plan.l_A = plan.l_B = 0;
  plan.achieved = Rational::make(0, 1);
  RationalizeOptions opts;
  opts.sign = sign;
  opts.quadrant = quadrant;
  detail::finish_plan(plan, opts);
  return plan;
}

// ---------------------------------------------------------------------------
// Block networks

struct BlockNetwork {
  int n = 0;
  Mat A, B, C_A, C_B;
  /// [[A, C_A], [C_B, B]]
  Mat R;
  bool symmetric = false;
  std::optional<int> k_A, k_B;
  /// Absolute coupling row sums when constant.
  std::optional<double> l_A, l_B;
  int sign = -1;
  bool real_valued = false;
  std::uint64_t seed = 0;
  bool connected = false;
  bool strongly_connected = false;
};

namespace detail {

inline std::optional<double> constant_row_sum(const Mat& m, bool absolute, double tol = 1e-12) {
  if (m.rows() == 0) return std::nullopt;
  std::optional<double> value;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (double v : m.row(i)) s += absolute ? std::abs(v) : v;
    if (!value) value = s;
    else if (std::abs(*value - s) > tol * std::max(1.0, std::abs(s))) return std::nullopt;
  }
  return value;
}

inline std::optional<int> integer_regularity(const Mat& m) {
  auto s = constant_row_sum(m, false);
  if (!s || std::abs(*s - std::round(*s)) > 1e-12) return std::nullopt;
  return static_cast<int>(std::lround(*s));
}

inline int infer_sign(const Mat& a, const Mat& b) {
  for (const Mat* m : {&a, &b})
    for (double v : m->data())
      if (v != 0.0) return v < 0 ? -1 : 1;
  return -1;
}

}  // namespace detail

/// Composite network from raw blocks. Metadata (regularities, coupling sums,
/// symmetry, connectivity) is inferred from the entries.
inline BlockNetwork assemble_blocks(Mat A, Mat B, Mat C_A, Mat C_B) {
  const std::size_t n = A.rows();
  for (const Mat* m : {&A, &B, &C_A, &C_B})
    if (m->rows() != n || m->cols() != n)
      throw ParameterError("assemble: all blocks must be n x n (n=" + std::to_string(n) + ")");
  BlockNetwork net;
  net.n = static_cast<int>(n);
  net.R = Mat(2 * n, 2 * n);
  net.R.set_block(0, 0, A);
  net.R.set_block(0, n, C_A);
  net.R.set_block(n, 0, C_B);
  net.R.set_block(n, n, B);
  net.symmetric = is_symmetric(net.R, 0.0);
  net.k_A = detail::integer_regularity(A);
  net.k_B = detail::integer_regularity(B);
  net.l_A = detail::constant_row_sum(C_A, true);
  net.l_B = detail::constant_row_sum(C_B, true);
  net.sign = detail::infer_sign(C_A, C_B);
  for (const Mat* m : {&C_A, &C_B})
    for (double v : m->data())
      if (v != 0.0 && v != 1.0 && v != -1.0) net.real_valued = true;
  net.connected = graphgen::is_connected(net.R);
  net.strongly_connected = graphgen::is_strongly_connected(net.R);
  net.A = std::move(A);
  net.B = std::move(B);
  net.C_A = std::move(C_A);
  net.C_B = std::move(C_B);
  return net;
}

/// Composite network R = [[A, C_A], [C_B, B]]. Without C_B the coupling is
/// undirected and C_B = C_A^T.
inline BlockNetwork assemble(const graphgen::SimpleGraph& A, const graphgen::SimpleGraph& B,
                             const graphgen::BipartiteCoupling& C_A,
                             const std::optional<graphgen::BipartiteCoupling>& C_B = std::nullopt) {
  Mat cb = C_B ? C_B->matrix : C_A.matrix.transpose();
  auto net = assemble_blocks(A.adjacency, B.adjacency, C_A.matrix, std::move(cb));
  if (A.regularity) net.k_A = A.regularity;
  if (B.regularity) net.k_B = B.regularity;
  net.sign = C_A.sign;
  return net;
}

/// Generates exact-regular blocks for a plan. Every block draws from its own
/// stream derived from `seed`. With `balanced_directed`, asymmetric couplings
/// are also column-regular (needed for block-constant random-walk
/// distributions).
inline BlockNetwork build_network(const TuningPlan& plan, std::uint64_t seed, bool balanced_directed = false) {
  const int n = plan.n;
  auto A = graphgen::gen_random_regular(n, plan.k_A, derive_seed(seed, "A"));
  auto B = graphgen::gen_random_regular(n, plan.k_B, derive_seed(seed, "B"));
  BlockNetwork net;
  if (plan.symmetric()) {
    auto C = plan.l_real ? graphgen::gen_real_biregular(n, *plan.l_real, plan.sign, derive_seed(seed, "C"))
                         : graphgen::gen_biregular_bipartite(n, plan.l_A, plan.sign, derive_seed(seed, "C"));
    net = assemble(A, B, C);
  } else {
    auto gen = balanced_directed ? graphgen::gen_balanced_directed : graphgen::gen_row_regular_directed;
    auto CA = gen(n, plan.l_A, plan.sign, derive_seed(seed, "C_A"));
    auto CB = gen(n, plan.l_B, plan.sign, derive_seed(seed, "C_B"));
    net = assemble(A, B, CA, CB);
  }
  net.sign = plan.sign;
  net.seed = seed;
  return net;
}

// ---------------------------------------------------------------------------
// State -> plan pipeline

enum class Mode { Symmetric, Asymmetric, Continuous };

inline constexpr std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Symmetric: return "symmetric";
    case Mode::Asymmetric: return "asymmetric";
    case Mode::Continuous: return "continuous";
  }
  return "?";
}

inline Mode mode_from_string(std::string_view s) {
  for (Mode m : {Mode::Symmetric, Mode::Asymmetric, Mode::Continuous})
    if (to_string(m) == s) return m;
  if (s == "continuous-l") return Mode::Continuous;
  throw ParameterError("unknown mode '" + std::string(s) + "'");
}

struct PlanRequest {
  Mode mode = Mode::Symmetric;
  int n = 30;
  int floor = 1;
  RationalizeOptions options;
  /// Overrides the switching rule.
  std::optional<Branch> branch;
  /// Continuous mode: explicit subgraph degrees.
  std::optional<int> k_A, k_B;
};

/// Picks the branch for `state` (switching rule unless overridden), computes
/// its target ratio and realizes it under the requested mode.
inline TuningPlan plan_for_state(const QlState& state, const PlanRequest& req) {
  Branch branch = req.branch.value_or(req.mode == Mode::Asymmetric ? select_branch_asym(state)
                                                                    : select_branch_sym(state));
  if (req.mode == Mode::Asymmetric && is_symmetric_branch(branch))
    throw ParameterError("asymmetric mode needs the delta_c or delta_c_inv branch");
  if (req.mode != Mode::Asymmetric && !is_symmetric_branch(branch))
    throw ParameterError("symmetric modes need the delta or delta_inv branch");
  const double target = ratio_for_state(branch, state);
  const Quadrant q = quadrant_of(branch, state);
  if (req.mode == Mode::Continuous)
    return continuous_plan(branch, target, req.n, req.options.sign, req.k_A, req.k_B, q);
  RationalizeOptions opts = req.options;
  opts.quadrant = q;
  return rationalize(branch, target, req.n, req.floor, opts);
}

}  // namespace qlbits::core
