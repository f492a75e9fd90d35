#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qlbits/qlcore.hpp"
#include "qlbits/spectral.hpp"

using namespace qlbits;
using namespace qlbits::core;

namespace {

const double kS3 = std::sqrt(1.0 / 3.0);
const double kS23 = std::sqrt(2.0 / 3.0);

// Sign-insensitive amplitude distance.
double state_distance(const QlState& x, double a, double b) {
  const double plus = std::hypot(x.a - a, x.b - b);
  const double minus = std::hypot(x.a + a, x.b + b);
  return std::min(plus, minus);
}

}  // namespace

TEST(State, WeightsAndNormalization) {
  auto s = state_from_amplitudes(kS3, kS23);
  EXPECT_NEAR(s.w1, (kS3 + kS23) / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.w2, (kS3 - kS23) / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.w1 * s.w1 + s.w2 * s.w2, 1.0, 1e-15);

  auto r = state_from_amplitudes(0.6 * (1 + 4e-10), 0.8 * (1 + 4e-10));
  EXPECT_TRUE(r.renormalized);
  EXPECT_NEAR(r.a, 0.6, 1e-15);
  EXPECT_THROW(state_from_amplitudes(0.6, 0.81), InvalidStateError);
  EXPECT_THROW(state_from_amplitudes(0.0, 0.0), InvalidStateError);
  EXPECT_THROW(state_from_amplitudes(NAN, 1.0), InvalidStateError);
}

TEST(Ratios, DeltaExamples) {
  // Delta = 2ab / (b^2 - a^2)
  EXPECT_NEAR(delta_for_state(state_from_amplitudes(kS3, kS23)), 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(delta_for_state(state_from_amplitudes(1.0, 0.0)), 0.0);
  EXPECT_THROW(delta_for_state(state_from_amplitudes(std::sqrt(0.5), std::sqrt(0.5))), PoleError);
  EXPECT_THROW(delta_for_state(state_from_amplitudes(std::sqrt(0.5), -std::sqrt(0.5))), PoleError);
}

TEST(Ratios, DeltaInvExamples) {
  EXPECT_EQ(delta_inv_for_state(state_from_amplitudes(std::sqrt(0.5), std::sqrt(0.5))), 0.0);
  EXPECT_NEAR(delta_inv_for_state(state_from_amplitudes(kS3, kS23)), 1.0 / (2.0 * std::sqrt(2.0)), 1e-12);
  EXPECT_THROW(delta_inv_for_state(state_from_amplitudes(1.0, 0.0)), PoleError);
}

TEST(Ratios, DeltaCSignedSquare) {
  EXPECT_NEAR(delta_c_for_state(state_from_amplitudes(1.0, 0.0)), 1.0, 1e-15);
  EXPECT_NEAR(delta_c_for_state(state_from_amplitudes(0.0, 1.0)), -1.0, 1e-15);
  // For (sqrt(1/3), sqrt(2/3)): w1/w2 = (1+sqrt2)/(1-sqrt2) = -(1+sqrt2)^2
  const double t = -(1 + std::sqrt(2.0)) * (1 + std::sqrt(2.0));
  EXPECT_NEAR(delta_c_for_state(state_from_amplitudes(kS3, kS23)), -t * t, 1e-9);
  EXPECT_NEAR(delta_c_inv_for_state(state_from_amplitudes(kS3, kS23)), -1.0 / (t * t), 1e-12);
  EXPECT_THROW(delta_c_for_state(state_from_amplitudes(std::sqrt(0.5), std::sqrt(0.5))), PoleError);
  EXPECT_THROW(delta_c_inv_for_state(state_from_amplitudes(std::sqrt(0.5), -std::sqrt(0.5))), PoleError);
}

TEST(Switching, SymmetricRule) {
  const double c = switch_amplitude();
  EXPECT_NEAR(c, 0.92387953251128675613, 1e-16);
  EXPECT_EQ(select_branch_sym(state_from_amplitudes(std::sqrt(0.5), std::sqrt(0.5))), Branch::DeltaInv);
  EXPECT_EQ(select_branch_sym(state_from_amplitudes(1.0, 0.0)), Branch::Delta);
  EXPECT_EQ(select_branch_sym(state_from_amplitudes(0.0, -1.0)), Branch::Delta);
  // |a| = 0.5 gives |Delta| = sqrt(3) > 1, so the inverse branch is the bounded one
  EXPECT_EQ(select_branch_sym(state_from_amplitudes(0.5, std::sqrt(0.75))), Branch::DeltaInv);
  // at the crossover both ratios equal 1
  auto s = state_from_amplitudes(c, std::sqrt(1 - c * c));
  EXPECT_EQ(select_branch_sym(s), Branch::Delta);
  EXPECT_NEAR(std::abs(delta_for_state(s)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(delta_inv_for_state(s)), 1.0, 1e-12);
}

TEST(Switching, AsymmetricRule) {
  EXPECT_EQ(select_branch_asym(state_from_amplitudes(0.6, -0.8)), Branch::DeltaC);
  EXPECT_EQ(select_branch_asym(state_from_amplitudes(-0.6, 0.8)), Branch::DeltaC);
  EXPECT_EQ(select_branch_asym(state_from_amplitudes(0.6, 0.8)), Branch::DeltaCInv);
  EXPECT_EQ(select_branch_asym(state_from_amplitudes(1.0, 0.0)), Branch::DeltaC);
  // the selected ratio is bounded by 1 in magnitude
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 2 * M_PI);
  for (int i = 0; i < 2000; ++i) {
    const double th = u(rng);
    auto st = state_from_amplitudes(std::cos(th), std::sin(th));
    const auto b = select_branch_asym(st);
    EXPECT_LE(std::abs(ratio_for_state(b, st)), 1.0 + 1e-12);
  }
}

TEST(Quadrants, SelectorsBelongToBranch) {
  EXPECT_THROW(amplitudes_from_ratio(Branch::Delta, 1.0, Quadrant::AAboveB), ParameterError);
  EXPECT_THROW(amplitudes_from_ratio(Branch::DeltaC, 1.0, Quadrant::PosAMajor), ParameterError);
  EXPECT_EQ(quadrants_for(Branch::Delta).size(), 4u);
  EXPECT_EQ(quadrants_for(Branch::DeltaInv).size(), 4u);
  EXPECT_EQ(quadrants_for(Branch::DeltaC).size(), 2u);
  EXPECT_EQ(quadrants_for(Branch::DeltaCInv).size(), 2u);
  for (auto q : kAllQuadrants) EXPECT_EQ(quadrant_from_string(to_string(q)), q);
}

TEST(Quadrants, WorkedExamples) {
  // Delta = 2 sqrt2 with a > 0 minor gives (sqrt(1/3), sqrt(2/3))
  auto s = amplitudes_from_ratio(Branch::Delta, 2 * std::sqrt(2.0), Quadrant::PosAMinor);
  EXPECT_NEAR(s.a, kS3, 1e-12);
  EXPECT_NEAR(s.b, kS23, 1e-12);
  auto z = amplitudes_from_ratio(Branch::DeltaInv, 0.0, Quadrant::PosAPosB);
  EXPECT_NEAR(z.a, std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(z.b, std::sqrt(0.5), 1e-15);
  // Delta_C = 1 crosses at (1, 0); Delta_C = -1 at (0, 1)
  auto one = amplitudes_from_ratio(Branch::DeltaC, 1.0, Quadrant::AAboveB);
  EXPECT_NEAR(one.a, 1.0, 1e-15);
  EXPECT_NEAR(one.b, 0.0, 1e-15);
  auto m1 = amplitudes_from_ratio(Branch::DeltaC, -1.0, Quadrant::BAboveA);
  EXPECT_NEAR(m1.a, 0.0, 1e-15);
  EXPECT_NEAR(m1.b, 1.0, 1e-15);
  auto inv1 = amplitudes_from_ratio(Branch::DeltaCInv, 1.0, Quadrant::AAboveNegB);
  EXPECT_NEAR(inv1.a, 1.0, 1e-15);
}

TEST(Quadrants, RoundTripAllBranches) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 2 * M_PI);
  for (int i = 0; i < 5000; ++i) {
    const double th = u(rng);
    auto st = state_from_amplitudes(std::cos(th), std::sin(th));
    for (Branch b : {Branch::Delta, Branch::DeltaInv, Branch::DeltaC, Branch::DeltaCInv}) {
      double r = 0;
      try {
        r = ratio_for_state(b, st);
      } catch (const PoleError&) {
        continue;
      }
      if (std::abs(r) > 1e6) continue;
      auto back = amplitudes_from_ratio(b, r, quadrant_of(b, st));
      EXPECT_LE(state_distance(back, st.a, st.b), 1e-9 * std::max(1.0, std::abs(r))) << to_string(b) << " th=" << th;
      EXPECT_NEAR(ratio_for_state(b, back), r, 1e-9 * std::max(1.0, std::abs(r)));
    }
  }
}

TEST(Characteristic, MatchesMinimumResidual) {
  // |characteristic residual| = min_lambda ||R psi - lambda psi|| for exact-regular blocks
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 6 + 2 * (trial % 3);
    std::uniform_int_distribution<int> kd(1, n - 1);
    const int kA = kd(rng), kB = kd(rng);
    const int lA = kd(rng), lB = kd(rng);
    auto A = graphgen::gen_random_regular(n, kA, rng());
    auto B = graphgen::gen_random_regular(n, kB, rng());
    auto CA = graphgen::gen_row_regular_directed(n, lA, -1, rng());
    auto CB = graphgen::gen_row_regular_directed(n, lB, -1, rng());
    auto net = assemble(A, B, CA, CB);
    std::uniform_real_distribution<double> u(0, 2 * M_PI);
    const double th = u(rng);
    const auto st = state_from_weights(std::cos(th), std::sin(th));
    const auto psi = spectral::state_vector(st, n);
    const double chi = characteristic_residual(kA, kB, lA, lB, st);
    EXPECT_NEAR(std::abs(chi), oracle::min_residual(net.R, psi), 1e-10);
  }
}

TEST(Rationalize, DeltaWorkedExample) {
  const double target = 2.0 * std::sqrt(2.0);
  auto plan = rationalize(Branch::Delta, target, 30, 1);
  EXPECT_EQ(plan.achieved, Rational::make(17, 6));
  EXPECT_EQ(plan.k_A, 29);
  EXPECT_EQ(plan.k_B, 12);
  EXPECT_EQ(plan.l_A, 3);
  EXPECT_EQ(plan.l_B, 3);
  EXPECT_NEAR(plan.abs_error, std::abs(target - 17.0 / 6.0), 1e-15);
  const auto oracle = oracle::symmetric_grid(false, target, 30, 1);
  EXPECT_EQ(plan.achieved.num, oracle.num);
  EXPECT_EQ(plan.achieved.den, oracle.den);
}

TEST(Rationalize, MatchesBruteForceGrid) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int i = 0; i < 60; ++i) {
    const int n = 6 + static_cast<int>(rng() % 15);
    const int floor = 1 + static_cast<int>(rng() % 3);
    const double t = u(rng);
    for (bool inv : {false, true}) {
      const auto plan = rationalize(inv ? Branch::DeltaInv : Branch::Delta, t, n, floor);
      const auto o = oracle::symmetric_grid(inv, t, n, floor);
      EXPECT_NEAR(plan.abs_error, static_cast<double>(o.error), 1e-15) << "n=" << n << " t=" << t;
      EXPECT_EQ(plan.achieved.value(), static_cast<double>(o.num) / o.den);
      EXPECT_GE(plan.k_A, floor);
      EXPECT_GE(plan.k_B, floor);
      EXPECT_EQ((n * plan.k_A) % 2, 0);
      EXPECT_EQ((n * plan.k_B) % 2, 0);
      EXPECT_LT(std::abs(plan.k_A - plan.k_B), n);
    }
    const auto ap = rationalize(Branch::DeltaC, t, n, floor);
    const auto ao = oracle::ratio_grid(t, n, floor);
    EXPECT_NEAR(ap.abs_error, static_cast<double>(ao.error), 1e-15);
    EXPECT_EQ(ap.achieved.value(), static_cast<double>(ao.num) / ao.den);
  }
}

TEST(Rationalize, AsymmetricExampleTarget) {
  const double target = (1 + std::sqrt(2.0)) / std::sqrt(3.0);
  EXPECT_NEAR(target, 1.3938, 5e-5);
  RationalizeOptions opts;
  opts.k = 20;
  auto plan = rationalize(Branch::DeltaC, target, 30, 15, opts);
  EXPECT_EQ(plan.achieved, Rational::make(25, 18));
  EXPECT_EQ(plan.l_A, 25);
  EXPECT_EQ(plan.l_B, 18);
  EXPECT_EQ(plan.k_A, 20);
  const auto o = oracle::ratio_grid(target, 30, 15);
  EXPECT_EQ(o.num, 25);
  EXPECT_EQ(o.den, 18);
}

TEST(Rationalize, PolePlanAndInfeasible) {
  auto plan = rationalize(Branch::DeltaCInv, 0.0, 20, 1);
  EXPECT_EQ(plan.l_B, 0);
  EXPECT_EQ(plan.l_A, 19);
  EXPECT_DOUBLE_EQ(plan.lambda_pred, plan.k_A);
  EXPECT_THROW(rationalize(Branch::Delta, 1.0, 10, 10), InfeasibleError);
  EXPECT_THROW(rationalize(Branch::Delta, 1.0, 1, 1), ParameterError);
  // n odd with every candidate degree odd: only k = 2 would work, floor excludes it
  EXPECT_THROW(rationalize(Branch::Delta, 1.0, 3, 1, {.sign = -1, .max_degree = 1, .k = {}, .quadrant = {}}), InfeasibleError);
  EXPECT_THROW(rationalize(Branch::Delta, INFINITY, 10, 1), ParameterError);
}

TEST(Rationalize, PositiveSignFlipsEffectiveCoupling) {
  RationalizeOptions o;
  o.sign = 1;
  auto plan = rationalize(Branch::Delta, 2.0, 20, 1, o);
  EXPECT_NEAR(plan.achieved_ratio(), 2.0, 1e-12);
  // l_eff = -l, so k_B > k_A
  EXPECT_LT(plan.k_A, plan.k_B);
}

TEST(PredictedLambda, BothBlockFormsAgree) {
  auto plan = rationalize(Branch::Delta, 2.0 * std::sqrt(2.0), 30, 1);
  for (auto q : quadrants_for(Branch::Delta)) {
    auto s = amplitudes_from_ratio(Branch::Delta, plan.achieved_ratio(), q);
    const double lam = predicted_lambda(plan, s);
    EXPECT_NEAR(lam, plan.k_A - (s.w2 / s.w1) * plan.l_eff_A(), 1e-12);
    EXPECT_NEAR(lam, plan.k_B - (s.w1 / s.w2) * plan.l_eff_B(), 1e-10);
  }
  // a state not matching the plan is a contract violation
  EXPECT_THROW(predicted_lambda(plan, state_from_amplitudes(0.6, 0.8)), ContractViolation);
}

TEST(PredictedLambda, RegularCompositeValues) {
  TuningPlan p;
  p.branch = Branch::Delta;
  p.n = 30;
  p.k_A = p.k_B = 20;
  p.l_A = p.l_B = 3;
  p.sign = -1;
  // |+> = (1, 0) has w1 = w2 and eigenvalue k - l; |-> has k + l
  EXPECT_NEAR(predicted_lambda(p, state_from_amplitudes(1, 0)), 17.0, 1e-12);
  EXPECT_NEAR(predicted_lambda(p, state_from_amplitudes(0, 1)), 23.0, 1e-12);
}

TEST(Continuous, WorkedExampleRealCoupling) {
  auto plan = continuous_plan(Branch::Delta, 2.0 * std::sqrt(2.0), 30, -1, 25, 20);
  ASSERT_TRUE(plan.l_real.has_value());
  EXPECT_NEAR(*plan.l_real, 5.0 * std::sqrt(2.0) / 8.0, 1e-15);
  EXPECT_NEAR(*plan.l_real, 0.8838835, 1e-7);
  EXPECT_NEAR(plan.achieved_ratio(), 2.0 * std::sqrt(2.0), 1e-14);
  EXPECT_THROW(continuous_plan(Branch::DeltaC, 1.0, 30), ParameterError);
  EXPECT_THROW(continuous_plan(Branch::Delta, 0.001, 30, -1, 29, 1), InfeasibleError);
}

TEST(Continuous, AutomaticDegrees) {
  for (double t : {-3.0, -0.4, 0.0, 0.25, 1.0, 5.0}) {
    for (Branch b : {Branch::Delta, Branch::DeltaInv}) {
      auto plan = continuous_plan(b, t, 30);
      EXPECT_NEAR(plan.achieved_ratio(), t, 1e-12) << to_string(b) << " " << t;
      EXPECT_GE(*plan.l_real, 0.0);
      EXPECT_LE(*plan.l_real, 29.0);
    }
  }
}

TEST(BuildNetwork, StructureMatchesPlan) {
  auto plan = rationalize(Branch::Delta, 2.0 * std::sqrt(2.0), 30, 1);
  auto net = build_network(plan, 7);
  EXPECT_TRUE(net.symmetric);
  EXPECT_EQ(net.k_A, plan.k_A);
  EXPECT_EQ(net.k_B, plan.k_B);
  EXPECT_EQ(net.l_A, 3.0);
  EXPECT_EQ(net.C_B, net.C_A.transpose());
  auto again = build_network(plan, 7);
  EXPECT_EQ(again.R, net.R);

  RationalizeOptions o;
  o.k = 20;
  auto aplan = rationalize(Branch::DeltaC, 1.3938, 30, 15, o);
  auto anet = build_network(aplan, 7);
  EXPECT_FALSE(anet.symmetric);
  EXPECT_EQ(anet.l_A, 25.0);
  EXPECT_EQ(anet.l_B, 18.0);
}

TEST(PlanForState, PipelineSelectsBranch) {
  PlanRequest req;
  req.n = 30;
  auto p = plan_for_state(state_from_amplitudes(std::sqrt(0.5), std::sqrt(0.5)), req);
  EXPECT_EQ(p.branch, Branch::DeltaInv);
  EXPECT_EQ(p.quadrant, Quadrant::PosAPosB);
  req.mode = Mode::Asymmetric;
  auto q = plan_for_state(state_from_amplitudes(1.0, 0.0), req);
  EXPECT_EQ(q.branch, Branch::DeltaC);
  EXPECT_EQ(q.l_A, q.l_B);
  auto pole = plan_for_state(state_from_amplitudes(std::sqrt(0.5), std::sqrt(0.5)), req);
  EXPECT_EQ(pole.branch, Branch::DeltaCInv);
  EXPECT_EQ(pole.l_B, 0);
  EXPECT_DOUBLE_EQ(pole.lambda_pred, pole.k_A);
  req.branch = Branch::Delta;
  EXPECT_THROW(plan_for_state(state_from_amplitudes(1.0, 0.0), req), ParameterError);
}
