#include <gtest/gtest.h>

#include <sstream>

#include "qlbits/io.hpp"

using namespace qlbits;

TEST(Coo, RoundTrip) {
  Mat m(3, 4);
  m(0, 1) = -1;
  m(2, 3) = 0.125;
  m(1, 0) = 1.0 / 3.0;
  auto back = io::from_coo(io::to_coo(m), 3, 4);
  EXPECT_EQ(back, m);
  EXPECT_THROW(io::from_coo(io::Json::parse("[[5,0,1]]"), 3, 4), ParameterError);
  EXPECT_THROW(io::from_coo(io::Json::parse("[[0,0]]"), 3, 4), ParameterError);
}

TEST(PlanJson, RoundTrip) {
  auto plan = core::rationalize(core::Branch::Delta, 2 * std::sqrt(2.0), 30, 1);
  auto back = io::plan_from_json(io::Json::parse(io::to_json(plan).dump()));
  EXPECT_EQ(back.branch, plan.branch);
  EXPECT_EQ(back.achieved, plan.achieved);
  EXPECT_EQ(back.k_A, plan.k_A);
  EXPECT_EQ(back.quadrant, plan.quadrant);
  EXPECT_EQ(back.lambda_pred, plan.lambda_pred);

  auto cont = core::continuous_plan(core::Branch::Delta, 2 * std::sqrt(2.0), 30, -1, 25, 20);
  auto cback = io::plan_from_json(io::Json::parse(io::to_json(cont).dump()));
  ASSERT_TRUE(cback.l_real.has_value());
  EXPECT_EQ(*cback.l_real, *cont.l_real);
  EXPECT_EQ(cback.achieved_ratio(), cont.achieved_ratio());

  EXPECT_THROW(io::plan_from_json(io::Json::parse("{\"branch\":\"delta\"}")), ParameterError);
}

TEST(GraphJson, ReingestReproducesReport) {
  for (auto mode : {core::Mode::Symmetric, core::Mode::Asymmetric, core::Mode::Continuous}) {
    core::PlanRequest req;
    req.mode = mode;
    req.n = 20;
    const auto st = core::state_from_amplitudes(0.6, -0.8);
    const auto plan = core::plan_for_state(st, req);
    const auto net = core::build_network(plan, 12);
    const auto rep = spectral::verify_plan(net, plan);
    const auto text = io::to_json(net).dump();
    const auto net2 = io::network_from_json(io::Json::parse(text));
    EXPECT_EQ(net2.R, net.R);
    EXPECT_EQ(net2.symmetric, net.symmetric);
    const auto plan2 = io::plan_from_json(io::Json::parse(io::to_json(plan).dump()));
    const auto rep2 = spectral::verify_plan(net2, plan2);
    EXPECT_EQ(io::to_json(rep2), io::to_json(rep)) << core::to_string(mode);
  }
}

TEST(Csv, SpectrumAndStationary) {
  std::ostringstream os;
  io::write_spectrum_csv(os, {3.0, -1.0});
  EXPECT_EQ(os.str(), "index,eigenvalue\n0,3\n1,-1\n");
  std::ostringstream st;
  io::write_stationary_csv(st, {0.25, 0.25, 0.25, 0.25}, 2);
  EXPECT_EQ(st.str(), "vertex,block,pi\n0,A,0.25\n1,A,0.25\n2,B,0.25\n3,B,0.25\n");
}
