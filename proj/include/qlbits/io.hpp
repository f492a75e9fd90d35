#pragma once

// JSON and CSV serialization for plans, networks and reports.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qlbits/error.hpp"
#include "qlbits/matrix.hpp"
#include "qlbits/qlcore.hpp"
#include "qlbits/randwalk.hpp"
#include "qlbits/spectral.hpp"
#include "qlbits/twoqubit.hpp"

namespace qlbits::io {

using Json = nlohmann::ordered_json;

/// Sparse [[row, col, weight], ...] listing of the nonzero entries.
inline Json to_coo(const Mat& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) out.push_back(Json::array({i, j, m(i, j)}));
  return out;
}

inline Mat from_coo(const Json& coo, std::size_t rows, std::size_t cols) {
  if (!coo.is_array()) throw ParameterError("COO block must be an array of [row, col, weight]");
  Mat m(rows, cols);
  for (const auto& e : coo) {
    if (!e.is_array() || e.size() != 3) throw ParameterError("COO entry must be [row, col, weight]");
    const auto r = e[0].get<std::size_t>();
    const auto c = e[1].get<std::size_t>();
    if (r >= rows || c >= cols) throw ParameterError("COO entry out of range");
    m(r, c) = e[2].get<double>();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Plans

inline Json to_json(const core::TuningPlan& p) {
  Json j;
  j["branch"] = core::to_string(p.branch);
  j["target"] = p.target;
  if (p.continuous()) j["achieved"] = nullptr;
  else j["achieved"] = {{"num", p.achieved.num}, {"den", p.achieved.den}};
  j["achieved_ratio"] = p.achieved_ratio();
  j["n"] = p.n;
  j["k_A"] = p.k_A;
  j["k_B"] = p.k_B;
  j["l_A"] = p.l_A;
  j["l_B"] = p.l_B;
  j["l_real"] = p.l_real ? Json(*p.l_real) : Json(nullptr);
  j["sign"] = p.sign;
  j["quadrant"] = core::to_string(p.quadrant);
  j["lambda_pred"] = p.lambda_pred;
  j["abs_error"] = p.abs_error;
  return j;
}

inline core::TuningPlan plan_from_json(const Json& j) {
  try {
    core::TuningPlan p;
    p.branch = core::branch_from_string(j.at("branch").get<std::string>());
    p.target = j.at("target").get<double>();
    p.n = j.at("n").get<int>();
    p.k_A = j.at("k_A").get<int>();
    p.k_B = j.at("k_B").get<int>();
    p.l_A = j.at("l_A").get<int>();
    p.l_B = j.at("l_B").get<int>();
    p.sign = j.at("sign").get<int>();
    if (j.contains("l_real") && !j["l_real"].is_null()) p.l_real = j["l_real"].get<double>();
    if (j.contains("achieved") && !j["achieved"].is_null())
      p.achieved = core::Rational::make(j["achieved"].at("num").get<long long>(), j["achieved"].at("den").get<long long>());
    p.quadrant = core::quadrant_from_string(j.at("quadrant").get<std::string>());
    p.lambda_pred = j.at("lambda_pred").get<double>();
    p.abs_error = j.at("abs_error").get<double>();
    if (!core::valid_for(p.branch, p.quadrant)) throw ParameterError("plan quadrant does not belong to its branch");
    return p;
  } catch (const Json::exception& e) {
    throw ParameterError(std::string("malformed plan JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Networks

inline Json to_json(const core::BlockNetwork& net) {
  Json j;
  j["n"] = net.n;
  j["blocks"] = {{"A", to_coo(net.A)}, {"B", to_coo(net.B)}, {"C_A", to_coo(net.C_A)}, {"C_B", to_coo(net.C_B)}};
  auto opt = [](const auto& o) { return o ? Json(*o) : Json(nullptr); };
  j["meta"] = {{"k_A", opt(net.k_A)}, {"k_B", opt(net.k_B)}, {"l_A", opt(net.l_A)}, {"l_B", opt(net.l_B)},
               {"sign", net.sign},    {"seed", net.seed}};
  return j;
}

inline core::BlockNetwork network_from_json(const Json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    const auto& b = j.at("blocks");
    auto net = core::assemble_blocks(from_coo(b.at("A"), n, n), from_coo(b.at("B"), n, n), from_coo(b.at("C_A"), n, n),
                                     from_coo(b.at("C_B"), n, n));
    if (j.contains("meta")) {
      const auto& m = j["meta"];
      if (m.contains("sign")) net.sign = m["sign"].get<int>();
      if (m.contains("seed")) net.seed = m["seed"].get<std::uint64_t>();
    }
    return net;
  } catch (const Json::exception& e) {
    throw ParameterError(std::string("malformed graph JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const core::QlState& s) {
  return {{"a", s.a}, {"b", s.b}, {"w1", s.w1}, {"w2", s.w2}, {"renormalized", s.renormalized}};
}

inline Json to_json(const spectral::SpectralReport& r) {
  Json j;
  j["lambda_pred"] = r.lambda_pred;
  j["lambda"] = r.lambda;
  j["psi_residual"] = r.psi_residual;
  j["residual"] = r.residual;
  j["fidelity"] = r.fidelity;
  j["gap"] = r.gap ? Json(*r.gap) : Json(nullptr);
  j["rank"] = r.rank;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["passes"] = r.passes();
  j["eigenvalues"] = r.eigenvalues;
  j["vector"] = r.vector;
  return j;
}

inline Json to_json(const spectral::GapFeasibility& g) {
  auto opt = [](const auto& o) { return o ? Json(*o) : Json(nullptr); };
  Json j;
  j["a"] = g.a;
  j["n"] = opt(g.n);
  j["min_p"] = opt(g.min_p);
  j["p"] = opt(g.p);
  j["min_n"] = opt(g.min_n);
  j["min_n_int"] = g.min_n ? Json(static_cast<long>(std::ceil(*g.min_n - 1e-12))) : Json(nullptr);
  j["regularity_limit"] = g.regularity_limit;
  j["min_regularity"] = g.min_regularity;
  return j;
}

inline Json to_json(const spectral::GapTrials& t) {
  return {{"n", t.n},           {"p", t.p},          {"a", t.a},        {"seed", t.seed},
          {"trials", t.gaps.size()}, {"passes", t.passes}, {"pass_rate", t.pass_rate()}, {"gaps", t.gaps}};
}

inline Json to_json(const walk::BlockStationary& s) {
  Json j = {{"pi_A", s.pi_A}, {"pi_B", s.pi_B}, {"X", s.X}, {"Y", s.Y}};
  j["delta"] = s.delta ? Json(*s.delta) : Json(nullptr);
  return j;
}

inline Json to_json(const walk::StationaryReport& r) {
  Json j;
  j["pi_A"] = r.pi_A;
  j["pi_B"] = r.pi_B;
  j["block_spread"] = r.block_spread;
  j["closed_form"] = r.closed ? to_json(*r.closed) : Json(nullptr);
  j["closed_error"] = r.closed_error ? Json(*r.closed_error) : Json(nullptr);
  j["max_residual"] = r.max_residual;
  j["steps"] = r.steps;
  j["converged"] = r.converged;
  return j;
}

inline Json to_json(const twoqubit::TwoQubitBasisReport& r) {
  Json pats = Json::array();
  for (const auto& p : r.patterns) {
    Json j;
    j["pattern"] = twoqubit::to_string(p.pattern);
    j["predicted"] = p.predicted;
    j["residual"] = p.residual;
    j["rayleigh"] = p.rayleigh;
    j["rayleigh_residual"] = p.rayleigh_residual;
    j["fidelity"] = p.fidelity;
    j["eigenspace_dim"] = p.eigenspace_dim;
    j["matches_prediction_of"] =
        p.matches_prediction_of ? Json(twoqubit::to_string(*p.matches_prediction_of)) : Json(nullptr);
    pats.push_back(std::move(j));
  }
  return {{"patterns", pats},
          {"tolerance", r.tolerance},
          {"max_overlap", r.max_overlap},
          {"all_eigenvectors", r.all_eigenvectors},
          {"predictions_hold", r.predictions_hold},
          {"spectrum", r.spectrum}};
}

inline Json to_json(const twoqubit::TwoQubitNetwork& net) {
  Json j;
  j["n"] = net.n;
  j["blocks"] = {{"A", to_coo(net.A)},       {"B", to_coo(net.B)},       {"D", to_coo(net.D)},
                 {"E", to_coo(net.E)},       {"C", to_coo(net.C)},       {"F", to_coo(net.F)},
                 {"X_AD", to_coo(net.X_AD)}, {"X_AE", to_coo(net.X_AE)}, {"X_BD", to_coo(net.X_BD)},
                 {"X_BE", to_coo(net.X_BE)}};
  j["meta"] = {{"k", net.k}, {"l", net.l}, {"j1", net.j1}, {"j2", net.j2}, {"seed", net.seed}};
  return j;
}

// ---------------------------------------------------------------------------
// CSV

/// index,eigenvalue
inline void write_spectrum_csv(std::ostream& os, const Vec& values) {
  os << "index,eigenvalue\n";
  os.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) os << i << ',' << values[i] << '\n';
}

/// vertex,block,pi
inline void write_stationary_csv(std::ostream& os, const Vec& pi, int n) {
  os << "vertex,block,pi\n";
  os.precision(17);
  for (std::size_t i = 0; i < pi.size(); ++i) os << i << ',' << (static_cast<int>(i) < n ? 'A' : 'B') << ',' << pi[i] << '\n';
}

}  // namespace qlbits::io
