// qlbits command-line front end.
//
//   qlbits construct --a A --b B [--mode symmetric|asymmetric|continuous] [--n N] ...
//   qlbits verify    --in RUN.json
//   qlbits gap       --min-gap 1 [--n N] [--p P] [--limit] [--trials T]
//   qlbits walk      --delta D --X X [--n N] | --mode asymmetric --k K --lA LA --lB LB
//   qlbits curves    --branch delta [--min -5 --max 5 --samples 101]
//   qlbits twoqubit  --n 8 --k 3 --l 1 --j1 1 --j2 1
//   qlbits spectrum  --in GRAPH.json
//
// Exit status: 0 when the requested verification passes, 1 when it fails,
// 2 for invalid or infeasible input.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qlbits/qlbits.hpp"

namespace {

using namespace qlbits;
using io::Json;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitBadInput = 2;

struct Common {
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed = true) {
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", c.out, "Output path (default: stdout)");
  if (with_seed) cmd->add_option("--seed", c.seed, "Run seed; every block derives its own stream from it");
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw ParameterError("cannot open output file '" + c.out + "'");
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

Json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParameterError("cannot open '" + path + "'");
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw ParameterError("'" + path + "' is not valid JSON: " + e.what());
  }
}

/// Amplitudes typed with a few decimals are rarely exactly on the unit circle;
/// the CLI normalizes them explicitly (the library itself only absorbs 1e-9).
core::QlState state_from_cli(double a, double b) {
  const double n2 = a * a + b * b;
  if (n2 > 0.0 && std::isfinite(n2) && std::abs(n2 - 1.0) > core::kNormTolerance) {
    std::cerr << "note: a^2 + b^2 = " << n2 << ", normalizing\n";
    auto s = core::state_from_amplitudes(a / std::sqrt(n2), b / std::sqrt(n2));
    s.renormalized = true;
    return s;
  }
  return core::state_from_amplitudes(a, b);
}

// ---------------------------------------------------------------------------

struct ConstructArgs {
  Common common;
  std::optional<double> a, b, ratio;
  std::string branch;
  std::string quadrant;
  std::string mode = "symmetric";
  int n = 30;
  int sign = -1;
  int floor = 1;
  int max_degree = 0;
  std::optional<int> k, kA, kB;
};

std::string spectrum_csv(const Vec& values) {
  std::ostringstream os;
  io::write_spectrum_csv(os, values);
  return os.str();
}

int run_construct(const ConstructArgs& args) {
  if (args.a.has_value() != args.b.has_value()) throw ParameterError("construct: give both --a and --b");
  if (args.a.has_value() == args.ratio.has_value())
    throw ParameterError("construct: give exactly one of (--a, --b) or --ratio");

  core::TuningPlan plan;
  core::QlState state;
  const core::Mode mode = core::mode_from_string(args.mode);
  core::RationalizeOptions opts;
  opts.sign = args.sign;
  opts.max_degree = args.max_degree;
  opts.k = args.k;

  if (args.a) {
    state = state_from_cli(*args.a, *args.b);
    core::PlanRequest req;
    req.mode = mode;
    req.n = args.n;
    req.floor = args.floor;
    req.options = opts;
    req.k_A = args.kA;
    req.k_B = args.kB;
    if (!args.branch.empty()) req.branch = core::branch_from_string(args.branch);
    plan = core::plan_for_state(state, req);
  } else {
    if (args.branch.empty()) throw ParameterError("construct: --ratio needs --branch");
    const core::Branch branch = core::branch_from_string(args.branch);
    if (!args.quadrant.empty()) opts.quadrant = core::quadrant_from_string(args.quadrant);
    if (mode == core::Mode::Continuous)
      plan = core::continuous_plan(branch, *args.ratio, args.n, args.sign, args.kA, args.kB, opts.quadrant);
    else
      plan = core::rationalize(branch, *args.ratio, args.n, args.floor, opts);
  }

  const auto net = core::build_network(plan, args.common.seed);
  const auto achieved = core::achieved_state(plan);
  const auto report = spectral::verify_state(net, achieved, plan);

  if (args.common.format == "csv") {
    emit(args.common, spectrum_csv(report.eigenvalues));
  } else {
    Json j;
    if (args.a) j["state"] = io::to_json(state);
    j["achieved_state"] = io::to_json(achieved);
    j["mode"] = args.mode;
    j["plan"] = io::to_json(plan);
    j["graph"] = io::to_json(net);
    j["report"] = io::to_json(report);
    emit(args.common, j.dump(2));
  }
  return report.passes() ? kExitOk : kExitFailed;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  Common common;
  std::string in;
  std::string graph;
  std::string plan;
};

int run_verify(const VerifyArgs& args) {
  Json run;
  if (!args.in.empty()) {
    run = read_json(args.in);
  } else {
    if (args.graph.empty() || args.plan.empty()) throw ParameterError("verify: give --in, or both --graph and --plan");
    run["graph"] = read_json(args.graph);
    Json p = read_json(args.plan);
    run["plan"] = p.contains("plan") ? p["plan"] : p;
  }
  if (!run.contains("plan") || !run.contains("graph")) throw ParameterError("verify: input needs 'plan' and 'graph'");
  const auto plan = io::plan_from_json(run["plan"]);
  const auto net = io::network_from_json(run["graph"]);
  const auto report = spectral::verify_state(net, core::achieved_state(plan), plan);
  const Json rep = io::to_json(report);

  std::optional<bool> matches;
  if (run.contains("report")) matches = run["report"] == rep;

  if (args.common.format == "csv") {
    emit(args.common, spectrum_csv(report.eigenvalues));
  } else {
    Json j;
    j["plan"] = run["plan"];
    j["report"] = rep;
    j["matches_stored"] = matches ? Json(*matches) : Json(nullptr);
    emit(args.common, j.dump(2));
  }
  if (matches && !*matches) std::cerr << "verify: recomputed report differs from the stored one\n";
  return report.passes() && matches.value_or(true) ? kExitOk : kExitFailed;
}

// ---------------------------------------------------------------------------

struct GapArgs {
  Common common;
  double a = 1.0;
  std::optional<double> n, p;
  bool limit = false;
  int trials = 0;
};

int run_gap(const GapArgs& args) {
  const auto feas = spectral::gap_feasibility(args.a, args.n, args.p);
  Json j;
  j["feasibility"] = io::to_json(feas);
  if (args.limit) j["limit"] = {{"np", feas.regularity_limit}, {"k_min", feas.min_regularity}};

  std::optional<spectral::GapTrials> mc;
  if (args.trials > 0) {
    if (!args.n) throw ParameterError("gap: --trials needs --n");
    const int n = static_cast<int>(*args.n);
    const double p = args.p.value_or(std::min(1.0, spectral::er_min_p(n, args.a) + 0.05));
    mc = spectral::er_gap_trials(n, p, args.trials, args.common.seed, args.a);
    j["monte_carlo"] = io::to_json(*mc);
  }

  if (args.common.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    if (mc) {
      os << "trial,n,p,gap,passes\n";
      for (std::size_t t = 0; t < mc->gaps.size(); ++t)
        os << t << ',' << mc->n << ',' << mc->p << ',' << mc->gaps[t] << ',' << (mc->gaps[t] >= args.a ? 1 : 0) << '\n';
    } else {
      os << "a,n,min_p,p,min_n,regularity_limit,min_regularity\n";
      auto opt = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string(); };
      os << feas.a << ',' << opt(feas.n) << ',' << opt(feas.min_p) << ',' << opt(feas.p) << ',' << opt(feas.min_n) << ','
         << feas.regularity_limit << ',' << feas.min_regularity << '\n';
    }
    emit(args.common, os.str());
  } else {
    emit(args.common, j.dump(2));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct WalkArgs {
  Common common;
  std::string mode = "symmetric";
  int n = 40;
  std::optional<double> delta, X;
  std::optional<int> kA, kB, l, k, lA, lB;
};

int run_walk(const WalkArgs& args) {
  core::TuningPlan plan;
  plan.n = args.n;
  plan.sign = -1;
  Json extra;
  if (args.mode == "asymmetric") {
    if (!args.k || !args.lA || !args.lB) throw ParameterError("walk: asymmetric mode needs --k, --lA and --lB");
    plan.branch = core::Branch::DeltaC;
    plan.k_A = plan.k_B = *args.k;
    plan.l_A = *args.lA;
    plan.l_B = *args.lB;
    extra["degree_form"] = io::to_json(walk::stationary_degree_form(args.n, *args.k, *args.lA, *args.lB));
  } else if (args.mode == "symmetric") {
    plan.branch = core::Branch::Delta;
    if (args.delta || args.X) {
      if (!args.delta || !args.X) throw ParameterError("walk: give both --delta and --X");
      const auto d = walk::degrees_for_scaling(*args.delta, *args.X, args.n);
      plan.k_A = d.k_A;
      plan.k_B = d.k_B;
      plan.l_A = plan.l_B = d.l;
    } else {
      plan.k_A = args.kA.value_or(20);
      plan.k_B = args.kB.value_or(plan.k_A);
      plan.l_A = plan.l_B = args.l.value_or(3);
    }
  } else {
    throw ParameterError("walk: --mode must be symmetric or asymmetric");
  }

  const auto net = core::build_network(plan, args.common.seed, /*balanced_directed=*/true);
  const auto closed = walk::stationary_closed_form(plan);
  const auto rep = walk::analyze_walk(net.R, args.n, closed);

  if (args.common.format == "csv") {
    std::ostringstream os;
    io::write_stationary_csv(os, rep.pi, args.n);
    emit(args.common, os.str());
  } else {
    Json j;
    j["degrees"] = {{"n", args.n}, {"k_A", plan.k_A}, {"k_B", plan.k_B}, {"l_A", plan.l_A}, {"l_B", plan.l_B}};
    j["stationary"] = io::to_json(rep);
    for (auto& [key, val] : extra.items()) j[key] = val;
    emit(args.common, j.dump(2));
  }
  return rep.converged && rep.closed_error.value_or(0.0) <= 1e-10 ? kExitOk : kExitFailed;
}

// ---------------------------------------------------------------------------

struct CurvesArgs {
  Common common;
  std::string branch = "delta";
  double lo = -5.0;
  double hi = 5.0;
  int samples = 101;
};

int run_curves(const CurvesArgs& args) {
  if (args.samples < 2) throw ParameterError("curves: need at least 2 samples");
  if (!(args.hi > args.lo)) throw ParameterError("curves: need --max > --min");
  const auto branch = core::branch_from_string(args.branch);
  Json points = Json::array();
  std::ostringstream os;
  os.precision(17);
  os << "branch,quadrant,ratio,a,b\n";
  for (auto q : core::quadrants_for(branch)) {
    for (int i = 0; i < args.samples; ++i) {
      const double r = args.lo + (args.hi - args.lo) * i / (args.samples - 1);
      const auto s = core::amplitudes_from_ratio(branch, r, q);
      os << core::to_string(branch) << ',' << core::to_string(q) << ',' << r << ',' << s.a << ',' << s.b << '\n';
      points.push_back({{"quadrant", core::to_string(q)}, {"ratio", r}, {"a", s.a}, {"b", s.b}});
    }
  }
  if (args.common.format == "csv") {
    emit(args.common, os.str());
  } else {
    // branch crossings: |Delta| = |Delta^-1| = 1 and Delta_C = Delta_C^-1 = +-1
    Json crossings = Json::array();
    for (double r : {-1.0, 1.0})
      for (auto q : core::quadrants_for(branch)) {
        const auto s = core::amplitudes_from_ratio(branch, r, q);
        crossings.push_back({{"quadrant", core::to_string(q)}, {"ratio", r}, {"a", s.a}, {"b", s.b}});
      }
    Json j;
    j["branch"] = core::to_string(branch);
    j["switch_amplitude"] = core::switch_amplitude();
    j["crossings"] = crossings;
    j["points"] = points;
    emit(args.common, j.dump(2));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct TwoQubitArgs {
  Common common;
  int n = 8;
  int k = 3;
  int l = 1;
  double j1 = 1.0;
  double j2 = 1.0;
  bool graph = false;
};

int run_twoqubit(const TwoQubitArgs& args) {
  const auto net = twoqubit::assemble_two_qubit(args.n, args.k, args.l, args.j1, args.j2, args.common.seed);
  const auto rep = twoqubit::verify_two_qubit_basis(net);
  if (args.common.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "pattern,predicted,residual,rayleigh,rayleigh_residual,fidelity,eigenspace_dim\n";
    for (const auto& p : rep.patterns)
      os << twoqubit::to_string(p.pattern) << ',' << p.predicted << ',' << p.residual << ',' << p.rayleigh << ','
         << p.rayleigh_residual << ',' << p.fidelity << ',' << p.eigenspace_dim << '\n';
    emit(args.common, os.str());
  } else {
    Json j;
    j["parameters"] = {{"n", net.n}, {"k", net.k}, {"l", net.l}, {"j1", net.j1}, {"j2", net.j2}, {"seed", net.seed}};
    j["report"] = io::to_json(rep);
    if (args.graph) j["graph"] = io::to_json(net);
    emit(args.common, j.dump(2));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SpectrumArgs {
  Common common;
  std::string in;
};

int run_spectrum(const SpectrumArgs& args) {
  Json j = read_json(args.in);
  const Json& g = j.contains("graph") ? j["graph"] : j;
  const auto net = io::network_from_json(g);
  if (!net.symmetric) throw ParameterError("spectrum: the composite is directed; only symmetric spectra are computed");
  const auto values = spectral::full_spectrum_symmetric(net.R);
  if (args.common.format == "csv") {
    emit(args.common, spectrum_csv(values));
  } else {
    Json out;
    out["n"] = net.n;
    out["eigenvalues"] = values;
    out["gap"] = values.size() >= 2 ? Json(values[0] - values[1]) : Json(nullptr);
    emit(args.common, out.dump(2));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-like bits on graphs: plan, build and verify emergent-eigenvector constructions"};
  app.require_subcommand(1);

  ConstructArgs construct;
  auto* c = app.add_subcommand("construct", "Plan, generate and verify a network for a target state");
  c->add_option("--a", construct.a, "Amplitude of |+>");
  c->add_option("--b", construct.b, "Amplitude of |->");
  c->add_option("--ratio", construct.ratio, "Tuning ratio (instead of --a/--b)");
  c->add_option("--branch", construct.branch, "delta | delta_inv | delta_c | delta_c_inv");
  c->add_option("--quadrant", construct.quadrant, "Quadrant selector for --ratio");
  c->add_option("--mode", construct.mode, "symmetric | asymmetric | continuous");
  c->add_option("--n", construct.n, "Vertices per subgraph");
  c->add_option("--sign", construct.sign, "Coupling sign (-1 or 1)");
  c->add_option("--floor", construct.floor, "Smallest admissible degree");
  c->add_option("--max-degree", construct.max_degree, "Largest admissible degree (default n-1)");
  c->add_option("--k", construct.k, "Shared subgraph degree (asymmetric mode)");
  c->add_option("--kA", construct.kA, "Degree of subgraph A (continuous mode)");
  c->add_option("--kB", construct.kB, "Degree of subgraph B (continuous mode)");
  add_common(c, construct.common);

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Re-verify a saved plan and graph");
  v->add_option("--in", verify.in, "Combined JSON written by construct");
  v->add_option("--graph", verify.graph, "Graph JSON");
  v->add_option("--plan", verify.plan, "Plan JSON");
  add_common(v, verify.common, false);

  GapArgs gap;
  auto* g = app.add_subcommand("gap", "Erdos-Renyi spectral-gap feasibility");
  g->add_option("--min-gap", gap.a, "Required gap lambda_1 - lambda_2");
  g->add_option("--n", gap.n, "Vertex count");
  g->add_option("--p", gap.p, "Edge probability");
  g->add_flag("--limit", gap.limit, "Report the large-n regularity limit");
  g->add_option("--trials", gap.trials, "Monte-Carlo samples (needs --n)");
  add_common(g, gap.common);

  WalkArgs walk_args;
  auto* w = app.add_subcommand("walk", "Stationary distribution of the random walk on a composite");
  w->add_option("--mode", walk_args.mode, "symmetric | asymmetric");
  w->add_option("--n", walk_args.n, "Vertices per subgraph");
  w->add_option("--delta", walk_args.delta, "Detuning Delta");
  w->add_option("--X", walk_args.X, "Scaling X = k_A / l");
  w->add_option("--kA", walk_args.kA, "Degree of subgraph A");
  w->add_option("--kB", walk_args.kB, "Degree of subgraph B");
  w->add_option("--l", walk_args.l, "Coupling degree");
  w->add_option("--k", walk_args.k, "Shared subgraph degree (asymmetric)");
  w->add_option("--lA", walk_args.lA, "Out-degree of A into B (asymmetric)");
  w->add_option("--lB", walk_args.lB, "Out-degree of B into A (asymmetric)");
  add_common(w, walk_args.common);

  CurvesArgs curves;
  auto* cu = app.add_subcommand("curves", "Sample the amplitude curves of a tuning branch");
  cu->add_option("--branch", curves.branch, "delta | delta_inv | delta_c | delta_c_inv");
  cu->add_option("--min", curves.lo, "Smallest ratio");
  cu->add_option("--max", curves.hi, "Largest ratio");
  cu->add_option("--samples", curves.samples, "Samples per quadrant");
  add_common(cu, curves.common, false);

  TwoQubitArgs tq;
  auto* t = app.add_subcommand("twoqubit", "Build and check the four-block two-bit network");
  t->add_option("--n", tq.n, "Vertices per subgraph");
  t->add_option("--k", tq.k, "Subgraph degree");
  t->add_option("--l", tq.l, "Internal coupling degree");
  t->add_option("--j1", tq.j1, "Negative cross-coupling degree");
  t->add_option("--j2", tq.j2, "Positive cross-coupling degree");
  t->add_flag("--graph", tq.graph, "Include the network in the output");
  add_common(t, tq.common);

  SpectrumArgs spec;
  auto* s = app.add_subcommand("spectrum", "Full spectrum of a saved symmetric network");
  s->add_option("--in", spec.in, "Graph JSON (or combined construct output)")->required();
  add_common(s, spec.common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (c->parsed()) return run_construct(construct);
    if (v->parsed()) return run_verify(verify);
    if (g->parsed()) return run_gap(gap);
    if (w->parsed()) return run_walk(walk_args);
    if (cu->parsed()) return run_curves(curves);
    if (t->parsed()) return run_twoqubit(tq);
    if (s->parsed()) return run_spectrum(spec);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const InvalidStateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const PoleError& e) {
    std::cerr << "pole: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ReducibleChainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const GenerationError& e) {
    std::cerr << "generation failed: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitBadInput;
}
