// Copyright 2026 The prepspace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/report.hpp"
#include "prepspace/hilbert.hpp"
#include "prepspace/random.hpp"
#include "prepspace/statmech.hpp"

namespace prepspace::cli {

using nlohmann::json;

namespace {

// Flow error allowance for quantities computed through backward
// characteristics.
constexpr double kFlowTolerance = 1e-5;

json density_to_json(const DensityMatrix& rho) {
  return {{"time", rho.time},
          {"entries", matrix_to_json(rho.entries)},
          {"std_error", real_matrix_to_json(rho.std_error)},
          {"trace", rho.trace},
          {"trace_std_error", rho.trace_std_error},
          {"samples", rho.samples}};
}

double max_entry_z(const DensityMatrix& rho, const CMatrix& expected, double slack) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < expected.rows(); ++i)
    for (Eigen::Index j = 0; j < expected.cols(); ++j) {
      worst = std::max(worst, z_score(std::abs(rho.entries(i, j) - expected(i, j)),
                                      rho.std_error(i, j), slack));
    }
  return worst;
}

json bridge_to_json(const BridgeReport& r) {
  return {{"points", r.residuals.size()},
          {"max_residual", r.max_residual},
          {"max_excess", r.max_excess},
          {"passed", r.passed}};
}

}  // namespace

int cmd_statmech(const StatmechArgs& args, std::ostream& log) {
  const Stopwatch clock;
  const ExperimentConfig c = load_config(args.config);
  if (!c.observable) throw ConfigError(args.config + ": observable: missing");
  if (!std::isfinite(args.t_final) || args.t_final < 0.0) {
    throw ValidationError("--t-final must be a nonnegative number");
  }
  if (args.t_final > 0.0 && !c.hamiltonian) {
    throw ConfigError(args.config + ": hamiltonian: required when --t-final > 0");
  }
  const std::size_t samples = args.samples.value_or(c.samples);
  if (samples < 1000) throw ValidationError("--samples must be at least 1000");
  const int n = c.n;

  std::filesystem::create_directories(args.out_dir);
  const std::filesystem::path dir(args.out_dir);

  json report = report_header("statmech");
  report["n"] = n;
  report["seed"] = c.seed;
  report["target_mean"] = args.mean;
  report["t_final"] = args.t_final;
  report["samples"] = samples;
  report["seeds"] = {{"frame", substream_seed(c.seed, "frame")},
                     {"init", substream_seed(c.seed, "init")},
                     {"mc", substream_seed(c.seed, "mc")}};
  report["observable"] = {{"source", to_string(c.observable->source)},
                          {"matrix", matrix_to_json(c.observable->matrix)}};
  if (c.hamiltonian) {
    report["hamiltonian"] = {{"source", to_string(c.hamiltonian->source)},
                             {"matrix", matrix_to_json(c.hamiltonian->matrix)}};
  }

  const HermitianObservable observable = validate_hermitian(c.observable->matrix, "observable");
  MaxEntSolution sol;
  try {
    sol = solve_maxent(observable, args.mean, c.tolerances.root_tol);
  } catch (const InfeasibleConstraintError& e) {
    report["status"] = "infeasible";
    report["error"] = e.what();
    report["passed"] = false;
    write_json((dir / "report.json").string(), report);
    write_timing((dir / "timing.json").string(), "statmech", clock.seconds());
    log << "statmech: " << e.what() << "\n";
    return kExitInfeasible;
  }

  const CMatrix rho_exact = sol.boltzmann_operator() / sol.z;
  report["maxent"] = {{"beta", sol.beta},
                      {"z", sol.z},
                      {"rho", vector_to_json(sol.rho)},
                      {"eigenvalues", vector_to_json(sol.eigenvalues)},
                      {"eigenbasis", matrix_to_json(sol.eigenbasis)},
                      {"density_matrix", matrix_to_json(rho_exact)}};

  CheckList checks;
  const MeasureSampler sampler(n, substream_seed(c.seed, "mc"), c.chunk_size);
  const EnsembleDistribution w0 = w0_build(sol);

  const double s_discrete = ensemble_entropy(sol);
  const McEstimate s_functional = entropy_functional(w0, rho_exact, sampler, samples);
  report["entropy"] = {{"discrete", s_discrete},
                       {"functional", s_functional.estimate},
                       {"functional_std_error", s_functional.std_error}};
  checks.at_most("entropy_two_routes", std::abs(s_functional.estimate - s_discrete),
                 3.0 * s_functional.std_error + kRoundoffFloor);

  const NegativeMassReport neg = negative_mass(w0, sampler, samples);
  report["negative_mass"] = {{"fraction", neg.fraction},
                             {"mass", neg.negative_mass.estimate},
                             {"std_error", neg.negative_mass.std_error}};

  const DensityMatrix rho0 = rho_reconstruct(w0, sampler, samples);
  report["rho_t0"] = density_to_json(rho0);
  checks.at_most("rho_t0_entry_max_z", max_entry_z(rho0, rho_exact, 0.0), 3.0);
  checks.at_most("rho_t0_trace", std::abs(rho0.trace - 1.0), 3.0 * rho0.trace_std_error + kRoundoffFloor);
  {
    const CMatrix& f = c.observable->matrix;
    // Propagated from the entry errors; a bound, since the errors correlate.
    double sigma = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sigma += std::abs(f(j, i)) * rho0.std_error(i, j);
    const double mean = (rho0.entries * f).trace().real();
    report["rho_t0"]["observable_mean"] = mean;
    checks.at_most("rho_t0_observable_mean", std::abs(mean - args.mean), 3.0 * sigma + kRoundoffFloor);
  }

  Rng probe_rng = make_rng(substream_seed(substream_seed(c.seed, "init"), std::uint64_t{1}));
  std::vector<Preparation> probes;
  for (int k = 0; k < c.probe_points; ++k) probes.push_back(random_interior_preparation(n, probe_rng));
  const BridgeReport bridge0 = bridge_check(w0, rho0, probes);
  report["bridge_t0"] = bridge_to_json(bridge0);
  checks.at_most("bridge_t0_max_excess", bridge0.max_excess, 0.0);

  if (args.t_final > 0.0) {
    const CMatrix& h = c.hamiltonian->matrix;
    const ScalarVariable hv(validate_hermitian(h, "hamiltonian"));
    EvolveOptions flow = c.integrator;
    flow.step = c.flow_step;
    const std::size_t flow_samples = c.flow_samples;
    report["flow"] = {{"method", to_string(flow.method)},
                      {"step", flow.step},
                      {"samples", flow_samples}};

    const EnsembleDistribution wt = liouville_evolve(w0, hv, args.t_final, flow);
    const CMatrix rho_vn = hilbert::von_neumann_propagate(h, rho_exact, args.t_final);
    const DensityMatrix rhot = rho_reconstruct(wt, sampler, flow_samples);
    report["rho_t_final"] = density_to_json(rhot);
    report["rho_t_final"]["von_neumann"] = matrix_to_json(rho_vn);
    checks.at_most("rho_t_final_vs_von_neumann_max_z", max_entry_z(rhot, rho_vn, kFlowTolerance), 3.0);

    BridgeTolerance tol;
    tol.absolute = kFlowTolerance;
    const BridgeReport bridge_t = bridge_check(wt, rhot, probes, tol);
    report["bridge_t_final"] = bridge_to_json(bridge_t);
    checks.at_most("bridge_t_final_max_excess", bridge_t.max_excess, 0.0);

    const CMatrix fh = c.observable->matrix * h - h * c.observable->matrix;
    if (fh.cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
      double worst = 0.0;
      for (const Preparation& z : probes) worst = std::max(worst, std::abs(wt(z) - w0(z)));
      report["stationarity_max_deviation"] = worst;
      checks.less("stationarity", worst, 1e-6);
    }

    const CMatrix q = c.probe ? c.probe->matrix : c.observable->matrix;
    json table = json::array();
    for (int k = 0; k < c.time_points; ++k) {
      const double t = args.t_final * k / (c.time_points - 1);
      const EnsembleDistribution w = liouville_evolve(w0, hv, t, flow);
      const McEstimate est = ensemble_expectation(w, q, sampler, flow_samples);
      const double oracle =
          (hilbert::von_neumann_propagate(h, rho_exact, t) * q).trace().real();
      table.push_back({{"t", t},
                       {"estimate", est.estimate},
                       {"std_error", est.std_error},
                       {"von_neumann", oracle},
                       {"flagged_points", w.flagged_points()}});
      checks.at_most("expectation_t" + std::to_string(k), std::abs(est.estimate - oracle),
                     3.0 * est.std_error + kFlowTolerance);
    }
    report["expectation_table"] = table;
    report["flagged_points"] = wt.flagged_points();
  }

  report["checks"] = checks.to_json();
  report["passed"] = checks.all_passed();
  report["status"] = checks.all_passed() ? "pass" : "check-failure";
  write_json((dir / "report.json").string(), report);
  write_timing((dir / "timing.json").string(), "statmech", clock.seconds());
  for (const Check& ch : checks.checks()) {
    if (!ch.passed) {
      log << "statmech: FAILED " << ch.name << " (" << ch.measured << " " << ch.relation << " "
          << ch.tolerance << ")\n";
    }
  }
  return checks.all_passed() ? kExitPass : kExitCheckFailure;
}

}  // namespace prepspace::cli
