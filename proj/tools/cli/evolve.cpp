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
#include <fstream>
#include <limits>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/report.hpp"
#include "prepspace/dynamics.hpp"

namespace prepspace::cli {

using nlohmann::json;

namespace {

// Largest dimension for which the summary carries the matrix-exponential
// fidelity.
constexpr int kOracleMaxDim = 8;

void write_trajectory_csv(const std::string& path, const Trajectory& traj, int n) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",p_" << i;
  for (int i = 1; i <= n; ++i) out << ",phi_" << i;
  out << ",energy\n";
  for (std::size_t s = 0; s < traj.size(); ++s) {
    const Preparation& z = traj.points[s];
    out << csv_number(traj.times[s]);
    for (int i = 0; i < n; ++i) out << ',' << csv_number(z.p()[i]);
    for (int i = 0; i < n; ++i) out << ',' << csv_number(z.phi()[i]);
    out << ',' << csv_number(traj.energy[s]) << '\n';
  }
  if (!out) throw Error("failed writing " + path);
}

// min over samples of |<exp(-iHt) psi0 | psi(t)>|.
double min_oracle_fidelity(const CMatrix& h, const Trajectory& traj) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CMatrix& v = es.eigenvectors();
  const CVector c0 = v.adjoint() * amplitudes(traj.points[0].p(), traj.points[0].phi());
  double worst = 1.0;
  for (std::size_t s = 0; s < traj.size(); ++s) {
    CVector c = c0;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      c[k] *= std::polar(1.0, -es.eigenvalues()[k] * traj.times[s]);
    }
    const CVector expected = v * c;
    const CVector got = amplitudes(traj.points[s].p(), traj.points[s].phi());
    worst = std::min(worst, std::abs(expected.dot(got)));
  }
  return worst;
}

}  // namespace

int cmd_evolve(const EvolveArgs& args, std::ostream& log) {
  const Stopwatch clock;
  const ExperimentConfig c = load_config(args.config);
  if (!c.hamiltonian) throw ConfigError(args.config + ": hamiltonian: missing");
  if (!c.initial) throw ConfigError(args.config + ": initial: missing");
  if (!std::isfinite(args.t_final) || args.t_final < 0.0) {
    throw ValidationError("--t-final must be a nonnegative number");
  }
  EvolveOptions opt = c.integrator;
  if (args.step) {
    if (!(*args.step > 0.0) || !std::isfinite(*args.step)) {
      throw ValidationError("--step must be positive");
    }
    opt.step = *args.step;
  }
  if (args.method) opt.method = parse_integrator(*args.method);

  std::filesystem::create_directories(args.out_dir);
  const std::filesystem::path dir(args.out_dir);

  const ScalarVariable h(validate_hermitian(c.hamiltonian->matrix, "hamiltonian"));
  Trajectory traj;
  std::string abort_reason;
  try {
    traj = evolve(h, *c.initial, args.t_final, opt);
  } catch (const BoundaryProximityError& e) {
    traj = e.partial();
    abort_reason = e.what();
  } catch (const NumericalAbort& e) {
    abort_reason = e.what();
  }
  write_trajectory_csv((dir / "trajectory.csv").string(), traj, c.n);

  json summary = report_header("evolve");
  summary["n"] = c.n;
  summary["seed"] = c.seed;
  summary["method"] = to_string(opt.method);
  summary["step"] = opt.step;
  summary["t_final"] = args.t_final;
  summary["boundary_margin"] = opt.boundary_margin;
  summary["hamiltonian"] = {{"source", to_string(c.hamiltonian->source)},
                            {"matrix", matrix_to_json(c.hamiltonian->matrix)}};
  summary["initial"] = {{"p", vector_to_json(c.initial->p())},
                        {"phi", vector_to_json(c.initial->phi())}};
  summary["samples"] = traj.size();

  CheckList checks;
  if (traj.size() > 0) {
    double energy_drift = 0.0, norm_drift = 0.0;
    for (std::size_t s = 0; s < traj.size(); ++s) {
      energy_drift = std::max(energy_drift, std::abs(traj.energy[s] - traj.energy[0]));
      norm_drift = std::max(norm_drift, std::abs(traj.points[s].p().sum() - 1.0));
    }
    summary["energy_drift"] = energy_drift;
    summary["norm_drift"] = norm_drift;
    checks.less("energy_drift", energy_drift, 1e-6);
    checks.less("norm_drift", norm_drift, 1e-9);
    if (c.n <= kOracleMaxDim) {
      const double fid = min_oracle_fidelity(c.hamiltonian->matrix, traj);
      summary["oracle_fidelity"] = fid;
      checks.less("oracle_infidelity", 1.0 - fid, 1e-6);
    } else {
      summary["oracle_fidelity"] = nullptr;
    }
  }

  int code = kExitPass;
  if (!abort_reason.empty()) {
    summary["status"] = "numerical-abort";
    summary["abort_reason"] = abort_reason;
    summary["last_good_time"] = traj.size() > 0 ? json(traj.times.back()) : json(nullptr);
    log << "evolve: aborted: " << abort_reason << "\n";
    if (traj.size() > 0) log << "evolve: last good time " << traj.times.back() << "\n";
    code = kExitNumericalAbort;
  } else {
    summary["status"] = checks.all_passed() ? "pass" : "check-failure";
    code = checks.all_passed() ? kExitPass : kExitCheckFailure;
  }
  summary["checks"] = checks.to_json();
  summary["passed"] = code == kExitPass;
  write_json((dir / "summary.json").string(), summary);
  write_timing((dir / "timing.json").string(), "evolve", clock.seconds());
  return code;
}

}  // namespace prepspace::cli
