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
#include <functional>
#include <limits>

#include "cli/commands.hpp"
#include "cli/report.hpp"
#include "prepspace/dynamics.hpp"
#include "prepspace/geometry.hpp"
#include "prepspace/hilbert.hpp"
#include "prepspace/random.hpp"
#include "prepspace/statmech.hpp"
#include "prepspace/transform.hpp"

namespace prepspace::cli {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SuiteContext {
  int n;
  std::uint64_t seed;
  std::size_t samples;
  Rng frame_rng;
  Rng init_rng;
  std::uint64_t mc_seed;
  CheckList& checks;
  json& details;

  std::string name(const std::string& suite, const std::string& check) const {
    return suite + "." + check;
  }
};

TangentDisplacement random_displacement(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RVector dp(n), dphi(n);
  for (int i = 0; i < n; ++i) {
    dp[i] = u(rng);
    dphi[i] = u(rng);
  }
  dp.array() -= dp.mean();
  return TangentDisplacement::make(dp, dphi);
}

ScalarVariable variable(const CMatrix& m) { return ScalarVariable(validate_hermitian(m)); }

// |difference| in units of the standard error.
// Every nonnegative exponent vector of length n with sum <= total.
std::vector<std::vector<int>> exponent_grid(int n, int total) {
  std::vector<std::vector<int>> out;
  std::vector<int> m(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n) {
      out.push_back(m);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      m[static_cast<std::size_t>(i)] = k;
      rec(i + 1, left - k);
    }
  };
  rec(0, total);
  return out;
}

void geometry_suite(SuiteContext& s) {
  const int n = s.n;
  // The remainder angle^2 - ds^2 is O(s^3), so the halving factor of
  // difference / s^2 tends to 2 from either side. The check is on the observed
  // order at small scale; the literal factor at 1e-3 is reported alongside.
  double min_order = kInf;
  int literal_met = 0;
  double literal_min = kInf;
  for (int k = 0; k < 100; ++k) {
    const Preparation prep = random_interior_preparation(n, s.init_rng);
    const TangentDisplacement d = random_displacement(n, s.init_rng);
    const MetricAngleReport coarse = verify_metric_matches_angle(prep, d, 1e-3);
    if (coarse.passed) ++literal_met;
    literal_min = std::min(literal_min, coarse.reduction);
    const MetricAngleReport fine = verify_metric_matches_angle(prep, d, 1e-4);
    if (fine.passed && fine.reduction < 2.0) continue;  // both at round-off
    min_order = std::min(min_order, 2.0 + std::log2(fine.reduction));
  }
  s.checks.at_least(s.name("geometry", "metric_angle_min_observed_order"), min_order, 2.9);
  s.details["geometry"]["metric_angle_cases_with_reduction_at_least_2"] = literal_met;
  s.details["geometry"]["metric_angle_min_reduction_at_1e-3"] = literal_min;

  double worst_invariance = 0.0;
  int evaluated = 0;
  while (evaluated < 100) {
    const Preparation prep = random_interior_preparation(n, s.init_rng);
    const UnitaryFrameMap frame = frame_from_unitary(haar_unitary(n, s.frame_rng));
    if (!apply(frame, prep).is_interior(1e-3)) continue;
    const FrameInvarianceReport r =
        verify_metric_frame_invariance(prep, random_displacement(n, s.init_rng), frame);
    worst_invariance = std::max(worst_invariance, r.relative_deviation);
    ++evaluated;
  }
  s.checks.less(s.name("geometry", "frame_invariance_max_relative_deviation"), worst_invariance,
                1e-6);

  double worst_null = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Preparation prep = random_interior_preparation(n, s.init_rng);
    const TangentDisplacement d = TangentDisplacement::make(RVector::Zero(n), RVector::Ones(n));
    worst_null = std::max(worst_null, line_element_squared(prep, d));
  }
  s.checks.less(s.name("geometry", "global_phase_line_element"), worst_null, 1e-15);
}

void symplectic_suite(SuiteContext& s) {
  const int n = s.n;
  double worst_constraint = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const UnitaryFrameMap f = frame_from_unitary(haar_unitary(n, s.frame_rng));
    worst_constraint = std::max(worst_constraint, f.residuals().max());
  }
  s.checks.less(s.name("symplectic", "frame_constraint_max_residual"), worst_constraint, 1e-8);

  double worst_p = 0.0, worst_phase = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const UnitaryFrameMap f = frame_from_unitary(haar_unitary(n, s.frame_rng));
    const Preparation prep = random_interior_preparation(n, s.init_rng, 0.0);
    const Preparation out = apply(f, prep);
    const CVector psi = f.u().adjoint() * amplitudes(prep.p(), prep.phi());
    for (int i = 0; i < n; ++i) {
      worst_p = std::max(worst_p, std::abs(out.p()[i] - std::norm(psi[i])));
      for (int j = 0; j < n; ++j) {
        if (std::norm(psi[i]) < 1e-6 || std::norm(psi[j]) < 1e-6) continue;
        const double expected = std::arg(psi[i] * std::conj(psi[j]));
        worst_phase = std::max(
            worst_phase,
            std::abs(wrap_phase_difference(out.phi()[i] - out.phi()[j] - expected)));
      }
    }
  }
  s.checks.less(s.name("symplectic", "transform_probability_error"), worst_p, 1e-10);
  s.checks.less(s.name("symplectic", "transform_phase_difference_error"), worst_phase, 1e-8);

  double worst_defect = 0.0, worst_constrained = 0.0, worst_det = 0.0;
  int evaluated = 0;
  while (evaluated < 200) {
    const UnitaryFrameMap f = frame_from_unitary(haar_unitary(n, s.frame_rng));
    const Preparation prep = random_interior_preparation(n, s.init_rng);
    // Central differences at step 1e-5 lose about h^2 / p^3 near the boundary,
    // so the image is kept where that error stays below the tolerance.
    if (!apply(f, prep).is_interior(1e-2)) continue;
    const SymplecticReport r = symplectic_report(f, prep, 1e-5);
    worst_defect = std::max(worst_defect, r.ambient_defect);
    worst_constrained = std::max(worst_constrained, r.constrained_defect);
    worst_det = std::max(worst_det, std::abs(std::abs(r.determinant) - 1.0));
    ++evaluated;
  }
  s.checks.less(s.name("symplectic", "max_defect"), worst_defect, 1e-6);
  s.checks.less(s.name("symplectic", "max_constrained_defect"), worst_constrained, 1e-6);
  s.checks.less(s.name("symplectic", "max_abs_det_deviation"), worst_det, 1e-6);

  // Control: phi' = 2 phi is not canonical and must show a defect of 1.
  const PhaseSpaceMap doubling = [](const RVector& p, const RVector& phi) {
    return std::make_pair(RVector(p), RVector(2.0 * phi));
  };
  const Preparation prep = random_interior_preparation(n, s.init_rng);
  const double control =
      symplectic_defect(numeric_jacobian(doubling, prep.p(), RVector::Constant(n, 0.4), 1e-5));
  s.details["symplectic"]["control_defect"] = control;
  s.checks.less(s.name("symplectic", "control_defect_deviation_from_one"),
                std::abs(control - 1.0), 1e-6);
}

void correspondence_suite(SuiteContext& s) {
  const int n = s.n;
  double worst_rhs = 0.0, worst_poisson = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const CMatrix h = random_hermitian(n, s.frame_rng);
    const CMatrix f = random_hermitian(n, s.frame_rng);
    const Preparation prep = random_interior_preparation(n, s.init_rng);
    const CVector psi = amplitudes(prep.p(), prep.phi());
    const PhaseVelocity v = hamilton_rhs(variable(h), prep);
    const CVector hpsi = h * psi;
    for (int i = 0; i < n; ++i) {
      const double pdot = 2.0 * (hpsi[i] * std::conj(psi[i])).imag();
      const double phidot = -(hpsi[i] / psi[i]).real();
      worst_rhs = std::max({worst_rhs, std::abs(v.p_dot[i] - pdot), std::abs(v.phi_dot[i] - phidot)});
    }
    const double bracket = poisson_bracket(variable(f), variable(h), prep);
    worst_poisson =
        std::max(worst_poisson, std::abs(bracket - hilbert::commutator_expectation(f, h, psi)));
  }
  s.checks.less(s.name("correspondence", "schrodinger_projection_error"), worst_rhs, 1e-10);
  s.checks.less(s.name("correspondence", "poisson_commutator_error"), worst_poisson, 1e-9);

  double worst_grad = 0.0, worst_cov = 0.0;
  for (int k = 0; k < 200; ++k) {
    const CMatrix f = random_hermitian(n, s.frame_rng);
    const Preparation prep = random_interior_preparation(n, s.init_rng, 0.05);
    const Gradient g = gradient(f, prep.p(), prep.phi());
    const double h = 1e-6;
    for (int i = 0; i < n; ++i) {
      RVector a = prep.p(), b = prep.p();
      a[i] += h;
      b[i] -= h;
      const double dp = (evaluate(f, a, prep.phi()) - evaluate(f, b, prep.phi())) / (2.0 * h);
      RVector c = prep.phi(), d = prep.phi();
      c[i] += h;
      d[i] -= h;
      const double dphi = (evaluate(f, prep.p(), c) - evaluate(f, prep.p(), d)) / (2.0 * h);
      worst_grad = std::max({worst_grad, std::abs(g.d_dp[i] - dp), std::abs(g.d_dphi[i] - dphi)});
    }
    const UnitaryFrameMap frame = frame_from_unitary(haar_unitary(n, s.frame_rng));
    const CMatrix fp = frame.u().adjoint() * f * frame.u();
    worst_cov = std::max(worst_cov, std::abs(evaluate(variable(fp), apply(frame, prep)) -
                                             evaluate(variable(f), prep)));
  }
  s.checks.less(s.name("correspondence", "gradient_finite_difference_error"), worst_grad, 1e-7);
  s.checks.less(s.name("correspondence", "frame_covariance_error"), worst_cov, 1e-10);

  const CMatrix h = random_hermitian(n, s.frame_rng);
  const Preparation init = random_interior_preparation(n, s.init_rng, 0.05);
  const Trajectory traj = evolve(variable(h), init, 10.0);
  const CVector psi0 = amplitudes(init.p(), init.phi());
  double worst_fid = 1.0, energy_drift = 0.0, norm_drift = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    energy_drift = std::max(energy_drift, std::abs(traj.energy[k] - traj.energy[0]));
    norm_drift = std::max(norm_drift, std::abs(traj.points[k].p().sum() - 1.0));
    if (k % 100 != 0 && k + 1 != traj.size()) continue;
    const CVector expected = hilbert::schrodinger_propagate(h, psi0, traj.times[k]);
    worst_fid = std::min(
        worst_fid,
        hilbert::fidelity(expected, amplitudes(traj.points[k].p(), traj.points[k].phi())));
  }
  s.checks.less(s.name("correspondence", "trajectory_infidelity"), 1.0 - worst_fid, 1e-6);
  s.checks.less(s.name("correspondence", "energy_drift"), energy_drift, 1e-6);
  s.checks.less(s.name("correspondence", "norm_drift"), norm_drift, 1e-9);
}

void statmech_suite(SuiteContext& s) {
  const int n = s.n;
  json& d = s.details["statmech"];

  RVector two(2);
  two << 0.0, 1.0;
  const MaxEntSolution ref = solve_maxent(two, 0.25);
  s.checks.less(s.name("statmech", "two_level_beta_error"), std::abs(ref.beta - std::log(3.0)),
                1e-10);
  RVector f(n);
  for (int i = 0; i < n; ++i) f[i] = i;
  const MaxEntSolution uniform = solve_maxent(f, f.mean());
  s.checks.at_most(s.name("statmech", "zero_beta_entropy_error"),
                   std::abs(ensemble_entropy(uniform) - std::log(static_cast<double>(n))), 1e-14);
  bool rejected = false;
  try {
    solve_maxent(f, f.maxCoeff() + 0.5);
  } catch (const InfeasibleConstraintError&) {
    rejected = true;
  }
  s.checks.at_least(s.name("statmech", "infeasible_mean_rejected"), rejected ? 1.0 : 0.0, 1.0);

  const double target = 0.4 * (n - 1);
  const MaxEntSolution sol = solve_maxent(f, target);
  d["beta"] = sol.beta;
  d["rho"] = vector_to_json(sol.rho);
  s.checks.less(s.name("statmech", "maxent_mean_error"), std::abs(sol.rho.dot(f) - target), 1e-11);

  const MeasureSampler sampler(n, s.mc_seed);
  const std::vector<std::vector<int>> grid = exponent_grid(n, 4);
  const int c = static_cast<int>(grid.size());
  const McVectorEstimate moments = mc_integrate(
      [&](const Preparation& z, Eigen::Ref<RVector> out) {
        for (int k = 0; k < c; ++k) {
          double v = 1.0;
          for (int i = 0; i < n; ++i) v *= std::pow(z.p()[i], grid[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
          out[k] = v;
        }
      },
      c, sampler, s.samples);
  double worst_moment = 0.0;
  const double phase_volume = std::pow(kTwoPi, n);
  for (int k = 0; k < c; ++k) {
    const double exact = simplex_moment(n, grid[static_cast<std::size_t>(k)]);
    worst_moment = std::max(worst_moment, z_score(moments.estimate[k] / phase_volume - exact,
                                                  moments.std_error[k] / phase_volume));
  }
  s.checks.at_most(s.name("statmech", "simplex_moment_max_z"), worst_moment, 3.0);

  const EnsembleDistribution w0 = w0_build(sol);
  const McVectorEstimate marg = mc_integrate(
      [&](const Preparation& z, Eigen::Ref<RVector> out) {
        const double wz = w0(z);
        out[0] = wz;
        out.tail(n) = wz * z.p();
      },
      n + 1, sampler, s.samples);
  s.checks.at_most(s.name("statmech", "w0_normalization_z"),
                   z_score(marg.estimate[0] - 1.0, marg.std_error[0]), 3.0);
  double worst_marg = 0.0;
  for (int i = 0; i < n; ++i) {
    worst_marg = std::max(worst_marg, z_score(marg.estimate[1 + i] - sol.rho[i], marg.std_error[1 + i]));
  }
  s.checks.at_most(s.name("statmech", "w0_marginal_max_z"), worst_marg, 3.0);

  const DensityMatrix rho = rho_reconstruct(w0, sampler, s.samples);
  double worst_rho = 0.0, mean_sigma = 0.0;
  for (int i = 0; i < n; ++i) {
    mean_sigma += std::abs(f[i]) * rho.std_error(i, i);
    for (int j = 0; j < n; ++j) {
      const double expected = i == j ? sol.rho[i] : 0.0;
      worst_rho = std::max(worst_rho, z_score(std::abs(rho.entries(i, j) - expected), rho.std_error(i, j)));
    }
  }
  s.checks.at_most(s.name("statmech", "rho_entry_max_z"), worst_rho, 3.0);
  s.checks.at_most(s.name("statmech", "rho_trace_z"), z_score(rho.trace - 1.0, rho.trace_std_error),
                   3.0);
  const double mean_f = (rho.entries * f.cast<Complex>().asDiagonal()).trace().real();
  s.checks.at_most(s.name("statmech", "rho_mean_z"), z_score(mean_f - target, mean_sigma), 3.0);

  std::vector<Preparation> points;
  for (int k = 0; k < 100; ++k) points.push_back(random_interior_preparation(n, s.init_rng));
  const BridgeReport bridge = bridge_check(w0, rho, points);
  s.checks.at_most(s.name("statmech", "bridge_max_excess"), bridge.max_excess, 0.0);

  const McEstimate functional =
      entropy_functional(w0, CMatrix(sol.rho.cast<Complex>().asDiagonal()), sampler, s.samples);
  s.checks.at_most(s.name("statmech", "entropy_two_routes_z"),
                   z_score(functional.estimate - ensemble_entropy(sol), functional.std_error), 3.0);
  d["negative_mass_fraction"] = negative_mass(w0, sampler, s.samples).fraction;

  const CMatrix h = random_hermitian(n, s.frame_rng);
  EvolveOptions opt;
  opt.method = Integrator::implicit_midpoint;
  double worst_det = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Preparation z = random_interior_preparation(n, s.init_rng, 0.05);
    const PhaseSpaceMap step = [&](const RVector& p, const RVector& phi) {
      return integrator_step(variable(h), {p, phi}, 0.0, 1e-2, opt);
    };
    worst_det = std::max(worst_det,
                         std::abs(numeric_jacobian(step, z.p(), z.phi(), 1e-5).determinant() - 1.0));
  }
  s.checks.less(s.name("statmech", "flow_step_det_deviation"), worst_det, 1e-8);

  EvolveOptions flow_opt;
  flow_opt.step = 1e-2;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const double spread = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
  const MaxEntSolution canon = solve_maxent(validate_hermitian(h), es.eigenvalues().mean() - 0.1 * spread);
  const EnsembleDistribution wc = w0_build(canon);
  const EnsembleDistribution wc_t = liouville_evolve(wc, variable(h), 1.0, flow_opt);
  double worst_stationary = 0.0;
  for (int k = 0; k < 20; ++k) worst_stationary = std::max(worst_stationary, std::abs(wc_t(points[static_cast<std::size_t>(k)]) - wc(points[static_cast<std::size_t>(k)])));
  s.checks.less(s.name("statmech", "canonical_stationarity"), worst_stationary, 1e-6);

  const CMatrix q = random_hermitian(n, s.frame_rng);
  const EnsembleDistribution w_t = liouville_evolve(w0, variable(h), 1.0, flow_opt);
  const std::size_t flow_samples = std::max<std::size_t>(1000, s.samples / 10);
  const McEstimate qbar = ensemble_expectation(w_t, q, sampler, flow_samples);
  const CMatrix rho_t =
      hilbert::von_neumann_propagate(h, CMatrix(sol.rho.cast<Complex>().asDiagonal()), 1.0);
  const double expected = (rho_t * q).trace().real();
  d["liouville_expectation"] = {{"estimate", qbar.estimate},
                                {"std_error", qbar.std_error},
                                {"von_neumann", expected},
                                {"flagged_points", w_t.flagged_points()}};
  s.checks.at_most(s.name("statmech", "liouville_von_neumann_error"),
                   std::abs(qbar.estimate - expected), 3.0 * qbar.std_error + 1e-5);
}

}  // namespace

int cmd_verify(const VerifyArgs& args, std::ostream& log) {
  const Stopwatch clock;
  if (args.n < 2 || args.n > 6) throw ValidationError("--n must lie in [2, 6]");
  if (args.samples < 1000) throw ValidationError("--samples must be at least 1000");
  const auto& known = verify_suites();
  if (std::find(known.begin(), known.end(), args.suite) == known.end()) {
    throw ValidationError("unknown suite \"" + args.suite + "\"");
  }

  CheckList checks;
  json details = json::object();
  bool aborted = false;
  const std::vector<std::pair<std::string, void (*)(SuiteContext&)>> suites{
      {"geometry", geometry_suite},
      {"symplectic", symplectic_suite},
      {"correspondence", correspondence_suite},
      {"statmech", statmech_suite}};
  for (const auto& [name, fn] : suites) {
    if (args.suite != "all" && args.suite != name) continue;
    // Every suite restarts the substreams, so `all` reproduces the single runs.
    SuiteContext ctx{args.n,
                     args.seed,
                     args.samples,
                     make_rng(substream_seed(args.seed, "frame")),
                     make_rng(substream_seed(args.seed, "init")),
                     substream_seed(args.seed, "mc"),
                     checks,
                     details};
    try {
      fn(ctx);
    } catch (const NumericalAbort& e) {
      checks.failed(name + ".aborted", e.what());
      log << "verify: " << name << " aborted: " << e.what() << "\n";
      aborted = true;
    } catch (const InconsistencyError& e) {
      checks.failed(name + ".inconsistent", e.what());
    }
    log << "verify: " << name << " done\n";
  }

  json report = report_header("verify");
  report["suite"] = args.suite;
  report["n"] = args.n;
  report["seed"] = args.seed;
  report["samples"] = args.samples;
  report["seeds"] = {{"frame", substream_seed(args.seed, "frame")},
                     {"init", substream_seed(args.seed, "init")},
                     {"mc", substream_seed(args.seed, "mc")}};
  report["checks"] = checks.to_json();
  report["details"] = details;
  report["passed"] = checks.all_passed();
  report["status"] = aborted ? "numerical-abort" : checks.all_passed() ? "pass" : "check-failure";
  const std::filesystem::path out(args.out);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  write_json(args.out, report);
  write_timing(args.out + ".timing.json", "verify", clock.seconds());
  for (const Check& c : checks.checks()) {
    if (!c.passed) log << "verify: FAILED " << c.name << " (" << c.measured << " " << c.relation << " " << c.tolerance << ")\n";
  }
  if (aborted) return kExitNumericalAbort;
  return checks.all_passed() ? kExitPass : kExitCheckFailure;
}

}  // namespace prepspace::cli
