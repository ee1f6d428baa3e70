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

#include <CLI11.hpp>

#include <filesystem>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "prepspace/statmech.hpp"

namespace prepspace::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum mechanics in preparation-space coordinates", "prepspace"};
  app.require_subcommand(1);

  EvolveArgs ev;
  std::string ev_method;
  double ev_step = 0.0;
  CLI::App* evolve = app.add_subcommand("evolve", "Integrate the canonical equations of motion");
  evolve->add_option("--config", ev.config, "Experiment config (JSON)")->required();
  evolve->add_option("--t-final", ev.t_final, "Final time")->required();
  CLI::Option* step_opt = evolve->add_option("--step", ev_step, "Integrator step");
  CLI::Option* method_opt =
      evolve->add_option("--method", ev_method, "implicit-midpoint | implicit-midpoint4 | rk4")
          ->check(CLI::IsMember({"implicit-midpoint", "implicit-midpoint4", "rk4"}));
  evolve->add_option("--out", ev.out_dir, "Output directory")->required();

  VerifyArgs vf;
  CLI::App* verify = app.add_subcommand("verify", "Run a property suite and write a report");
  verify->add_option("--suite", vf.suite, "geometry | symplectic | correspondence | statmech | all")
      ->required()
      ->check(CLI::IsMember(verify_suites()));
  verify->add_option("--n", vf.n, "Dimension")->required()->check(CLI::Range(2, 6));
  verify->add_option("--seed", vf.seed, "Seed")->required();
  verify->add_option("--samples", vf.samples, "Monte-Carlo samples")->check(CLI::Range(1000, 1 << 30));
  verify->add_option("--out", vf.out, "Report file")->required();

  StatmechArgs sm;
  std::size_t sm_samples = 0;
  CLI::App* statmech = app.add_subcommand("statmech", "Maximum-entropy ensemble and its evolution");
  statmech->add_option("--config", sm.config, "Experiment config (JSON)")->required();
  statmech->add_option("--mean", sm.mean, "Measured mean of the observable")->required();
  statmech->add_option("--t-final", sm.t_final, "Evolution time");
  CLI::Option* samples_opt =
      statmech->add_option("--samples", sm_samples, "Monte-Carlo samples")->check(CLI::Range(1000, 1 << 30));
  statmech->add_option("--out", sm.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }
  if (*step_opt) ev.step = ev_step;
  if (*method_opt) ev.method = ev_method;
  if (*samples_opt) sm.samples = sm_samples;

  try {
    if (*evolve) return cmd_evolve(ev, err);
    if (*verify) return cmd_verify(vf, err);
    return cmd_statmech(sm, err);
  } catch (const InfeasibleConstraintError& e) {
    err << "prepspace: infeasible constraint: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ValidationError& e) {
    err << "prepspace: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalAbort& e) {
    err << "prepspace: numerical abort: " << e.what() << "\n";
    return kExitNumericalAbort;
  } catch (const InconsistencyError& e) {
    err << "prepspace: check failed: " << e.what() << "\n";
    return kExitCheckFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "prepspace: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "prepspace: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace prepspace::cli
