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

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "prepspace/core.hpp"

namespace prepspace {

using MatrixFunction = std::function<CMatrix(double)>;

// f(p, phi, t) = sum_ij F_ij(t) sqrt(p_i p_j) e^{-i (phi_i - phi_j)} = <psi|F|psi>.
//
// F is either constant or an explicit function of time. For time-dependent
// variables an analytic dF/dt may be supplied; otherwise df/dt is taken by
// central differences with step 1e-6.
class ScalarVariable {
 public:
  explicit ScalarVariable(HermitianObservable observable);
  static ScalarVariable time_dependent(int n, MatrixFunction matrix, MatrixFunction derivative = {},
                                       std::string label = {});

  int dim() const { return n_; }
  const std::string& label() const { return label_; }
  bool is_time_dependent() const { return static_cast<bool>(matrix_fn_); }

  // F(t), validated Hermitian for time-dependent variables.
  CMatrix matrix_at(double t) const;
  // dF/dt: zero for constant variables.
  CMatrix derivative_at(double t) const;

  // The variable of -F.
  ScalarVariable negated() const;

 private:
  ScalarVariable() = default;

  int n_ = 0;
  std::string label_;
  CMatrix constant_;
  MatrixFunction matrix_fn_;
  MatrixFunction derivative_fn_;
};

double evaluate(const ScalarVariable& var, const Preparation& prep, double t = 0.0);

// Same on raw ambient coordinates.
double evaluate(const CMatrix& f, const RVector& p, const RVector& phi);

struct Gradient {
  RVector d_dp;
  RVector d_dphi;
};

// Closed-form partial derivatives in (p, phi):
//   df/dphi_i = 2 Im sum_k F_ik sqrt(p_i p_k) e^{-i phi_ik}
//   df/dp_i   = Re sum_k F_ik sqrt(p_k / p_i) e^{-i phi_ik}
// Throws SingularChartError unless every p_i exceeds `validation_tol`.
Gradient hamiltonian_gradient(const ScalarVariable& var, const Preparation& prep, double t = 0.0,
                              double validation_tol = 1e-12);
Gradient gradient(const CMatrix& f, const RVector& p, const RVector& phi);

struct PhaseVelocity {
  RVector p_dot;
  RVector phi_dot;
};

// p_dot_i = dH/dphi_i, phi_dot_i = -dH/dp_i.
PhaseVelocity hamilton_rhs(const ScalarVariable& h, const Preparation& prep, double t = 0.0,
                           double validation_tol = 1e-12);

// implicit_midpoint: the second-order symplectic midpoint rule, solved by
// Newton. implicit_midpoint4: symmetric triple-jump composition of three
// midpoint steps (fourth order, still symplectic). rk4: classical explicit
// Runge-Kutta, for cross-checks.
enum class Integrator { implicit_midpoint, implicit_midpoint4, rk4 };

Integrator parse_integrator(const std::string& name);
std::string to_string(Integrator method);

struct EvolveOptions {
  Integrator method = Integrator::implicit_midpoint4;
  double step = 1e-3;
  // Every p_i must stay above this along the trajectory.
  double boundary_margin = 1e-8;
  double newton_tol = 1e-12;
  int newton_max_iterations = 50;
  // Times a failing implicit step is split in half before giving up.
  int max_step_halvings = 6;
  // Upper bound on step * max_i |conj(psi_i) (H psi)_i| / p_i for one
  // integrator step; larger steps are split into equal sub-steps. The rate
  // blows up like 1/sqrt(p_i) near the boundary. 0 disables sub-stepping.
  double max_rotation = 0.05;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Preparation> points;
  std::vector<double> energy;

  size_t size() const { return times.size(); }
};

// Raised when a trajectory approaches the simplex boundary. Carries the
// samples computed so far.
class BoundaryProximityError : public NumericalAbort {
 public:
  BoundaryProximityError(const std::string& what, Trajectory partial)
      : NumericalAbort(what), partial_(std::make_shared<Trajectory>(std::move(partial))) {}

  const Trajectory& partial() const { return *partial_; }
  double last_good_time() const {
    return partial_->times.empty() ? 0.0 : partial_->times.back();
  }

 private:
  std::shared_ptr<Trajectory> partial_;
};

// Raised when the implicit-midpoint Newton iteration fails even after step
// halving.
class NewtonConvergenceError : public NumericalAbort {
 public:
  using NumericalAbort::NumericalAbort;
};

using PhasePoint = std::pair<RVector, RVector>;

// One integrator step of size `h` from time `t` on ambient coordinates.
// Phases are left unreduced.
PhasePoint integrator_step(const ScalarVariable& h_var, const PhasePoint& z, double t, double h,
                           const EvolveOptions& options);

// Flows (p, phi) from t0 to t0 + duration (duration may be negative) and
// returns the endpoint. Throws BoundaryProximityError (with an empty
// partial trajectory) when the margin is violated.
PhasePoint flow(const ScalarVariable& h_var, const PhasePoint& z, double t0, double duration,
                const EvolveOptions& options);

// Trajectory sampled at multiples of options.step (the last step is shortened
// to land on t_final).
Trajectory evolve(const ScalarVariable& h_var, const Preparation& init, double t_final,
                  const EvolveOptions& options = {});

// {f, g} = sum_i (df/dp_i dg/dphi_i - df/dphi_i dg/dp_i).
double poisson_bracket(const ScalarVariable& f, const ScalarVariable& g, const Preparation& prep,
                       double t = 0.0);

// df/dt + {f, H}.
double total_time_derivative(const ScalarVariable& f, const ScalarVariable& h,
                             const Preparation& prep, double t = 0.0);

}  // namespace prepspace
