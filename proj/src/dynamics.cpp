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

#include "prepspace/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace prepspace {

namespace {

constexpr double kTimeFdStep = 1e-6;

// Products a_il = conj(psi_i) F_il psi_l and their row sums c_i = conj(psi_i) (F psi)_i.
struct Products {
  CMatrix a;
  CVector c;
};

Products products(const CMatrix& f, const RVector& p, const RVector& phi) {
  const CVector psi = amplitudes(p, phi);
  const auto n = p.size();
  Products out{CMatrix(n, n), CVector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex row(0.0, 0.0);
    for (Eigen::Index l = 0; l < n; ++l) {
      out.a(i, l) = std::conj(psi[i]) * f(i, l) * psi[l];
      row += out.a(i, l);
    }
    out.c[i] = row;
  }
  return out;
}

// Right-hand side z_dot = (dH/dphi, -dH/dp) from precomputed products.
RVector rhs_from(const Products& pr, const RVector& p) {
  const auto n = p.size();
  RVector z(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    z[i] = 2.0 * pr.c[i].imag();
    z[n + i] = -pr.c[i].real() / p[i];
  }
  return z;
}

// Jacobian of the right-hand side with respect to (p, phi).
RMatrix rhs_jacobian(const Products& pr, const RVector& p) {
  const auto n = p.size();
  RMatrix jac(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index l = 0; l < n; ++l) {
      const Complex a = pr.a(i, l);
      const Complex a_shift = i == l ? a - pr.c[i] : a;
      // d/dp_l and d/dphi_l of dH/dphi_i
      jac(i, l) = a.imag() / p[l] + (i == l ? pr.c[i].imag() / p[i] : 0.0);
      jac(i, n + l) = 2.0 * a_shift.real();
      // d/dp_l and d/dphi_l of -dH/dp_i
      jac(n + i, l) =
          -(a.real() / (2.0 * p[i] * p[l]) - (i == l ? pr.c[i].real() / (2.0 * p[i] * p[i]) : 0.0));
      jac(n + i, n + l) = a_shift.imag() / p[i];
    }
  return jac;
}

RVector stack(const PhasePoint& z) {
  const auto n = z.first.size();
  RVector v(2 * n);
  v << z.first, z.second;
  return v;
}

PhasePoint unstack(const RVector& v) {
  const auto n = v.size() / 2;
  return {v.head(n), v.tail(n)};
}

RVector rhs(const CMatrix& h, const RVector& v) {
  const auto n = v.size() / 2;
  const RVector p = v.head(n);
  return rhs_from(products(h, p, v.tail(n)), p);
}

bool implicit_midpoint(const CMatrix& h, const RVector& z0, double step,
                       const EvolveOptions& options, RVector& z1) {
  const auto n = z0.size() / 2;
  const auto dim = z0.size();
  // Explicit Euler predictor.
  z1 = z0 + step * rhs(h, z0);
  for (int it = 0; it < options.newton_max_iterations; ++it) {
    const RVector mid = 0.5 * (z0 + z1);
    const RVector p_mid = mid.head(n);
    if (p_mid.minCoeff() <= 0.0) return false;
    const Products pr = products(h, p_mid, mid.tail(n));
    const RVector residual = z1 - z0 - step * rhs_from(pr, p_mid);
    const RMatrix dg = RMatrix::Identity(dim, dim) - 0.5 * step * rhs_jacobian(pr, p_mid);
    const RVector delta = dg.partialPivLu().solve(-residual);
    if (!delta.allFinite()) return false;
    z1 += delta;
    const double scale = std::max(1.0, z1.cwiseAbs().maxCoeff());
    if (delta.cwiseAbs().maxCoeff() <= options.newton_tol * scale) return true;
  }
  return false;
}

RVector rk4(const ScalarVariable& var, const RVector& z0, double t, double step) {
  const CMatrix h0 = var.matrix_at(t);
  const CMatrix hm = var.is_time_dependent() ? var.matrix_at(t + 0.5 * step) : h0;
  const CMatrix h1 = var.matrix_at(t + step);
  const RVector k1 = rhs(h0, z0);
  const RVector k2 = rhs(hm, z0 + 0.5 * step * k1);
  const RVector k3 = rhs(hm, z0 + 0.5 * step * k2);
  const RVector k4 = rhs(h1, z0 + step * k3);
  return z0 + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

RVector midpoint_with_halving(const ScalarVariable& var, const RVector& z0, double t, double step,
                              const EvolveOptions& options, int depth) {
  RVector z1;
  if (implicit_midpoint(var.matrix_at(t + 0.5 * step), z0, step, options, z1)) return z1;
  if (depth >= options.max_step_halvings) {
    std::ostringstream os;
    os << "implicit midpoint Newton iteration failed at t = " << t << " with step " << step;
    throw NewtonConvergenceError(os.str());
  }
  const RVector half = midpoint_with_halving(var, z0, t, 0.5 * step, options, depth + 1);
  return midpoint_with_halving(var, half, t + 0.5 * step, 0.5 * step, options, depth + 1);
}

void validate_options(const EvolveOptions& options) {
  if (!(options.step > 0.0)) throw ValidationError("integration step must be positive");
  if (!(options.boundary_margin > 0.0)) throw ValidationError("boundary margin must be positive");
  if (!(options.newton_tol > 0.0) || options.newton_max_iterations < 1) {
    throw ValidationError("invalid Newton settings");
  }
}

}  // namespace

ScalarVariable::ScalarVariable(HermitianObservable observable)
    : n_(observable.dim()), label_(observable.label()), constant_(observable.entries()) {}

ScalarVariable ScalarVariable::time_dependent(int n, MatrixFunction matrix,
                                              MatrixFunction derivative, std::string label) {
  if (!matrix) throw ValidationError("time-dependent variable needs a matrix function");
  ScalarVariable v;
  v.n_ = n;
  v.label_ = std::move(label);
  v.matrix_fn_ = std::move(matrix);
  v.derivative_fn_ = std::move(derivative);
  return v;
}

CMatrix ScalarVariable::matrix_at(double t) const {
  if (!matrix_fn_) return constant_;
  CMatrix m = matrix_fn_(t);
  if (m.rows() != n_) throw ValidationError("time-dependent matrix has the wrong dimension");
  return validate_hermitian(m, label_, 1e-12).entries();
}

CMatrix ScalarVariable::derivative_at(double t) const {
  if (!matrix_fn_) return CMatrix::Zero(n_, n_);
  if (derivative_fn_) return derivative_fn_(t);
  return (matrix_at(t + kTimeFdStep) - matrix_at(t - kTimeFdStep)) / (2.0 * kTimeFdStep);
}

ScalarVariable ScalarVariable::negated() const {
  ScalarVariable v = *this;
  if (matrix_fn_) {
    v.matrix_fn_ = [f = matrix_fn_](double t) -> CMatrix { return -f(t); };
    if (derivative_fn_) v.derivative_fn_ = [d = derivative_fn_](double t) -> CMatrix { return -d(t); };
  } else {
    v.constant_ = -constant_;
  }
  return v;
}

double evaluate(const CMatrix& f, const RVector& p, const RVector& phi) {
  const auto n = p.size();
  Complex sum(0.0, 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      sum += f(i, j) * std::sqrt(p[i] * p[j]) * std::polar(1.0, -(phi[i] - phi[j]));
  const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  if (std::abs(sum.imag()) > 1e-12 * scale) {
    std::ostringstream os;
    os << "scalar variable has imaginary residue " << sum.imag();
    throw InconsistencyError(os.str());
  }
  return sum.real();
}

double evaluate(const ScalarVariable& var, const Preparation& prep, double t) {
  require_same_dimension(var.dim(), prep.dim(), "evaluate");
  return evaluate(var.matrix_at(t), prep.p(), prep.phi());
}

Gradient gradient(const CMatrix& f, const RVector& p, const RVector& phi) {
  const auto n = p.size();
  Gradient g{RVector(n), RVector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex phase_sum(0.0, 0.0), prob_sum(0.0, 0.0);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Complex e = f(i, k) * std::polar(1.0, -(phi[i] - phi[k]));
      phase_sum += e * std::sqrt(p[i] * p[k]);
      prob_sum += e * std::sqrt(p[k] / p[i]);
    }
    g.d_dphi[i] = 2.0 * phase_sum.imag();
    g.d_dp[i] = prob_sum.real();
  }
  return g;
}

Gradient hamiltonian_gradient(const ScalarVariable& var, const Preparation& prep, double t,
                              double validation_tol) {
  require_same_dimension(var.dim(), prep.dim(), "hamiltonian_gradient");
  if (!prep.is_interior(validation_tol)) {
    throw SingularChartError("gradient is singular on the simplex boundary (1/sqrt(p_i))");
  }
  return gradient(var.matrix_at(t), prep.p(), prep.phi());
}

PhaseVelocity hamilton_rhs(const ScalarVariable& h, const Preparation& prep, double t,
                           double validation_tol) {
  Gradient g = hamiltonian_gradient(h, prep, t, validation_tol);
  return {std::move(g.d_dphi), -g.d_dp};
}

Integrator parse_integrator(const std::string& name) {
  if (name == "implicit-midpoint" || name == "implicit_midpoint") return Integrator::implicit_midpoint;
  if (name == "implicit-midpoint4" || name == "implicit_midpoint4") {
    return Integrator::implicit_midpoint4;
  }
  if (name == "rk4") return Integrator::rk4;
  throw ValidationError("unknown integrator '" + name + "' (expected implicit-midpoint or rk4)");
}

std::string to_string(Integrator method) {
  switch (method) {
    case Integrator::implicit_midpoint:
      return "implicit-midpoint";
    case Integrator::implicit_midpoint4:
      return "implicit-midpoint4";
    case Integrator::rk4:
      return "rk4";
  }
  return "unknown";
}

PhasePoint integrator_step(const ScalarVariable& h_var, const PhasePoint& z, double t, double h,
                           const EvolveOptions& options) {
  const RVector z0 = stack(z);
  switch (options.method) {
    case Integrator::rk4:
      return unstack(rk4(h_var, z0, t, h));
    case Integrator::implicit_midpoint:
      return unstack(midpoint_with_halving(h_var, z0, t, h, options, 0));
    case Integrator::implicit_midpoint4: {
      // Triple jump: symmetric composition of midpoint steps, order 4.
      const double cbrt2 = std::cbrt(2.0);
      const double outer = 1.0 / (2.0 - cbrt2);
      const double inner = -cbrt2 / (2.0 - cbrt2);
      RVector v = midpoint_with_halving(h_var, z0, t, outer * h, options, 0);
      v = midpoint_with_halving(h_var, v, t + outer * h, inner * h, options, 0);
      return unstack(midpoint_with_halving(h_var, v, t + (outer + inner) * h, outer * h, options, 0));
    }
  }
  throw ValidationError("unknown integrator");
}

namespace {

// Number of equal sub-steps for a macro step of size h: the local rotation
// rate max_i |c_i| / p_i grows like 1/sqrt(p_i) near the simplex boundary,
// and each sub-step is kept below options.max_rotation radians.
int substeps_for(const ScalarVariable& h_var, const PhasePoint& z, double t, double h,
                 const EvolveOptions& options) {
  if (!(options.max_rotation > 0.0)) return 1;
  const Products pr = products(h_var.matrix_at(t), z.first, z.second);
  double rate = 0.0;
  for (Eigen::Index i = 0; i < z.first.size(); ++i) {
    rate = std::max(rate, std::abs(pr.c[i]) / z.first[i]);
  }
  const double needed = std::ceil(std::abs(h) * rate / options.max_rotation);
  return static_cast<int>(std::clamp(needed, 1.0, 1e6));
}

// Shared stepping loop; `on_sample` sees every accepted point.
template <class OnSample>
PhasePoint integrate(const ScalarVariable& h_var, PhasePoint z, double t0, double duration,
                     const EvolveOptions& options, OnSample&& on_sample, Trajectory* partial) {
  validate_options(options);
  require_same_dimension(h_var.dim(), static_cast<int>(z.first.size()), "evolve");
  const double direction = duration < 0.0 ? -1.0 : 1.0;
  const double span = std::abs(duration);
  // An integer step count avoids accumulating round-off in t.
  const auto steps = static_cast<long>(std::ceil(span / options.step - 1e-9));
  auto boundary_error = [&](double t) {
    std::ostringstream os;
    os << "trajectory reached the simplex boundary margin " << options.boundary_margin
       << " near t = " << t;
    return BoundaryProximityError(os.str(), partial ? *partial : Trajectory{});
  };
  if (z.first.minCoeff() <= options.boundary_margin) throw boundary_error(t0);

  double t = t0;
  for (long k = 1; k <= steps; ++k) {
    const double t_next = t0 + direction * std::min(span, static_cast<double>(k) * options.step);
    RVector v = stack(z);
    try {
      const double h = t_next - t;
      const int sub = substeps_for(h_var, z, t, h, options);
      PhasePoint w = z;
      for (int s = 0; s < sub; ++s) {
        w = integrator_step(h_var, w, t + s * h / sub, h / sub, options);
      }
      v = stack(w);
    } catch (const NewtonConvergenceError&) {
      // A failed Newton solve next to the boundary is a boundary problem.
      if (z.first.minCoeff() < 1e-4) throw boundary_error(t);
      throw;
    }
    z = unstack(v);
    if (!z.first.allFinite() || z.first.minCoeff() <= options.boundary_margin) {
      throw boundary_error(t);
    }
    for (Eigen::Index i = 0; i < z.second.size(); ++i) z.second[i] = wrap_phase(z.second[i]);
    t = t_next;
    on_sample(t, z);
  }
  return z;
}

}  // namespace

PhasePoint flow(const ScalarVariable& h_var, const PhasePoint& z, double t0, double duration,
                const EvolveOptions& options) {
  return integrate(h_var, z, t0, duration, options, [](double, const PhasePoint&) {}, nullptr);
}

Trajectory evolve(const ScalarVariable& h_var, const Preparation& init, double t_final,
                  const EvolveOptions& options) {
  require_same_dimension(h_var.dim(), init.dim(), "evolve");
  if (!(t_final >= 0.0)) throw ValidationError("t_final must be nonnegative");
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.points.push_back(init);
  traj.energy.push_back(evaluate(h_var, init, 0.0));
  integrate(
      h_var, {init.p(), init.phi()}, 0.0, t_final, options,
      [&](double t, const PhasePoint& z) {
        // Sum(p) is a linear invariant of both integrators; only round-off
        // separates it from 1.
        Preparation prep = Preparation::make(z.first, z.second, 1e-12, 1e-9);
        traj.energy.push_back(evaluate(h_var, prep, t));
        traj.times.push_back(t);
        traj.points.push_back(std::move(prep));
      },
      &traj);
  return traj;
}

double poisson_bracket(const ScalarVariable& f, const ScalarVariable& g, const Preparation& prep,
                       double t) {
  const Gradient gf = hamiltonian_gradient(f, prep, t);
  const Gradient gg = hamiltonian_gradient(g, prep, t);
  return gf.d_dp.dot(gg.d_dphi) - gf.d_dphi.dot(gg.d_dp);
}

double total_time_derivative(const ScalarVariable& f, const ScalarVariable& h,
                             const Preparation& prep, double t) {
  require_same_dimension(f.dim(), h.dim(), "total_time_derivative");
  const double explicit_part =
      f.is_time_dependent() ? evaluate(f.derivative_at(t), prep.p(), prep.phi()) : 0.0;
  return explicit_part + poisson_bracket(f, h, prep, t);
}

}  // namespace prepspace
