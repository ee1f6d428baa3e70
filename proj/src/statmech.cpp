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

#include "prepspace/statmech.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "prepspace/hilbert.hpp"

namespace prepspace {

namespace {

constexpr double kMaxBeta = 1e18;

// Moments of F under e^{-beta F}, shifted by the extreme eigenvalue that keeps
// the exponentials bounded.
struct CanonicalMoments {
  double mean;
  double variance;
};

CanonicalMoments canonical_moments(const RVector& f, double beta) {
  const double shift = beta >= 0.0 ? f.minCoeff() : f.maxCoeff();
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double w = std::exp(-beta * (f[i] - shift));
    z += w;
    m1 += w * f[i];
    m2 += w * f[i] * f[i];
  }
  const double mean = m1 / z;
  return {mean, std::max(0.0, m2 / z - mean * mean)};
}

MaxEntSolution finish_solution(const RVector& f, double beta, CMatrix basis, double target,
                               double root_tol) {
  MaxEntSolution s;
  s.beta = beta;
  s.eigenvalues = f;
  s.eigenbasis = std::move(basis);
  s.target_mean = target;
  s.rho.resize(f.size());
  s.z = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) s.z += std::exp(-beta * f[i]);
  // rho from shifted exponentials so it stays finite even when Z overflows.
  const double shift = beta >= 0.0 ? f.minCoeff() : f.maxCoeff();
  double zs = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) zs += std::exp(-beta * (f[i] - shift));
  for (Eigen::Index i = 0; i < f.size(); ++i) s.rho[i] = std::exp(-beta * (f[i] - shift)) / zs;

  const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  const double achieved = s.rho.dot(f);
  if (std::abs(achieved - target) > root_tol * scale * 10.0) {
    std::ostringstream os;
    os.precision(17);
    os << "max-entropy root missed its target: mean " << achieved << " vs " << target;
    throw InconsistencyError(os.str());
  }
  return s;
}

}  // namespace

CMatrix MaxEntSolution::boltzmann_operator() const {
  CVector d(eigenvalues.size());
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) d[i] = std::exp(-beta * eigenvalues[i]);
  return eigenbasis * d.asDiagonal() * eigenbasis.adjoint();
}

double canonical_mean(const RVector& eigenvalues, double beta) {
  return canonical_moments(eigenvalues, beta).mean;
}

namespace {

MaxEntSolution solve_in_basis(const RVector& f, double target, double root_tol, CMatrix basis) {
  if (f.size() < 2) throw ValidationError("spectrum must have at least two eigenvalues");
  if (!f.allFinite() || !std::isfinite(target)) {
    throw ValidationError("spectrum and target mean must be finite");
  }
  if (!(root_tol > 0.0)) throw ValidationError("root tolerance must be positive");
  const double lo_f = f.minCoeff();
  const double hi_f = f.maxCoeff();
  const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  const double tol = root_tol * scale;

  if (hi_f - lo_f <= tol) {
    if (std::abs(target - lo_f) <= tol) return finish_solution(f, 0.0, basis, target, root_tol);
    throw InfeasibleConstraintError("degenerate spectrum admits only its own value as the mean");
  }
  if (target < lo_f - tol || target > hi_f + tol) {
    std::ostringstream os;
    os << "target mean " << target << " outside the spectrum range [" << lo_f << ", " << hi_f
       << "]";
    throw InfeasibleConstraintError(os.str());
  }
  if (std::abs(target - lo_f) <= tol || std::abs(target - hi_f) <= tol) {
    throw DivergentBetaError("target mean equals a spectrum endpoint; beta diverges");
  }

  // canonical_mean is strictly decreasing in beta (derivative -Var F).
  double lo = -1.0, hi = 1.0;
  while (canonical_mean(f, hi) > target) {
    hi *= 2.0;
    if (hi > kMaxBeta) throw DivergentBetaError("beta bracket diverged");
  }
  while (canonical_mean(f, lo) < target) {
    lo *= 2.0;
    if (lo < -kMaxBeta) throw DivergentBetaError("beta bracket diverged");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (canonical_mean(f, mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double beta = 0.5 * (lo + hi);
  // Newton polish; keep the bracket as a safeguard.
  for (int it = 0; it < 3; ++it) {
    const CanonicalMoments m = canonical_moments(f, beta);
    if (!(m.variance > 0.0)) break;
    const double next = beta + (m.mean - target) / m.variance;
    if (!(next >= lo && next <= hi)) break;
    beta = next;
  }
  // Reference-free targets such as the spectrum mean should give exactly 0.
  if (std::abs(beta) < 1e-15) beta = 0.0;
  return finish_solution(f, beta, std::move(basis), target, root_tol);
}

}  // namespace

MaxEntSolution solve_maxent(const RVector& eigenvalues, double target_mean, double root_tol) {
  const auto n = eigenvalues.size();
  return solve_in_basis(eigenvalues, target_mean, root_tol, CMatrix::Identity(n, n));
}

MaxEntSolution solve_maxent(const HermitianObservable& observable, double target_mean,
                            double root_tol) {
  const CMatrix& f = observable.entries();
  if (observable.is_diagonal()) {
    return solve_in_basis(f.diagonal().real(), target_mean, root_tol,
                          CMatrix::Identity(f.rows(), f.cols()));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(f);
  if (es.info() != Eigen::Success) throw NumericalAbort("eigendecomposition failed");
  return solve_in_basis(es.eigenvalues(), target_mean, root_tol, es.eigenvectors());
}

double factorial(int k) {
  if (k < 0) throw ValidationError("factorial of a negative number");
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double simplex_moment(int n, const std::vector<int>& m) {
  if (n < 1) throw ValidationError("simplex dimension must be at least 1");
  if (static_cast<int>(m.size()) != n) throw ValidationError("moment vector length must equal n");
  int total = 0;
  for (int mi : m) {
    if (mi < 0) throw ValidationError("moment exponents must be nonnegative");
    total += mi;
  }
  if (n + total <= 20) {
    double num = 1.0;
    for (int mi : m)
      for (int k = 2; k <= mi; ++k) num *= k;
    double den = 1.0;
    for (int k = 2; k <= total + n - 1; ++k) den *= k;
    return num / den;
  }
  double log_value = -std::lgamma(static_cast<double>(total + n));
  for (int mi : m) log_value += std::lgamma(static_cast<double>(mi) + 1.0);
  return std::exp(log_value);
}

EnsembleDistribution::EnsembleDistribution(int n, Evaluator evaluator, double time,
                                           std::string description)
    : n_(n), evaluator_(std::move(evaluator)), time_(time), description_(std::move(description)) {
  if (n < 2) throw ValidationError("ensemble dimension must be at least 2");
  if (!evaluator_) throw ValidationError("ensemble needs an evaluator");
}

EnsembleDistribution w0_build(const MaxEntSolution& solution) {
  const int n = solution.dim();
  const double prefactor = factorial(n) / std::pow(kTwoPi, n);
  const double z = solution.z;
  const CMatrix g = solution.boltzmann_operator();
  auto evaluator = [n, prefactor, z, g](const Preparation& prep) {
    require_same_dimension(n, prep.dim(), "w0");
    const double boltzmann = evaluate(g, prep.p(), prep.phi());
    return prefactor * ((n + 1) * boltzmann / z - 1.0);
  };
  std::ostringstream os;
  os << "w0(beta=" << solution.beta << ")";
  return EnsembleDistribution(n, std::move(evaluator), 0.0, os.str());
}

EnsembleDistribution liouville_evolve(const EnsembleDistribution& w, const ScalarVariable& h,
                                      double t, const EvolveOptions& options) {
  require_same_dimension(w.dim(), h.dim(), "liouville_evolve");
  if (h.is_time_dependent()) {
    throw ValidationError("Liouville evolution requires a time-independent Hamiltonian");
  }
  if (!std::isfinite(t)) throw ValidationError("evolution time must be finite");
  auto initial = std::make_shared<const EnsembleDistribution>(w);
  auto flagged = std::make_shared<std::atomic<std::size_t>>(0);
  const double t0 = w.time();
  auto evaluator = [initial, h, t, t0, options, flagged](const Preparation& z) -> double {
    if (t == 0.0) return (*initial)(z);
    try {
      const PhasePoint back = flow(h, {z.p(), z.phi()}, t0 + t, -t, options);
      RVector p = back.first;
      p /= p.sum();
      return (*initial)(Preparation::make(std::move(p), back.second, 1e-12, 1e-9));
    } catch (const NumericalAbort&) {
      flagged->fetch_add(1, std::memory_order_relaxed);
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  std::ostringstream os;
  os << "liouville(" << w.description() << ", t=" << t << ")";
  EnsembleDistribution out(w.dim(), std::move(evaluator), t0 + t, os.str());
  out.provenance_ = EnsembleDistribution::Provenance{initial, h.matrix_at(t0), t};
  out.flagged_ = flagged;
  return out;
}

DensityMatrix DensityMatrix::exact(CMatrix entries, double time) {
  DensityMatrix d;
  const auto n = entries.rows();
  d.trace = entries.trace().real();
  d.entries = std::move(entries);
  d.std_error = RMatrix::Zero(n, n);
  d.time = time;
  return d;
}

DensityMatrix rho_reconstruct(const EnsembleDistribution& w, const MeasureSampler& sampler,
                              std::size_t samples, Execution exec) {
  const int n = w.dim();
  require_same_dimension(n, sampler.dim(), "rho_reconstruct");
  // Components: re/im of w psi_i conj(psi_j) for all (i, j), then w itself.
  const int components = 2 * n * n + 1;
  const McVectorEstimate est = mc_integrate(
      [&w, n](const Preparation& z, Eigen::Ref<RVector> out) {
        const double wz = w(z);
        const CVector psi = amplitudes(z.p(), z.phi());
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const Complex v = wz * psi[i] * std::conj(psi[j]);
            out[2 * (i * n + j)] = v.real();
            out[2 * (i * n + j) + 1] = v.imag();
          }
        out[2 * n * n] = wz;
      },
      components, sampler, samples, exec);

  DensityMatrix d;
  CMatrix raw(n, n);
  d.std_error.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int k = 2 * (i * n + j);
      raw(i, j) = Complex(est.estimate[k], est.estimate[k + 1]);
      d.std_error(i, j) = std::hypot(est.std_error[k], est.std_error[k + 1]);
    }
  d.entries = 0.5 * (raw + raw.adjoint());
  d.trace = d.entries.trace().real();
  d.trace_std_error = est.std_error[2 * n * n];
  d.time = w.time();
  d.samples = est.accepted;

  const double allowed = std::max(5.0 * d.trace_std_error, 1e-12);
  if (std::abs(d.trace - 1.0) > allowed) {
    std::ostringstream os;
    os << "reconstructed density matrix has trace " << d.trace << " (+/- " << d.trace_std_error
       << ")";
    throw InconsistencyError(os.str());
  }
  return d;
}

double rho_expectation(const CMatrix& rho, const Preparation& z) {
  return evaluate(rho, z.p(), z.phi());
}

BridgeReport bridge_check(const EnsembleDistribution& w, const DensityMatrix& rho,
                          const std::vector<Preparation>& points,
                          const BridgeTolerance& tolerance) {
  const int n = w.dim();
  require_same_dimension(n, rho.dim(), "bridge_check");
  const double volume_factor = std::pow(kTwoPi, n);
  const double np1_fact = factorial(n + 1);
  const double n_fact = factorial(n);
  BridgeReport r;
  r.max_excess = -std::numeric_limits<double>::infinity();
  for (const Preparation& z : points) {
    require_same_dimension(n, z.dim(), "bridge_check");
    const double lhs = volume_factor * w(z);
    const double rhs = np1_fact * rho_expectation(rho.entries, z) - n_fact;
    const double residual = std::abs(lhs - rhs);
    double propagated = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        propagated += rho.std_error(i, j) * std::sqrt(z.p()[i] * z.p()[j]);
    const double tol = tolerance.sigma_multiplier * np1_fact * propagated + tolerance.absolute;
    r.residuals.push_back(residual);
    r.tolerances.push_back(tol);
    r.max_residual = std::max(r.max_residual, std::isnan(residual) ? INFINITY : residual);
    r.max_excess = std::max(r.max_excess, std::isnan(residual) ? INFINITY : residual - tol);
  }
  if (points.empty()) r.max_excess = 0.0;
  r.passed = r.max_excess <= 0.0;
  return r;
}

double ensemble_entropy(const MaxEntSolution& solution) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < solution.rho.size(); ++i) {
    const double r = solution.rho[i];
    if (!(r > 0.0)) throw DomainError("entropy needs strictly positive probabilities");
    s -= r * std::log(r);
  }
  return s;
}

McEstimate entropy_functional(const EnsembleDistribution& w, const CMatrix& rho,
                              const MeasureSampler& sampler, std::size_t samples,
                              Execution exec) {
  require_same_dimension(w.dim(), static_cast<int>(rho.rows()), "entropy_functional");
  const CMatrix hermitian = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian);
  if (es.info() != Eigen::Success) throw NumericalAbort("eigendecomposition failed");
  if (es.eigenvalues().minCoeff() < 1e-14) {
    std::ostringstream os;
    os << "ln(rho) undefined: smallest eigenvalue " << es.eigenvalues().minCoeff();
    throw DomainError(os.str());
  }
  const CMatrix log_rho = hilbert::hermitian_function(hermitian, [](double x) {
    return Complex(std::log(x), 0.0);
  });
  McEstimate e = mc_integrate(
      [&w, &log_rho](const Preparation& z) { return -w(z) * evaluate(log_rho, z.p(), z.phi()); },
      sampler, samples, exec);
  return e;
}

McEstimate ensemble_expectation(const EnsembleDistribution& w, const CMatrix& q,
                                const MeasureSampler& sampler, std::size_t samples,
                                Execution exec) {
  require_same_dimension(w.dim(), static_cast<int>(q.rows()), "ensemble_expectation");
  return mc_integrate([&w, &q](const Preparation& z) { return w(z) * evaluate(q, z.p(), z.phi()); },
                      sampler, samples, exec);
}

NegativeMassReport negative_mass(const EnsembleDistribution& w, const MeasureSampler& sampler,
                                 std::size_t samples, Execution exec) {
  const McVectorEstimate est = mc_integrate(
      [&w](const Preparation& z, Eigen::Ref<RVector> out) {
        const double wz = w(z);
        out[0] = wz < 0.0 ? 1.0 : 0.0;
        out[1] = std::min(wz, 0.0);
      },
      2, sampler, samples, exec);
  NegativeMassReport r;
  r.fraction = est.estimate[0] / sampler.volume();
  r.negative_mass = {est.estimate[1], est.std_error[1], est.accepted, est.rejected};
  return r;
}

}  // namespace prepspace
