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

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prepspace/core.hpp"
#include "prepspace/dynamics.hpp"
#include "prepspace/montecarlo.hpp"

namespace prepspace {

// The target mean lies outside the spectrum range.
class InfeasibleConstraintError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The target mean sits on a spectrum endpoint; beta would be infinite.
class DivergentBetaError : public InfeasibleConstraintError {
 public:
  using InfeasibleConstraintError::InfeasibleConstraintError;
};

// ln(rho) or a similar function is undefined for the given input.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Maximum-entropy outcome distribution rho_i = e^{-beta F_i} / Z for a
// measured mean of the observable F.
struct MaxEntSolution {
  double beta = 0.0;
  double z = 0.0;
  RVector rho;
  RVector eigenvalues;  // F_i, in the order of `eigenbasis` columns
  CMatrix eigenbasis;   // columns: eigenvectors of F in the computational frame
  double target_mean = 0.0;

  int dim() const { return static_cast<int>(rho.size()); }
  // e^{-beta F} in the computational frame.
  CMatrix boltzmann_operator() const;
};

// beta solving -d(ln Z)/d(beta) = target_mean. Throws InfeasibleConstraintError
// when the mean lies outside [min F, max F] and DivergentBetaError on an
// endpoint. A fully degenerate spectrum admits only its own value (beta = 0).
MaxEntSolution solve_maxent(const RVector& eigenvalues, double target_mean,
                            double root_tol = 1e-12);
MaxEntSolution solve_maxent(const HermitianObservable& observable, double target_mean,
                            double root_tol = 1e-12);

// Mean of F under e^{-beta F} / Z.
double canonical_mean(const RVector& eigenvalues, double beta);

// Integral of p_1^m_1 ... p_n^m_n over the simplex:
// prod(m_i!) / (sum(m_i) + n - 1)!. Uses log-gamma once n + sum(m) > 20.
double simplex_moment(int n, const std::vector<int>& m);

double factorial(int k);

// A (possibly signed) density w over preparation space.
class EnsembleDistribution {
 public:
  using Evaluator = std::function<double(const Preparation&)>;

  struct Provenance {
    std::shared_ptr<const EnsembleDistribution> initial;
    CMatrix hamiltonian;
    double elapsed = 0.0;
  };

  EnsembleDistribution(int n, Evaluator evaluator, double time = 0.0, std::string description = {});

  int dim() const { return n_; }
  double time() const { return time_; }
  const std::string& description() const { return description_; }
  const std::optional<Provenance>& time_evolved_from() const { return provenance_; }

  double operator()(const Preparation& z) const { return evaluator_(z); }

  // Points whose evaluation was abandoned (returned NaN), e.g. backward
  // characteristics that hit the boundary margin.
  std::size_t flagged_points() const { return flagged_ ? flagged_->load() : 0; }

 private:
  friend EnsembleDistribution liouville_evolve(const EnsembleDistribution&, const ScalarVariable&,
                                               double, const EvolveOptions&);
  int n_;
  Evaluator evaluator_;
  double time_;
  std::string description_;
  std::optional<Provenance> provenance_;
  std::shared_ptr<std::atomic<std::size_t>> flagged_;
};

// w0 = n!/(2pi)^n [ (n+1) <e^{-beta F}> / Z - 1 ], where <e^{-beta F}> is the
// expectation of the Boltzmann operator; in the F-diagonal frame it equals
// sum_i e^{-beta F_i} p_i.
EnsembleDistribution w0_build(const MaxEntSolution& solution);

// w(z, t0 + t) = w(Phi_{-t}(z), t0) along characteristics of the flow
// generated by a time-independent H. Points whose backward characteristic
// reaches the boundary margin evaluate to NaN and are counted.
EnsembleDistribution liouville_evolve(const EnsembleDistribution& w, const ScalarVariable& h,
                                      double t, const EvolveOptions& options = {});

struct DensityMatrix {
  CMatrix entries;
  RMatrix std_error;  // per-entry |complex| standard error
  double trace = 0.0;
  double trace_std_error = 0.0;
  double time = 0.0;
  std::size_t samples = 0;

  int dim() const { return static_cast<int>(entries.rows()); }
  static DensityMatrix exact(CMatrix entries, double time = 0.0);
};

// rho_ij = integral of w sqrt(p_i p_j) e^{i phi_ij} d(mu), Hermitized.
// Throws InconsistencyError when the trace misses 1 by more than 5 standard
// errors.
DensityMatrix rho_reconstruct(const EnsembleDistribution& w, const MeasureSampler& sampler,
                              std::size_t samples, Execution exec = Execution::parallel);

// <rho>(z) = sum_ij rho_ij sqrt(p_i p_j) e^{-i phi_ij}.
double rho_expectation(const CMatrix& rho, const Preparation& z);

struct BridgeReport {
  std::vector<double> residuals;
  std::vector<double> tolerances;
  double max_residual = 0.0;
  double max_excess = 0.0;  // max(residual - tolerance), <= 0 when passing
  bool passed = false;
};

struct BridgeTolerance {
  double sigma_multiplier = 3.0;  // applied to rho's standard errors
  double absolute = 1e-10;        // added to every point
};

// Residual |(2pi)^n w(z) - (n+1)! <rho>(z) + n!| at each point, against a
// tolerance propagated from rho's Monte-Carlo error.
BridgeReport bridge_check(const EnsembleDistribution& w, const DensityMatrix& rho,
                          const std::vector<Preparation>& points,
                          const BridgeTolerance& tolerance = {});

// -sum rho_i ln rho_i. Throws DomainError when some rho_i <= 0.
double ensemble_entropy(const MaxEntSolution& solution);

// -integral of w <ln rho> d(mu). ln(rho) via eigendecomposition; eigenvalues
// below 1e-14 raise DomainError.
McEstimate entropy_functional(const EnsembleDistribution& w, const CMatrix& rho,
                              const MeasureSampler& sampler, std::size_t samples,
                              Execution exec = Execution::parallel);

// integral of w q d(mu) with q = <Q>.
McEstimate ensemble_expectation(const EnsembleDistribution& w, const CMatrix& q,
                                const MeasureSampler& sampler, std::size_t samples,
                                Execution exec = Execution::parallel);

struct NegativeMassReport {
  double fraction = 0.0;        // share of samples with w < 0
  McEstimate negative_mass;     // integral of min(w, 0) d(mu)
};

NegativeMassReport negative_mass(const EnsembleDistribution& w, const MeasureSampler& sampler,
                                 std::size_t samples, Execution exec = Execution::parallel);

}  // namespace prepspace
