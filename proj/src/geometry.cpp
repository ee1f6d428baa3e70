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

#include "prepspace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

namespace prepspace {

TangentDisplacement TangentDisplacement::make(RVector dp, RVector dphi, double tol) {
  if (dp.size() != dphi.size()) throw ValidationError("displacement components differ in length");
  if (!dp.allFinite() || !dphi.allFinite()) throw ValidationError("displacement must be finite");
  if (std::abs(dp.sum()) > tol) {
    std::ostringstream os;
    os << "displacement leaves the simplex: sum(dp) = " << dp.sum();
    throw ValidationError(os.str());
  }
  return {std::move(dp), std::move(dphi)};
}

TangentDisplacement TangentDisplacement::zero(int n) {
  return {RVector::Zero(n), RVector::Zero(n)};
}

double line_element_squared(const Preparation& prep, const TangentDisplacement& d,
                            double validation_tol) {
  require_same_dimension(prep.dim(), d.dim(), "line_element_squared");
  if (!prep.is_interior(validation_tol)) {
    throw SingularChartError("line element is singular on the simplex boundary");
  }
  const RVector& p = prep.p();
  double fisher = 0.0, phase_second = 0.0, phase_first = 0.0;
  for (int i = 0; i < prep.dim(); ++i) {
    fisher += d.dp()[i] * d.dp()[i] / (4.0 * p[i]);
    phase_second += p[i] * d.dphi()[i] * d.dphi()[i];
    phase_first += p[i] * d.dphi()[i];
  }
  const double ds2 = fisher + phase_second - phase_first * phase_first;
  if (ds2 < 0.0) {
    if (ds2 < -1e-12) std::clog << "prepspace: clamping negative line element " << ds2 << "\n";
    return 0.0;
  }
  return ds2;
}

double hilbert_angle(const StateVector& psi1, const StateVector& psi2) {
  require_same_dimension(psi1.dim(), psi2.dim(), "hilbert_angle");
  const CVector& a = psi1.amplitudes();
  const CVector& b = psi2.amplitudes();
  const Complex overlap = a.dot(b);
  // atan2 of the orthogonal and parallel components is accurate for small
  // angles, where acos(|<a|b>|) loses half the digits.
  const double orthogonal = (b - overlap * a).norm();
  return std::atan2(orthogonal, std::abs(overlap));
}

Preparation displaced(const Preparation& prep, const TangentDisplacement& d) {
  require_same_dimension(prep.dim(), d.dim(), "displaced");
  return Preparation::make(prep.p() + d.dp(), prep.phi() + d.dphi());
}

namespace {

MetricAngleSample sample_at(const Preparation& prep, const TangentDisplacement& d,
                            double scale) {
  const TangentDisplacement step = d.scaled(scale);
  MetricAngleSample s;
  s.scale = scale;
  const double angle =
      hilbert_angle(to_state_vector(prep), to_state_vector(displaced(prep, step)));
  s.angle_squared = angle * angle;
  s.line_element = line_element_squared(prep, step);
  s.abs_difference = std::abs(s.angle_squared - s.line_element);
  s.ratio = s.abs_difference / (scale * scale);
  return s;
}

}  // namespace

MetricAngleReport verify_metric_matches_angle(const Preparation& prep,
                                              const TangentDisplacement& d, double scale) {
  if (!(scale > 0.0)) throw ValidationError("scale must be positive");
  MetricAngleReport r;
  r.coarse = sample_at(prep, d, scale);
  r.fine = sample_at(prep, d, 0.5 * scale);
  r.reduction = r.fine.ratio > 0.0 ? r.coarse.ratio / r.fine.ratio
                                   : std::numeric_limits<double>::infinity();
  // Differences at round-off level carry no convergence information.
  const bool negligible = r.coarse.abs_difference <= 1e-12 && r.fine.abs_difference <= 1e-12;
  r.passed = negligible || r.reduction >= 2.0;
  return r;
}

FrameInvarianceReport verify_metric_frame_invariance(const Preparation& prep,
                                                     const TangentDisplacement& d,
                                                     const UnitaryFrameMap& frame,
                                                     double scale) {
  require_same_dimension(prep.dim(), frame.dim(), "verify_metric_frame_invariance");
  const TangentDisplacement step = d.scaled(scale);
  const Preparation image = apply(frame, prep);
  if (!image.is_interior(1e-12)) {
    throw SingularChartError("frame maps the preparation onto the simplex boundary");
  }
  const Preparation plus = apply(frame, displaced(prep, step));
  const Preparation minus = apply(frame, displaced(prep, step.scaled(-1.0)));
  const int n = prep.dim();
  RVector dp(n), dphi(n);
  for (int i = 0; i < n; ++i) {
    dp[i] = 0.5 * (plus.p()[i] - minus.p()[i]);
    dphi[i] = 0.5 * wrap_phase_difference(plus.phi()[i] - minus.phi()[i]);
  }
  // The image displacement only sums to zero up to round-off of apply.
  dp.array() -= dp.mean();
  const TangentDisplacement pushed = TangentDisplacement::make(dp, dphi);

  FrameInvarianceReport r;
  r.line_element = line_element_squared(prep, step);
  r.image_line_element = line_element_squared(image, pushed);
  const double denom = std::max(std::abs(r.line_element), std::abs(r.image_line_element));
  r.relative_deviation =
      denom > 0.0 ? std::abs(r.line_element - r.image_line_element) / denom : 0.0;
  r.passed = r.relative_deviation < 1e-6;
  return r;
}

}  // namespace prepspace
