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

#include "prepspace/core.hpp"
#include "prepspace/transform.hpp"

namespace prepspace {

// A displacement (dp, dphi) tangent to the simplex: sum(dp) == 0.
class TangentDisplacement {
 public:
  static TangentDisplacement make(RVector dp, RVector dphi, double tol = 1e-12);
  static TangentDisplacement zero(int n);

  int dim() const { return static_cast<int>(dp_.size()); }
  const RVector& dp() const { return dp_; }
  const RVector& dphi() const { return dphi_; }

  TangentDisplacement scaled(double s) const { return {dp_ * s, dphi_ * s}; }

 private:
  TangentDisplacement(RVector dp, RVector dphi) : dp_(std::move(dp)), dphi_(std::move(dphi)) {}
  RVector dp_;
  RVector dphi_;
};

// ds^2 = sum dp_i^2 / (4 p_i) + sum p_i dphi_i^2 - (sum p_i dphi_i)^2.
// Throws SingularChartError when some p_i <= validation_tol. Round-off
// negatives are clamped to 0 (with a warning on stderr below -1e-12).
double line_element_squared(const Preparation& prep, const TangentDisplacement& d,
                            double validation_tol = 1e-12);

// Angle between the rays of two states, in [0, pi/2].
double hilbert_angle(const StateVector& psi1, const StateVector& psi2);

// (prep + d), with phases reduced.
Preparation displaced(const Preparation& prep, const TangentDisplacement& d);

struct MetricAngleSample {
  double scale = 0.0;
  double angle_squared = 0.0;
  double line_element = 0.0;
  double abs_difference = 0.0;
  double ratio = 0.0;  // abs_difference / scale^2
};

struct MetricAngleReport {
  MetricAngleSample coarse;  // at `scale`
  MetricAngleSample fine;    // at `scale / 2`
  double reduction = 0.0;    // coarse.ratio / fine.ratio (inf when fine.ratio == 0)
  bool passed = false;       // reduction >= 2, or both differences negligible
};

// Compares angle^2 with ds^2 along `d` at `scale` and `scale / 2`.
MetricAngleReport verify_metric_matches_angle(const Preparation& prep,
                                              const TangentDisplacement& d, double scale);

struct FrameInvarianceReport {
  double line_element = 0.0;        // ds^2 at (prep, scale * d)
  double image_line_element = 0.0;  // ds^2 at the image with the pushed-forward displacement
  double relative_deviation = 0.0;
  bool passed = false;  // relative_deviation < 1e-6
};

// Pushes `scale * d` forward through the frame by central differences of
// `apply` and compares ds^2 before and after.
FrameInvarianceReport verify_metric_frame_invariance(const Preparation& prep,
                                                     const TangentDisplacement& d,
                                                     const UnitaryFrameMap& frame,
                                                     double scale = 1e-5);

}  // namespace prepspace
