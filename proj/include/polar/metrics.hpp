// Copyright 2026 The Polarsim Authors
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

#include <array>
#include <cstddef>
#include <limits>
#include <string>

#include "polar/grid.hpp"
#include "polar/stokes.hpp"

namespace polar {

/// Reported for PSNR when the two images are identical.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// SSIM constants: 11x11 Gaussian window with sigma 1.5, K1 = 0.01,
/// K2 = 0.03, averaged over every window position that fits in the image.
struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double peak = 1.0;
};

/// Angular distance between AoLPs on the pi-periodic circle, in [0, pi/2].
double ang_e(double phi_gt, double phi_est);

/// Mean ang_e over the mask, in degrees.
double mange(const Image& aolp_gt, const Image& aolp_est, const Mask& mask);
/// Mean |est - gt| over the mask.
double mabse(const Image& dolp_gt, const Image& dolp_est, const Mask& mask);
/// 10 log10(peak^2 / MSE) over the mask (all pixels when mask is null);
/// kPsnrIdentical when MSE is zero.
double psnr(const Image& img, const Image& ref, double peak = 1.0, const Mask* mask = nullptr);
double ssim(const Image& img, const Image& ref, const SsimParams& params = {});

/// Intersection of two validity masks.
Mask both_valid(const Mask& a, const Mask& b);

struct MetricReport {
  std::array<double, 4> psnr{};  ///< per analyzer angle 0/45/90/135
  std::array<double, 4> ssim{};
  double psnr_mean = 0.0;
  double ssim_mean = 0.0;
  double mange = 0.0;  ///< degrees
  double mabse = 0.0;
  std::size_t pixel_count = 0;  ///< pixels valid in both states

  /// key=value lines; PSNR infinity prints as "inf".
  std::string to_key_value() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// Compares two polarization states: AoLP/DoLP errors on the jointly valid
/// pixels and PSNR/SSIM on the four analyzer images synthesized from each.
MetricReport evaluate(const PolarStateMap& gt, const PolarStateMap& est, const SsimParams& params = {});

/// Same, but with explicit analyzer images for the image metrics.
MetricReport evaluate(const PolarStateMap& gt, const PolarStateMap& est, const PolarizationStack& gt_images,
                      const PolarizationStack& est_images, const SsimParams& params = {});

/// Neumaier-compensated running sum; deterministic for a fixed input order.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Formats PSNR with "inf" for the identical-image sentinel.
std::string format_metric(double v);

}  // namespace polar
