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

#include "polar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

namespace polar {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(size);
  const double mid = (size - 1) / 2.0;
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    k[i] = std::exp(-((i - mid) * (i - mid)) / (2.0 * sigma * sigma));
    total += k[i];
  }
  for (double& v : k) v /= total;
  return k;
}

// Valid-region separable filter of one channel.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int ow = w - n + 1, oh = h - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

double ssim_channel(const Image& a, const Image& b, int channel, const SsimParams& p) {
  const int w = a.width(), h = a.height();
  const std::size_t n = a.pixel_count();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      x[i] = a.at(c, r, channel);
      y[i] = b.at(c, r, channel);
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
  const auto k = gaussian_kernel(p.window, p.sigma);
  const auto mx = filter_valid(x, w, h, k), my = filter_valid(y, w, h, k);
  const auto sxx = filter_valid(xx, w, h, k), syy = filter_valid(yy, w, h, k), sxy = filter_valid(xy, w, h, k);
  const double c1 = (p.k1 * p.peak) * (p.k1 * p.peak);
  const double c2 = (p.k2 * p.peak) * (p.k2 * p.peak);
  CompensatedSum total;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    total.add(((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
              ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2)));
  }
  return total.value() / static_cast<double>(mx.size());
}

std::size_t count_set(const Mask& m) {
  return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](auto v) { return v != 0; }));
}

}  // namespace

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (!std::isfinite(t)) {
    // The correction term is meaningless once the sum overflows or is inf.
    sum_ = t;
    comp_ = 0.0;
    return;
  }
  if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
  else comp_ += (v - t) + sum_;
  sum_ = t;
}

double ang_e(double phi_gt, double phi_est) {
  if (!std::isfinite(phi_gt) || !std::isfinite(phi_est)) throw PreconditionError("ang_e: non-finite angle");
  const double d = wrap_aolp(phi_est) - wrap_aolp(phi_gt);
  return std::min({std::abs(d - kPi), std::abs(d), std::abs(d + kPi)});
}

Mask both_valid(const Mask& a, const Mask& b) {
  require_same_shape(a, b, "both_valid");
  Mask out(a.width(), a.height(), a.channels());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (a[i] && b[i]) ? 1 : 0;
  return out;
}

double mange(const Image& gt, const Image& est, const Mask& mask) {
  require_same_shape(gt, est, "mange");
  require_same_shape(gt, mask, "mange mask");
  CompensatedSum total;
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!mask[i]) continue;
    total.add(ang_e(gt[i], est[i]));
    ++n;
  }
  if (n == 0) throw PreconditionError("mange: empty mask");
  return total.value() / static_cast<double>(n) * 180.0 / kPi;
}

double mabse(const Image& gt, const Image& est, const Mask& mask) {
  require_same_shape(gt, est, "mabse");
  require_same_shape(gt, mask, "mabse mask");
  CompensatedSum total;
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!mask[i]) continue;
    total.add(std::abs(est[i] - gt[i]));
    ++n;
  }
  if (n == 0) throw PreconditionError("mabse: empty mask");
  return total.value() / static_cast<double>(n);
}

double psnr(const Image& img, const Image& ref, double peak, const Mask* mask) {
  require_same_shape(img, ref, "psnr");
  if (mask) require_same_shape(img, *mask, "psnr mask");
  require(peak > 0.0, "psnr: peak must be positive");
  CompensatedSum total;
  std::size_t n = 0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    const double d = img[i] - ref[i];
    total.add(d * d);
    ++n;
  }
  if (n == 0) throw PreconditionError("psnr: empty mask");
  const double mse = total.value() / static_cast<double>(n);
  if (mse == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& img, const Image& ref, const SsimParams& p) {
  require_same_shape(img, ref, "ssim");
  require(p.window >= 1 && p.sigma > 0.0 && p.peak > 0.0, "ssim: invalid parameters");
  if (img.width() < p.window || img.height() < p.window)
    throw PreconditionError("ssim: image smaller than the " + std::to_string(p.window) + "px window");
  double total = 0.0;
  for (int c = 0; c < img.channels(); ++c) total += ssim_channel(img, ref, c, p);
  return total / img.channels();
}

MetricReport evaluate(const PolarStateMap& gt, const PolarStateMap& est, const PolarizationStack& gt_images,
                      const PolarizationStack& est_images, const SsimParams& params) {
  gt.check_shape();
  est.check_shape();
  require_same_shape(gt.s0, est.s0, "evaluate");
  gt_images.check_shape();
  est_images.check_shape();
  require_same_shape(gt_images.images[0], est_images.images[0], "evaluate images");

  MetricReport r;
  const Mask joint = both_valid(gt.valid, est.valid);
  r.pixel_count = count_set(joint);
  r.mange = mange(gt.aolp, est.aolp, joint);
  r.mabse = mabse(gt.dolp, est.dolp, joint);
  double psnr_total = 0.0, ssim_total = 0.0;
  for (int k = 0; k < 4; ++k) {
    r.psnr[k] = psnr(est_images.images[k], gt_images.images[k], params.peak);
    r.ssim[k] = ssim(est_images.images[k], gt_images.images[k], params);
    psnr_total += r.psnr[k];
    ssim_total += r.ssim[k];
  }
  r.psnr_mean = psnr_total / 4.0;
  r.ssim_mean = ssim_total / 4.0;
  return r;
}

MetricReport evaluate(const PolarStateMap& gt, const PolarStateMap& est, const SsimParams& params) {
  return evaluate(gt, est, synthesize_stack(gt), synthesize_stack(est), params);
}

std::string format_metric(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string MetricReport::to_key_value() const {
  static constexpr const char* kAngles[] = {"0", "45", "90", "135"};
  std::string out;
  for (int k = 0; k < 4; ++k) out += "psnr_" + std::string(kAngles[k]) + "=" + format_metric(psnr[k]) + "\n";
  out += "psnr=" + format_metric(psnr_mean) + "\n";
  for (int k = 0; k < 4; ++k) out += "ssim_" + std::string(kAngles[k]) + "=" + format_metric(ssim[k]) + "\n";
  out += "ssim=" + format_metric(ssim_mean) + "\n";
  out += "mange=" + format_metric(mange) + "\n";
  out += "mabse=" + format_metric(mabse) + "\n";
  out += "pixel_count=" + std::to_string(pixel_count) + "\n";
  return out;
}

std::string MetricReport::csv_header() {
  return "psnr_0,psnr_45,psnr_90,psnr_135,psnr,ssim_0,ssim_45,ssim_90,ssim_135,ssim,mange,mabse,pixel_count";
}

std::string MetricReport::to_csv_row() const {
  std::string out;
  for (double v : psnr) out += format_metric(v) + ",";
  out += format_metric(psnr_mean) + ",";
  for (double v : ssim) out += format_metric(v) + ",";
  out += format_metric(ssim_mean) + "," + format_metric(mange) + "," + format_metric(mabse) + "," +
         std::to_string(pixel_count);
  return out;
}

}  // namespace polar
