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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "polar/error.hpp"
#include "polar/metrics.hpp"

using namespace polar;
using polar::testing::Gen;
using polar::testing::kPi;

namespace {

constexpr double kDeg = kPi / 180.0;

// Direct per-window evaluation of the Gaussian-weighted SSIM map.
double ssim_brute_force(const Image& a, const Image& b, const SsimParams& p) {
  const int n = p.window, r = n / 2;
  std::vector<long double> w(static_cast<std::size_t>(n) * n);
  long double wsum = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      wsum += w[i * n + j] = std::exp(-((i - r) * (i - r) + (j - r) * (j - r)) / (2.0L * p.sigma * p.sigma));
  for (auto& v : w) v /= wsum;
  const long double c1 = (p.k1 * p.peak) * (p.k1 * p.peak), c2 = (p.k2 * p.peak) * (p.k2 * p.peak);
  long double total = 0;
  int count = 0;
  for (int y0 = 0; y0 + n <= a.height(); ++y0)
    for (int x0 = 0; x0 + n <= a.width(); ++x0) {
      long double ma = 0, mb = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          ma += w[i * n + j] * a.at(x0 + j, y0 + i);
          mb += w[i * n + j] * b.at(x0 + j, y0 + i);
        }
      long double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const long double da = a.at(x0 + j, y0 + i) - ma, db = b.at(x0 + j, y0 + i) - mb;
          va += w[i * n + j] * da * da;
          vb += w[i * n + j] * db * db;
          cov += w[i * n + j] * da * db;
        }
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  return static_cast<double>(total / count);
}

Mask full(int w, int h) { return Mask(w, h, 1, 1); }

}  // namespace

TEST_CASE("ang_e on hand-checked pairs") {
  CHECK(ang_e(0.0, 45 * kDeg) == doctest::Approx(45 * kDeg));
  CHECK(ang_e(89 * kDeg, -89 * kDeg) == doctest::Approx(2 * kDeg));
  CHECK(ang_e(0.3, 0.3) == 0.0);
  CHECK(ang_e(0.3, 0.3 + kPi) == doctest::Approx(0.0).epsilon(1e-14).scale(1.0));
  CHECK(ang_e(0.0, kPi / 2) == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(ang_e(std::nan(""), 0.0), PreconditionError);
  CHECK_THROWS_AS(ang_e(0.0, INFINITY), PreconditionError);
}

TEST_CASE("property: ang_e is a pseudometric on the half circle") {
  Gen g(13);
  for (int i = 0; i < 20000; ++i) {
    const double a = g.uniform(-2 * kPi, 2 * kPi), b = g.uniform(-2 * kPi, 2 * kPi), c = g.uniform(-2 * kPi, 2 * kPi);
    const double ab = ang_e(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab <= kPi / 2 + 1e-15);
    CHECK(ab == ang_e(b, a));
    CHECK(ab <= ang_e(a, c) + ang_e(c, b) + 1e-12);
    CHECK(ang_e(a, a + g.integer(-3, 3) * kPi) <= 1e-12);
  }
}

TEST_CASE("mange calibration") {
  Gen g(100);
  const int n = 1000;
  Image a(n, n), b(n, n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = wrap_aolp(g.aolp());
    b[i] = wrap_aolp(g.aolp());
  }
  CHECK(mange(a, a, full(n, n)) == 0.0);
  // Independent uniform angles give a wrap distance uniform on [0, 90].
  CHECK(std::abs(mange(a, b, full(n, n)) - 45.0) < 0.5);

  Image shifted(n, n);
  for (std::size_t i = 0; i < a.size(); ++i) shifted[i] = wrap_aolp(a[i] + 10 * kDeg);
  CHECK(mange(a, shifted, full(n, n)) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("mange and mabse respect the mask") {
  Image a(2, 1, 1, 0.0), b(2, 1, 1, 0.0);
  b.at(1, 0) = 30 * kDeg;
  Mask m(2, 1, 1, 1);
  CHECK(mange(a, b, m) == doctest::Approx(15.0));
  m.at(1, 0) = 0;
  CHECK(mange(a, b, m) == 0.0);
  CHECK_THROWS_AS(mange(a, b, Mask(2, 1, 1, 0)), PreconditionError);
  CHECK_THROWS_AS(mabse(a, b, Mask(2, 1, 1, 0)), PreconditionError);
  CHECK_THROWS_AS(mange(a, Image(3, 1), m), StructuralError);
}

TEST_CASE("mabse against a brute-force loop") {
  CHECK(mabse(Image(3, 3, 1, 0.0), Image(3, 3, 1, 1.0), full(3, 3)) == 1.0);
  Gen g(7);
  const Image gt = g.image(64, 64, 0.0, 1.0);
  Image est(64, 64);
  for (std::size_t i = 0; i < gt.size(); ++i) est[i] = std::min(1.0, gt[i] + 0.1);
  Mask m(64, 64);
  long double sum = 0;
  int count = 0;
  for (std::size_t i = 0; i < gt.size(); ++i)
    if (g.uniform(0, 1) < 0.7) {
      m[i] = 1;
      sum += std::abs(est[i] - gt[i]);
      ++count;
    }
  CHECK(mabse(gt, est, m) == doctest::Approx(static_cast<double>(sum / count)).epsilon(1e-13));
  CHECK(mabse(gt, gt, m) == 0.0);
}

TEST_CASE("psnr") {
  Gen g(1);
  const Image a = g.image(16, 16, 0.0, 0.8);
  Image b = a;
  CHECK(psnr(a, a) == kPsnrIdentical);
  for (double& v : b) v += 0.1;
  CHECK(psnr(b, a) == doctest::Approx(20.0).epsilon(1e-9));
  Image a255 = a, b255 = b;
  for (double& v : a255) v *= 255;
  for (double& v : b255) v *= 255;
  CHECK(psnr(b255, a255, 255.0) == doctest::Approx(psnr(b, a, 1.0)).epsilon(1e-12));
  Mask m(16, 16);
  m[3] = 1;
  b[3] = a[3];
  CHECK(psnr(b, a, 1.0, &m) == kPsnrIdentical);
  const Mask empty(16, 16);
  CHECK_THROWS_AS(psnr(b, a, 1.0, &empty), PreconditionError);
  CHECK_THROWS_AS(psnr(b, a, 0.0), PreconditionError);
  CHECK(format_metric(kPsnrIdentical) == "inf");
  CHECK(format_metric(20.0) == "20.000000");
}

TEST_CASE("ssim matches a per-window reference") {
  Gen g(17);
  for (int trial = 0; trial < 3; ++trial) {
    const Image a = g.image(20, 17, 0.0, 1.0);
    Image b = a;
    for (double& v : b) v = std::clamp(v + 0.2 * g.normal(), 0.0, 1.0);
    CHECK(ssim(a, b) == doctest::Approx(ssim_brute_force(a, b, {})).epsilon(1e-10));
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-14));
  }
  const Image smooth = g.band_limited(24, 24, 2.0, 0.1, 0.9);
  const Image noisy = g.image(24, 24, 0.0, 1.0);
  SsimParams p;
  p.peak = 2.0;
  CHECK(ssim(smooth, noisy, p) == doctest::Approx(ssim_brute_force(smooth, noisy, p)).epsilon(1e-10));
}

TEST_CASE("ssim on hand-checked cases") {
  Gen g(2);
  const Image a = g.image(16, 16, 0.0, 1.0);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-14));
  Image checker(16, 16), negative(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      checker.at(x, y) = ((x / 2 + y / 2) % 2) ? 1.0 : 0.0;
      negative.at(x, y) = 1.0 - checker.at(x, y);
    }
  CHECK(ssim(checker, negative) < 0.5);
  CHECK(ssim(checker, negative) == doctest::Approx(ssim_brute_force(checker, negative, {})).epsilon(1e-10));
  CHECK_THROWS_AS(ssim(Image(10, 20), Image(10, 20)), PreconditionError);
}

TEST_CASE("evaluate reports exact agreement for identical states") {
  Gen g(6);
  const PolarStateMap s = g.state(24, 24);
  const MetricReport r = evaluate(s, s);
  CHECK(r.mange == 0.0);
  CHECK(r.mabse == 0.0);
  CHECK(r.psnr_mean == kPsnrIdentical);
  CHECK(r.ssim_mean == 1.0);
  CHECK(r.pixel_count == 24 * 24);
  CHECK(r.to_key_value().find("psnr=inf\n") != std::string::npos);
  CHECK(r.to_csv_row().starts_with("inf,inf,inf,inf,inf,1.000000"));
}

TEST_CASE("property: evaluate stays within metric ranges") {
  Gen g(23);
  for (int trial = 0; trial < 10; ++trial) {
    const PolarStateMap a = g.state(16, 16), b = g.state(16, 16);
    const MetricReport r = evaluate(a, b);
    CHECK(r.mange >= 0.0);
    CHECK(r.mange <= 90.0);
    CHECK(r.mabse >= 0.0);
    CHECK(r.mabse <= 1.0);
    for (double s : r.ssim) {
      CHECK(s >= -1.0);
      CHECK(s <= 1.0);
    }
  }
}

TEST_CASE("compensated summation") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
  CompensatedSum inf;
  inf.add(3.0);
  inf.add(kPsnrIdentical);
  inf.add(kPsnrIdentical);
  inf.add(1.0);
  CHECK(inf.value() == kPsnrIdentical);
}
