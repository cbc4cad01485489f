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

#include "polar/pbrdf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxZenith = 89.9 * kPi / 180.0;

void check_rho_domain(double theta, double eta) {
  require(std::isfinite(theta) && theta >= 0.0 && theta < kPi / 2, "rho: zenith must lie in [0, pi/2)");
  require(std::isfinite(eta) && eta > 1.0, "rho: refractive index must exceed 1");
}

}  // namespace

void NormalMap::set(int x, int y, const Vec3& n) {
  for (int c = 0; c < 3; ++c) normals.at(x, y, c) = n[c];
}

void Material::validate() const {
  require(std::isfinite(eta) && eta > 1.0 && eta <= 3.0, "material: eta must lie in (1, 3]");
  require(albedo >= 0.0 && albedo <= 1.0, "material: albedo must lie in [0, 1]");
}

void SceneLight::validate() const {
  const double len = std::hypot(direction[0], direction[1], direction[2]);
  require(std::abs(len - 1.0) <= 1e-6, "light: direction must be a unit vector");
  require(ambient >= 0.0 && ambient <= 1.0, "light: ambient must lie in [0, 1]");
}

NormalMap make_ellipsoid(int width, int height, double cx, double cy, double a, double b, double c,
                         double rotation) {
  require(width > 0 && height > 0, "make_ellipsoid: empty grid");
  require(a > 0.0 && b > 0.0 && c > 0.0, "make_ellipsoid: semi-axes must be positive");
  NormalMap out{Image(width, height, 3), Mask(width, height)};
  const double cr = std::cos(rotation), sr = std::sin(rotation);
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const double dx = pixel_x(col, width) - cx, dy = pixel_y(row, height) - cy;
      const double u = cr * dx + sr * dy, v = -sr * dx + cr * dy;
      const double q = (u / a) * (u / a) + (v / b) * (v / b);
      if (q >= 1.0) continue;
      const double z = c * std::sqrt(1.0 - q);
      const double nu = u / (a * a), nv = v / (b * b), nz = z / (c * c);
      const double len = std::hypot(nu, nv, nz);
      out.set(col, row, {(cr * nu - sr * nv) / len, (sr * nu + cr * nv) / len, nz / len});
      out.mask.at(col, row) = 1;
    }
  }
  return out;
}

NormalMap make_sphere(int resolution, double radius_fraction) {
  require(resolution >= 16, "make_sphere: resolution must be at least 16");
  require(radius_fraction > 0.0 && radius_fraction <= 1.0, "make_sphere: radius fraction must lie in (0, 1]");
  const double r = radius_fraction * resolution / 2.0;
  return make_ellipsoid(resolution, resolution, 0.0, 0.0, r, r, r, 0.0);
}

double rho_diffuse(double theta, double eta) {
  check_rho_domain(theta, eta);
  const double s = std::sin(theta), c = std::cos(theta);
  const double s2 = s * s;
  const double num = (eta - 1.0 / eta) * (eta - 1.0 / eta) * s2;
  const double den = 2.0 + 2.0 * eta * eta - (eta + 1.0 / eta) * (eta + 1.0 / eta) * s2 +
                     4.0 * c * std::sqrt(eta * eta - s2);
  return num / den;
}

double rho_specular(double theta, double eta) {
  check_rho_domain(theta, eta);
  const double s = std::sin(theta), c = std::cos(theta);
  const double s2 = s * s;
  const double num = 2.0 * s2 * c * std::sqrt(eta * eta - s2);
  const double den = eta * eta - s2 - eta * eta * s2 + 2.0 * s2 * s2;
  return std::clamp(num / den, 0.0, 1.0);
}

PolarStateMap render_polar(const NormalMap& nm, const Material& material, const SceneLight& light) {
  require_same_shape(nm.normals, Image(nm.mask.width(), nm.mask.height(), 3), "render_polar");
  material.validate();
  light.validate();
  const int w = nm.width(), h = nm.height();
  PolarStateMap out{Image(w, h), Image(w, h), Image(w, h), Mask(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!nm.mask.at(x, y)) continue;
      const Vec3 n = nm.at(x, y);
      const double ndotl = n[0] * light.direction[0] + n[1] * light.direction[1] + n[2] * light.direction[2];
      out.s0.at(x, y) = material.albedo * std::max(0.0, ndotl) + light.ambient;
      if (n[2] <= 0.0) continue;
      const double theta = std::acos(std::min(1.0, n[2]));
      if (!(theta < kPi / 2)) continue;
      const double azimuth = std::atan2(n[1], n[0]);
      double dolp, aolp;
      if (material.mode == ReflectionMode::kDiffuse) {
        dolp = rho_diffuse(theta, material.eta);
        aolp = azimuth;
      } else {
        dolp = rho_specular(theta, material.eta);
        aolp = azimuth + kPi / 2;
      }
      out.dolp.at(x, y) = dolp;
      if (dolp >= kEpsPol) {
        out.valid.at(x, y) = 1;
        out.aolp.at(x, y) = wrap_aolp(aolp);
      }
    }
  }
  return out;
}

std::optional<double> diffuse_zenith(double dolp, double eta) {
  require(std::isfinite(eta) && eta > 1.0, "diffuse_zenith: refractive index must exceed 1");
  if (!(dolp >= kEpsPol)) return std::nullopt;
  if (dolp > rho_diffuse(kMaxZenith, eta)) return std::nullopt;
  double lo = 0.0, hi = kMaxZenith;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (rho_diffuse(mid, eta) < dolp) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

NormalMap invert_diffuse(const PolarStateMap& state, const Material& material, const Mask* foreground) {
  state.check_shape();
  require(state.channels() == 1, "invert_diffuse: single-channel state required");
  require(std::isfinite(material.eta) && material.eta > 1.0 && material.eta <= 3.0,
          "invert_diffuse: refractive index must be known and lie in (1, 3]");
  const Mask& fg = foreground ? *foreground : state.valid;
  require_same_shape(fg, state.valid, "invert_diffuse foreground");
  const int w = state.width(), h = state.height();

  double sx = 0.0, sy = 0.0;
  std::size_t count = 0;
  for (int row = 0; row < h; ++row)
    for (int col = 0; col < w; ++col)
      if (fg.at(col, row)) {
        sx += pixel_x(col, w);
        sy += pixel_y(row, h);
        ++count;
      }
  const double cx = count ? sx / count : 0.0, cy = count ? sy / count : 0.0;

  NormalMap out{Image(w, h, 3), Mask(w, h)};
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      if (!state.valid.at(col, row)) continue;
      const auto theta = diffuse_zenith(state.dolp.at(col, row), material.eta);
      if (!theta) continue;
      double azimuth = state.aolp.at(col, row);
      const double ox = pixel_x(col, w) - cx, oy = pixel_y(row, h) - cy;
      if (std::cos(azimuth) * ox + std::sin(azimuth) * oy < 0.0) azimuth += kPi;
      const double st = std::sin(*theta);
      out.set(col, row, {st * std::cos(azimuth), st * std::sin(azimuth), std::cos(*theta)});
      out.mask.at(col, row) = 1;
    }
  }
  return out;
}

double angle_between(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate for nearly parallel vectors.
  const Vec3 cross{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return std::atan2(std::hypot(cross[0], cross[1], cross[2]), dot);
}

}  // namespace polar
