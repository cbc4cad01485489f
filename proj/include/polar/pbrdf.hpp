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

// Closed-form Fresnel polarization of dielectric surfaces under orthographic
// viewing along +z, and the diffuse shape-from-polarization inverse.
//
// Pixel coordinates: x = col - (W-1)/2 grows right, y = (H-1)/2 - row grows
// up, z points toward the camera.

#pragma once

#include <array>
#include <optional>

#include "polar/grid.hpp"
#include "polar/stokes.hpp"

namespace polar {

using Vec3 = std::array<double, 3>;

struct NormalMap {
  Image normals;  ///< three channels (nx, ny, nz); zero off-mask
  Mask mask;

  int width() const { return normals.width(); }
  int height() const { return normals.height(); }
  Vec3 at(int x, int y) const { return {normals.at(x, y, 0), normals.at(x, y, 1), normals.at(x, y, 2)}; }
  void set(int x, int y, const Vec3& n);
};

enum class ReflectionMode { kDiffuse, kSpecular };

struct Material {
  double eta = 1.5;
  ReflectionMode mode = ReflectionMode::kDiffuse;
  double albedo = 0.8;

  void validate() const;
};

struct SceneLight {
  Vec3 direction{0.0, 0.0, 1.0};  ///< unit vector toward the light
  double ambient = 0.0;

  void validate() const;
};

/// Orthographic sphere centred in a resolution x resolution grid with radius
/// radius_fraction * resolution / 2.
NormalMap make_sphere(int resolution, double radius_fraction);

/// Ellipsoid with semi-axes (a, b) in the image plane, rotated by `rotation`
/// radians, depth semi-axis c, centred at (cx, cy) in pixel-centre
/// coordinates of a width x height grid (origin at the grid centre).
NormalMap make_ellipsoid(int width, int height, double cx, double cy, double a, double b, double c,
                         double rotation);

/// Diffuse DoLP as a function of zenith angle. Strictly increasing on [0, pi/2).
double rho_diffuse(double theta, double eta);
/// Specular DoLP; reaches 1 at the Brewster angle.
double rho_specular(double theta, double eta);

PolarStateMap render_polar(const NormalMap& normals, const Material& material, const SceneLight& light);

/// Recovers normals from a diffuse polarization state. The zenith comes from
/// bisection on rho_diffuse, the azimuth from AoLP with the pi ambiguity
/// resolved toward the outward direction from the centroid of `foreground`
/// (the valid mask when absent).
NormalMap invert_diffuse(const PolarStateMap& state, const Material& material,
                         const Mask* foreground = nullptr);

/// Zenith angle whose diffuse DoLP equals `dolp`, searched on [0, 89.9 deg];
/// empty when no such angle exists.
std::optional<double> diffuse_zenith(double dolp, double eta);

/// Angle between two unit vectors, radians.
double angle_between(const Vec3& a, const Vec3& b);

/// Pixel-centre coordinates (x right, y up) relative to the grid centre.
inline double pixel_x(int col, int width) { return col - (width - 1) / 2.0; }
inline double pixel_y(int row, int height) { return (height - 1) / 2.0 - row; }

}  // namespace polar
