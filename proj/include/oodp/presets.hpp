// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

/// @file presets.hpp
/// Analytic example boundaries with default pipeline settings.

#pragma once

#include "oodp/offset.hpp"

#include <string>
#include <vector>

namespace oodp {

struct Preset {
  std::string name;
  std::string description;
  SplineCurve boundary;
  QuasiNormalKind quasiNormal = QuasiNormalKind::CurveNormal;
  QuasiNormalOptions quasiNormalOptions;
  OffsetParams offset;
  double cellSize = 0.0;         ///< h_c (0: derived from the hole)
  std::string exactSolution;     ///< manufactured solution name
  bool hasCorners = false;
  /// Discretization of the convergence study (see SolveOptions).
  int alongBase = 2, radialBase = 0, cellBase = 0;
  std::vector<int> degrees{2, 3, 4};
  std::vector<int> levels{0, 1, 2, 3, 4};
};

/// Closed polar curve r(phi) at theta = theta0 + 2 pi t, interpolated at the
/// Greville points of a uniform periodic space. With `corner` set, t = 0 gets
/// a knot of multiplicity p.
SplineCurve polar_curve(const std::function<double(double)>& radius, int degree, int spans, double theta0 = 0.0,
                        bool corner = false, Vec2 center = Vec2::Zero());

/// Ellipse with semi-axes a, b.
SplineCurve ellipse_curve(double a, double b, int degree, int spans);

/// Axis-aligned square as a degree-2 curve with double knots at the corners.
SplineCurve square_curve(const Vec2& lo, double side);

std::vector<std::string> preset_names();
/// Throws Error(InvalidInput) for unknown names.
Preset make_preset(const std::string& name);

}  // namespace oodp
