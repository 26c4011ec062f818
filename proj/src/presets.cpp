// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/presets.hpp"

#include <cmath>

namespace oodp {

SplineCurve polar_curve(const std::function<double(double)>& radius, int degree, int spans, double theta0,
                        bool corner, Vec2 center) {
  std::vector<double> knots;
  if (corner) knots.assign(degree, 0.0);
  else knots.push_back(0.0);
  for (int i = 1; i < spans; ++i) knots.push_back(static_cast<double>(i) / spans);
  const auto space = SplineSpace::periodic(degree, knots);
  return interpolate_curve(space, [&](double t) {
    const double th = theta0 + 2.0 * M_PI * t;
    return Vec2(center + radius(th) * Vec2(std::cos(th), std::sin(th)));
  });
}

SplineCurve ellipse_curve(double a, double b, int degree, int spans) {
  return interpolate_curve(SplineSpace::uniform_periodic(degree, spans), [&](double t) {
    return Vec2(a * std::cos(2.0 * M_PI * t), b * std::sin(2.0 * M_PI * t));
  });
}

SplineCurve square_curve(const Vec2& lo, double side) {
  const auto space = SplineSpace::periodic(2, {0.0, 0.0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75});
  const Vec2 v[4] = {lo, lo + Vec2(side, 0), lo + Vec2(side, side), lo + Vec2(0, side)};
  return interpolate_curve(space, [&](double t) {
    const double x = 4.0 * (t - std::floor(t));
    const int k = std::min(3, static_cast<int>(x));
    return Vec2(v[k] + (x - k) * (v[(k + 1) % 4] - v[k]));
  });
}

std::vector<std::string> preset_names() {
  return {"circle", "ellipse", "peanut", "b612", "star", "detailed", "heart", "drop", "square"};
}

Preset make_preset(const std::string& name) {
  Preset p;
  p.name = name;
  p.exactSolution = "sinpi";
  if (name == "circle") {
    p.description = "unit circle";
    p.boundary = ellipse_curve(1.0, 1.0, 3, 16);
    p.offset.d = 0.4;
  } else if (name == "ellipse") {
    p.description = "ellipse with semi-axes 2 and 1";
    p.boundary = ellipse_curve(2.0, 1.0, 3, 24);
    p.offset.d = 0.4;
  } else if (name == "peanut") {
    p.description = "peanut-like Cassini oval, radial quasi-normal";
    p.boundary = polar_curve(
        [](double th) {
          const double e4 = std::pow(1.1, 4);
          return 1.5 * std::sqrt(std::cos(2 * th) + std::sqrt(e4 - std::pow(std::sin(2 * th), 2)));
        },
        3, 32);
    p.quasiNormal = QuasiNormalKind::RadialToPoint;
    p.offset.c = 0.4;
    p.offset.d = 0.6;
    p.exactSolution = "sin";
  } else if (name == "b612") {
    p.description = "asteroid-like body with a narrow bay, curve-normal quasi-normal";
    p.boundary = polar_curve(
        [](double th) {
          const double x = std::remainder(th - M_PI / 2, 2 * M_PI);
          return 1.0 + 0.1 * std::cos(3 * th) - 0.55 * std::exp(-std::pow(x / 0.28, 2));
        },
        3, 64);
    p.offset.c = 0.5;
    p.offset.d = 0.5;
  } else if (name == "star") {
    p.description = "smooth star r = 1 + 0.2 cos(5 theta), radial quasi-normal";
    p.boundary = polar_curve([](double th) { return 1.0 + 0.2 * std::cos(5 * th); }, 3, 40);
    p.quasiNormal = QuasiNormalKind::RadialToPoint;
    p.offset.d = 0.35;
  } else if (name == "detailed") {
    p.description = "detailed high-frequency boundary, smoothed-curve quasi-normal";
    p.boundary = polar_curve(
        [](double th) { return 1.0 + 0.05 * std::cos(13 * th) + 0.04 * std::sin(7 * th) + 0.1 * std::cos(2 * th); },
        3, 96);
    p.quasiNormal = QuasiNormalKind::SmoothedNormal;
    p.quasiNormalOptions.smoothingSpans = 12;
    p.quasiNormalOptions.smoothingWeight = 1e-4;
    p.offset.d = 0.35;
    p.radialBase = 3;
    p.cellBase = 2;
    p.degrees = {3, 4};
    p.levels = {0, 1, 2, 3};
  } else if (name == "heart") {
    p.description = "heart-like domain with a non-convex corner at the top";
    p.boundary = polar_curve(
        [](double th) {
          const double phi = th - M_PI / 2;
          return 1.0 - 0.5 + 0.5 * std::abs(std::sin(phi / 2));
        },
        3, 32, M_PI / 2, true);
    p.offset.d = 0.2;
    p.hasCorners = true;
  } else if (name == "drop") {
    p.description = "drop-like domain with a convex corner at the top";
    p.boundary = polar_curve(
        [](double th) {
          const double phi = th - M_PI / 2;
          return 0.8 * (1.0 + 0.5 * (1.0 - std::abs(std::sin(phi / 2))));
        },
        3, 32, M_PI / 2, true);
    p.offset.d = 0.3;
    p.hasCorners = true;
  } else if (name == "square") {
    p.description = "unit square with four convex corners";
    p.boundary = square_curve(Vec2(0, 0), 1.0);
    p.offset.d = 0.2;
    p.hasCorners = true;
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown preset '" + name + "'");
  }
  return p;
}

}  // namespace oodp
