// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

/// @file geometry.hpp
/// Planar predicates on polyline samplings of spline curves.

#pragma once

#include "oodp/splines.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace oodp {

struct Polyline {
  std::vector<Vec2> vertices;
  /// Curve parameter of each vertex (empty when the polyline is not sampled from a curve).
  std::vector<double> params;
  bool closed = false;

  std::size_t segment_count() const {
    return vertices.size() < 2 ? 0 : (closed ? vertices.size() : vertices.size() - 1);
  }
  Vec2 segment_begin(std::size_t i) const { return vertices[i]; }
  Vec2 segment_end(std::size_t i) const { return vertices[(i + 1) % vertices.size()]; }
  Polyline reversed() const;
};

struct SamplingConfig {
  int samplesPerSpan = 16;
  double geometricTolerance = 1e-9;
};

Polyline sample_curve(const SplineCurve& curve, const SamplingConfig& config = {});
/// Samples `f` on [a,b] with `perPiece` uniform samples per piece of `breaks`.
Polyline sample_function(const std::function<Vec2(double)>& f, const std::vector<double>& breaks,
                         int perPiece, bool closed);

enum class Containment { Inside, Outside, BoundaryClose };

Containment winding_contains(const Polyline& boundary, const Vec2& point, double tolerance = 1e-9);
int winding_number(const Polyline& boundary, const Vec2& point);

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);
double distance_to_polyline(const Polyline& poly, const Vec2& p);

struct Crossing {
  std::size_t segmentA = 0, segmentB = 0;
  /// Interpolated curve parameters at the crossing (segment indices if no params).
  double paramA = 0.0, paramB = 0.0;
  Vec2 point = Vec2::Zero();
};

struct SimplicityResult {
  bool simple = true;
  std::optional<Crossing> witness;
};

SimplicityResult is_simple(const Polyline& poly, double tolerance = 1e-12);

double signed_area(const Polyline& poly);

/// Largest s such that origin + sigma*direction stays inside for 0 < sigma < s.
/// Infinity if the ray never meets the boundary.
double ray_clearance(const Polyline& boundary, const Vec2& origin, const Vec2& direction,
                     double tolerance = 1e-9);

struct BoundingBox {
  Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Vec2 hi{-std::numeric_limits<double>::max(), -std::numeric_limits<double>::max()};
  void add(const Vec2& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
};
BoundingBox bounding_box(const Polyline& poly);

/// Accelerated point-in-polygon queries against a fixed closed polyline.
class PolygonLocator {
 public:
  explicit PolygonLocator(Polyline boundary, double tolerance = 1e-9, int gridSize = 64);
  Containment contains(const Vec2& p) const;
  double distance(const Vec2& p) const;
  const Polyline& polyline() const { return poly_; }

 private:
  Polyline poly_;
  double tol_;
  BoundingBox box_;
  int n_;
  Vec2 cell_;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace oodp
