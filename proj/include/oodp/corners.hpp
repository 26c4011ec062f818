// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

/// @file corners.hpp
/// Rings for boundaries with corners: one offset per smooth segment, corner
/// patches in between, all glued C0 into a ring-shaped multipatch manifold.

#pragma once

#include "oodp/offset.hpp"
#include "oodp/ring.hpp"

#include <array>

namespace oodp {

struct Corner {
  double t = 0.0;
  bool convex = true;
  double delta = 0.0;  ///< trim length on both sides of the corner
  Vec2 tangentIn = Vec2::Zero(), tangentOut = Vec2::Zero();
  double angle = 0.0;  ///< turning angle in radians, positive when convex
};

struct CornerList {
  std::vector<Corner> corners;
  bool empty() const { return corners.empty(); }
  std::size_t size() const { return corners.size(); }
};

/// Corners are knots of multiplicity >= p whose one-sided tangents differ in
/// direction by more than `angleTolerance`. Throws Error(Corner) on cusps.
CornerList detect_corners(const SplineCurve& boundary, double angleTolerance = 1e-6);

struct Interval {
  double a = 0.0, b = 0.0;
};

/// Parameter interval of each segment, trimmed by delta at convex ends.
/// Segment i runs from corner i to corner i+1 (the last one wraps past 1).
std::vector<Interval> segment_intervals(const CornerList& corners);

/// Reverses the parameterization of an open curve.
SplineCurve reversed_curve(const SplineCurve& curve);

/// Straight segment from a to b in the given open space.
SplineCurve line_in_space(const SplineSpace& space, const Vec2& a, const Vec2& b);

/// Bilinearly blended Coons patch. bottom/top share the u space, left/right
/// the v space. Throws Error(Corner) if the edge endpoints disagree.
TensorPatch coons_patch(const SplineCurve& bottom, const SplineCurve& top, const SplineCurve& left,
                        const SplineCurve& right);

/// Coons patch of a convex corner at t with P(u,0) = C_B(t - u delta),
/// P(0,v) = C_B(t + v delta), P(u,1) the ruling from C_B(t + delta) to
/// innerNext and P(1,v) the ruling from C_B(t - delta) to innerPrev.
TensorPatch coons_corner_patch(const SplineCurve& boundary, double t, double delta, const Vec2& innerPrev,
                               const Vec2& innerNext);

/// P(u,v) = corner + u a + v b. Throws Error(Corner) if a and b are nearly parallel.
TensorPatch parallelogram_corner_patch(const Vec2& corner, const Vec2& a, const Vec2& b);

enum class EdgeRole { Dirichlet, Coupling, Glued, Periodic };
enum class PatchKind { Ring, Segment, Coons, Parallelogram };

const char* to_string(EdgeRole role);
const char* to_string(PatchKind kind);
EdgeRole edge_role_from_string(const std::string& name);
PatchKind patch_kind_from_string(const std::string& name);

/// Edge ids: 0 u=min, 1 u=max, 2 v=min, 3 v=max. Edges 0/1 run along v,
/// edges 2/3 along u.
struct ManifoldPatch {
  TensorPatch patch;
  PatchKind kind = PatchKind::Ring;
  std::array<EdgeRole, 4> roles{EdgeRole::Periodic, EdgeRole::Periodic, EdgeRole::Dirichlet, EdgeRole::Coupling};
};

struct Interface {
  int patchA = 0, edgeA = 0, patchB = 0, edgeB = 0;
  bool reversed = false;
};

/// Point of a patch edge at edge parameter x in [0,1].
Vec2 edge_point(const TensorPatch& patch, int edge, double x);

struct RingManifold {
  std::vector<ManifoldPatch> patches;
  std::vector<Interface> interfaces;

  /// Max pointwise mismatch over glued edges.
  double interface_residue(int samplesPerEdge = 100) const;
  /// Closed polyline of the coupling edges in order (the inner boundary).
  Polyline inner_boundary(int samplesPerEdge = 64) const;
  /// Sampled Jacobian checks on every patch.
  std::vector<RingValidation> validate(int grid = 64) const;
};

/// The single periodic patch of a smooth ring.
RingManifold manifold_from_ring(const RingPatch& ring);

struct SegmentOffset {
  Interval interval;          ///< X_i^F in boundary parameters
  SplineCurve curve;          ///< C_B on [t_i, t_{i+1}] over [0,1]
  QuasiNormalField q;         ///< on `curve`
  OffsetResult offset;        ///< mu on the local image of X_i^F
  SplineCurve inner;          ///< C_I over [0,1] on X_i^F
};

struct RingOptions {
  QuasiNormalKind quasiNormal = QuasiNormalKind::CurveNormal;
  QuasiNormalOptions quasiNormalOptions;
  OffsetParams offset;
  SamplingConfig sampling;
  int validationGrid = 64;
};

struct CornerRing {
  RingManifold manifold;
  CornerList corners;
  std::vector<SegmentOffset> segments;
  std::optional<RingPatch> smooth;  ///< set when there are no corners
  std::optional<OffsetResult> smoothOffset;
  std::optional<QuasiNormalField> smoothQuasiNormal;
};

/// Runs the offsetting per segment, builds corner patches and checks the
/// gluing, orientation and simplicity of the inner boundary. Errors carry the
/// failing segment or corner index.
CornerRing build_ring_manifold(const SplineCurve& boundary, const CornerList& corners, const RingOptions& options);

}  // namespace oodp
