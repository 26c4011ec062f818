// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

/// @file ring.hpp
/// Ring-shaped patch between the boundary C_B and the inner curve C_I.

#pragma once

#include "oodp/offset.hpp"

namespace oodp {

/// F~(s,t) = C_B(t) + s mu(t) q(t), the exact ruled surface to the offset.
class Ftilde {
 public:
  Ftilde(SplineCurve boundary, QuasiNormalField q, ScalarSplineFunction mu);

  Vec2 eval(double s, double t) const;
  Vec2 d_s(double s, double t) const;
  Vec2 d_t(double s, double t) const;
  /// det(dF~/ds, dF~/dt) = mu det(q, C_B') + s mu^2 det(q, q').
  double jacobian_det(double s, double t) const;

  const SplineCurve& boundary() const { return boundary_; }
  const QuasiNormalField& quasi_normal() const { return q_; }
  const ScalarSplineFunction& mu() const { return mu_; }
  Vec2 offset(double t) const { return eval(1.0, t); }

 private:
  SplineCurve boundary_;
  QuasiNormalField q_;
  ScalarSplineFunction mu_;
};

struct RingValidation {
  bool singleSigned = false;
  double minAbsDet = 0.0;  ///< c0
  double minDet = 0.0, maxDet = 0.0;
};

/// Samples det(F_t, F_s) at the centers of a grid x grid lattice.
RingValidation validate_patch(const TensorPatch& patch, int grid);

/// F over (t, s): the u direction follows C_B's space, v is linear in s.
class RingPatch {
 public:
  RingPatch() = default;
  RingPatch(SplineCurve boundary, SplineCurve inner);

  const SplineCurve& boundary_curve() const { return boundary_; }
  const SplineCurve& inner_curve() const { return inner_; }
  const TensorPatch& patch() const { return patch_; }

  /// F(s, t) in construction order.
  Vec2 eval(double s, double t) const { return patch_.eval(t, s); }

  /// Regularity margin c0 from the last validation.
  double margin() const { return margin_; }
  double fitting_error() const { return fitError_; }

 private:
  friend RingPatch fit_ring(const Ftilde&, int);
  SplineCurve boundary_, inner_;
  TensorPatch patch_;
  double margin_ = 0.0;
  double fitError_ = 0.0;
};

/// Fits C_I to C_O in C_B's space and validates det grad F on a grid x grid
/// lattice. Throws Error(RingFit) if the sign changes or the margin is below
/// 1e-10 * scale^2.
RingPatch fit_ring(const Ftilde& ftilde, int grid = 64);

/// Solver view G^R(t, s) = F(s, t) with t periodic and s in [0,1].
class RingGeometryMap {
 public:
  explicit RingGeometryMap(const RingPatch& ring) : patch_(ring.patch()) {}
  Vec2 eval(double t, double s) const { return patch_.eval(t, s); }
  /// Columns d/dt, d/ds.
  Mat2 jacobian(double t, double s) const { return patch_.eval_jacobian(t, s).jacobian; }

 private:
  TensorPatch patch_;
};

}  // namespace oodp
