// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/ring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace oodp {

Ftilde::Ftilde(SplineCurve boundary, QuasiNormalField q, ScalarSplineFunction mu)
    : boundary_(std::move(boundary)), q_(std::move(q)), mu_(std::move(mu)) {}

Vec2 Ftilde::eval(double s, double t) const { return boundary_.eval(t) + s * mu_.eval(t) * q_(t); }

Vec2 Ftilde::d_s(double /*s*/, double t) const { return mu_.eval(t) * q_(t); }

Vec2 Ftilde::d_t(double s, double t) const {
  const auto m = mu_.eval_all(t, 1);
  const auto qs = q_.eval(t);
  return boundary_.eval(t, 1) + s * (m[1] * qs.q + m[0] * qs.dq);
}

double Ftilde::jacobian_det(double s, double t) const {
  const double m = mu_.eval(t);
  const auto qs = q_.eval(t);
  return m * cross(qs.q, boundary_.eval(t, 1)) + s * m * m * cross(qs.q, qs.dq);
}

RingValidation validate_patch(const TensorPatch& patch, int grid) {
  const auto& U = patch.space_u();
  const auto& V = patch.space_v();
  RingValidation r;
  r.minDet = std::numeric_limits<double>::infinity();
  r.maxDet = -r.minDet;
  for (int i = 0; i < grid; ++i) {
    const double u = U.begin() + (U.end() - U.begin()) * (i + 0.5) / grid;
    for (int j = 0; j < grid; ++j) {
      const double v = V.begin() + (V.end() - V.begin()) * (j + 0.5) / grid;
      const double det = patch.eval_jacobian(u, v).jacobian.determinant();
      r.minDet = std::min(r.minDet, det);
      r.maxDet = std::max(r.maxDet, det);
    }
  }
  r.singleSigned = r.minDet > 0.0 || r.maxDet < 0.0;
  r.minAbsDet = r.singleSigned ? std::min(std::abs(r.minDet), std::abs(r.maxDet)) : 0.0;
  return r;
}

RingPatch::RingPatch(SplineCurve boundary, SplineCurve inner) : boundary_(std::move(boundary)), inner_(std::move(inner)) {
  if (!(boundary_.space() == inner_.space()))
    throw Error(ErrorCode::RingFit, "inner and boundary curves must share one spline space");
  const int n = boundary_.space().dim();
  std::vector<Vec2> net(2 * n);
  for (int j = 0; j < n; ++j) {
    net[j] = boundary_.coefs()[j];
    net[j + n] = inner_.coefs()[j];
  }
  patch_ = TensorPatch(boundary_.space(), SplineSpace::uniform_open(1, 1), std::move(net));
}

RingPatch fit_ring(const Ftilde& ftilde, int grid) {
  const auto& CB = ftilde.boundary();
  const auto& S = CB.space();
  FitOptions fo;
  fo.pointsPerSpan = S.degree() + 4;
  fo.extraBreaks = ftilde.mu().space().breakpoints();
  const auto inner = fit_curve(S, [&](double t) { return ftilde.offset(t); }, {}, fo);

  RingPatch ring(CB, inner);
  const auto breaks = merge_breaks(S.breakpoints(), fo.extraBreaks, S.begin(), S.end());
  ring.fitError_ = l2_distance([&](double t) { return inner.eval(t); }, [&](double t) { return ftilde.offset(t); },
                               breaks, S.degree() + 4);

  BoundingBox box;
  for (const auto& c : CB.coefs()) box.add(c);
  const double scale = (box.hi - box.lo).norm();
  const auto v = validate_patch(ring.patch_, grid);
  if (!v.singleSigned || v.minAbsDet < 1e-10 * scale * scale) {
    std::ostringstream os;
    os << "fitted ring is not regular (det range [" << v.minDet << ", " << v.maxDet
       << "], fitting error " << ring.fitError_ << "); refine the boundary's spline space";
    throw Error(ErrorCode::RingFit, os.str());
  }
  ring.margin_ = v.minAbsDet;
  return ring;
}

}  // namespace oodp
