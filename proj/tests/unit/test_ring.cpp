// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/presets.hpp"
#include "oodp/ring.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace oodp {
namespace {

Ftilde preset_ftilde(const std::string& name) {
  const auto p = make_preset(name);
  auto q = make_quasi_normal(p.quasiNormal, p.boundary, p.quasiNormalOptions);
  const auto res = generalized_offset(p.boundary, q, p.offset);
  return Ftilde(p.boundary, q, res.mu);
}

Ftilde constant_offset(const SplineCurve& c, QuasiNormalKind kind, double mu) {
  auto q = make_quasi_normal(kind, c);
  const auto space = SplineSpace::uniform_periodic(3, 8);
  return Ftilde(c, q, ScalarSplineFunction(space, std::vector<double>(space.dim(), mu)));
}

TEST(Ftilde, EdgeRows) {
  const auto f = preset_ftilde("peanut");
  for (double t = 0.0; t < 1.0; t += 0.019) {
    EXPECT_LT((f.eval(0.0, t) - f.boundary().eval(t)).norm(), 1e-15);
    EXPECT_LT((f.eval(1.0, t) - offset_point(f.boundary(), f.quasi_normal(), f.mu(), t)).norm(), 1e-14);
  }
}

TEST(Ftilde, DerivativesMatchFiniteDifference) {
  const auto f = preset_ftilde("star");
  const double h = 1e-6;
  for (double t = 0.013; t < 1.0; t += 0.07)
    for (double s : {0.1, 0.5, 0.9}) {
      const Vec2 ds = (f.eval(s + h, t) - f.eval(s - h, t)) / (2 * h);
      const Vec2 dt = (f.eval(s, t + h) - f.eval(s, t - h)) / (2 * h);
      EXPECT_LT((f.d_s(s, t) - ds).norm(), 1e-6 * ds.norm());
      EXPECT_LT((f.d_s(s, t) - f.mu().eval(t) * f.quasi_normal()(t)).norm(), 1e-14);
      EXPECT_LT((f.d_t(s, t) - dt).norm(), 1e-6 * dt.norm());
      EXPECT_NEAR(f.jacobian_det(s, t), cross(f.d_s(s, t), f.d_t(s, t)), 1e-9 * dt.norm() * ds.norm());
    }
}

TEST(FitRing, ExactWhenOffsetIsInSpace) {
  const auto c = ellipse_curve(1.5, 1.0, 3, 16);
  const auto ring = fit_ring(constant_offset(c, QuasiNormalKind::RadialToPoint, 0.4));
  EXPECT_LT(ring.fitting_error(), 1e-13);
  for (std::size_t i = 0; i < c.coefs().size(); ++i)
    EXPECT_LT((ring.inner_curve().coefs()[i] - 0.6 * c.coefs()[i]).norm(), 1e-13);
}

TEST(FitRing, FittingErrorConvergesAtOrderFour) {
  std::vector<double> err;
  const auto space = SplineSpace::uniform_periodic(3, 8);
  const auto mu = fit_scalar(space, [](double t) { return 0.4 + 0.1 * std::sin(2 * M_PI * t); });
  for (int n : {32, 64, 128, 256}) {
    const auto c = ellipse_curve(1.0, 1.0, 3, n);
    err.push_back(fit_ring(Ftilde(c, make_quasi_normal(QuasiNormalKind::RadialToPoint, c), mu)).fitting_error());
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(std::log2(err[i - 1] / err[i]), 4.0, 0.3) << i;
}

TEST(FitRing, PeanutJacobianSingleSigned) {
  const auto ring = fit_ring(preset_ftilde("peanut"));
  const auto v = validate_patch(ring.patch(), 64);
  EXPECT_TRUE(v.singleSigned);
  EXPECT_GT(v.minAbsDet, 0.0);
}

TEST(FitRing, RejectsFoldedOffset) {
  const auto c = ellipse_curve(1.0, 1.0, 3, 16);
  try {
    fit_ring(constant_offset(c, QuasiNormalKind::CurveNormal, 1.5));
    FAIL() << "expected a ring fit error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RingFit);
  }
}

TEST(RingMap, JacobianMatchesFiniteDifference) {
  const RingGeometryMap map(fit_ring(preset_ftilde("drop")));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const double t = U(rng), s = 0.01 + 0.98 * U(rng);
    const Mat2 J = map.jacobian(t, s);
    const Vec2 dt = (map.eval(t + h, s) - map.eval(t - h, s)) / (2 * h);
    const Vec2 ds = (map.eval(t, s + h) - map.eval(t, s - h)) / (2 * h);
    EXPECT_LT((J.col(0) - dt).norm(), 1e-6 * (1 + dt.norm()));
    EXPECT_LT((J.col(1) - ds).norm(), 1e-6 * (1 + ds.norm()));
  }
}

TEST(RingMap, BoundaryEdgeAndPeriodicity) {
  const auto ring = fit_ring(preset_ftilde("star"));
  const RingGeometryMap map(ring);
  for (double t = 0.0; t < 1.0; t += 0.011) {
    EXPECT_LT((map.eval(t, 0.0) - ring.boundary_curve().eval(t)).norm(), 1e-12);
    EXPECT_LT((map.eval(t, 0.3) - map.eval(t + 1.0, 0.3)).norm(), 1e-14);
    EXPECT_LT((map.eval(t, 1.0) - ring.inner_curve().eval(t)).norm(), 1e-12);
  }
}

}  // namespace
}  // namespace oodp
