// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

/// @file splines.hpp
/// Univariate and tensor-product B-spline spaces.
///
/// Open spaces use a clamped knot vector. Periodic spaces are 1-periodic:
/// the caller supplies the knots of one period in [0,1) (the first of which
/// must be 0) and basis functions that wrap around are identified, so the
/// coefficient vector has exactly one entry per distinct function.

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace oodp {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Nonzero basis functions at one parameter.
struct BasisValues {
  int first = 0;            ///< unwrapped index of the first nonzero function
  Eigen::MatrixXd values;   ///< (derivs+1) x (p+1); row k holds k-th derivatives
};

class SplineSpace {
 public:
  SplineSpace() = default;

  /// Open space from a full clamped knot vector.
  static SplineSpace open(int degree, std::vector<double> knots);
  /// Open space on [a,b] with `spans` uniform spans.
  static SplineSpace uniform_open(int degree, int spans, double a = 0.0, double b = 1.0);
  /// Open space from distinct breakpoints and their interior multiplicities.
  static SplineSpace open_from_breaks(int degree, const std::vector<double>& breaks,
                                      const std::vector<int>& interiorMults);
  /// Periodic space from the knots of one period in [0,1).
  static SplineSpace periodic(int degree, std::vector<double> periodKnots);
  static SplineSpace uniform_periodic(int degree, int spans);

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  bool is_periodic() const { return periodic_; }
  double begin() const;
  double end() const;

  /// Full knot vector; for periodic spaces the periodic extension with p
  /// knots of padding on both sides of one period.
  const std::vector<double>& knots() const { return knots_; }

  /// Distinct breakpoints covering the domain, both ends included.
  std::vector<double> breakpoints() const;
  /// Multiplicity of each entry of breakpoints() (periodic: both ends report
  /// the multiplicity of knot 0).
  std::vector<int> multiplicities() const;

  /// Maps a basis index of the extended numbering to a coefficient index.
  int wrap(int j) const { return periodic_ ? ((j % dim_) + dim_) % dim_ : j; }

  /// Reduces t into the domain. Throws for open spaces when t is outside.
  double reduce(double t) const;

  /// Span index k with knots[k] <= t < knots[k+1]; the domain end maps to the
  /// last nonempty span.
  int find_span(double t) const;

  BasisValues eval(double t, int derivs = 0) const;

  /// Knot averages, one per basis function. Periodic values are wrapped into [0,1).
  std::vector<double> greville() const;

  /// Closed support [a,b] of function i in unwrapped parameter coordinates.
  std::pair<double, double> support(int i) const;

  /// Nonempty knot spans as (a,b) intervals.
  std::vector<std::pair<double, double>> elements() const;

  /// Space of degree `degree` over the same breakpoints, each span split into
  /// `subdivisions` pieces. Existing knots keep the continuity they have in
  /// this space (capped at degree-1); new knots are simple.
  SplineSpace refined(int degree, int subdivisions) const;

  bool operator==(const SplineSpace& o) const {
    return degree_ == o.degree_ && periodic_ == o.periodic_ && knots_ == o.knots_;
  }

  /// Knots of one period (periodic) or the full vector (open), as given.
  const std::vector<double>& defining_knots() const { return defining_; }

 private:
  int degree_ = 0;
  int dim_ = 0;
  bool periodic_ = false;
  std::vector<double> knots_;
  std::vector<double> defining_;
};

/// Spline with coefficients of type `Coef` (double or Vec2).
template <class Coef>
class SplineFunction {
 public:
  SplineFunction() = default;
  SplineFunction(SplineSpace space, std::vector<Coef> coefs);

  const SplineSpace& space() const { return space_; }
  const std::vector<Coef>& coefs() const { return coefs_; }

  Coef eval(double t, int deriv = 0) const;
  /// Values and derivatives up to `derivs`, index k = k-th derivative.
  std::vector<Coef> eval_all(double t, int derivs) const;

 private:
  SplineSpace space_;
  std::vector<Coef> coefs_;
};

using SplineCurve = SplineFunction<Vec2>;
using ScalarSplineFunction = SplineFunction<double>;

extern template class SplineFunction<double>;
extern template class SplineFunction<Vec2>;

/// Tensor-product patch. Control net is stored with the first direction
/// running fastest: net[i + dimU * j].
struct PatchEval {
  Vec2 point;
  Mat2 jacobian;  ///< columns: derivative along first, second parameter
};

class TensorPatch {
 public:
  TensorPatch() = default;
  TensorPatch(SplineSpace u, SplineSpace v, std::vector<Vec2> net);

  const SplineSpace& space_u() const { return u_; }
  const SplineSpace& space_v() const { return v_; }
  const std::vector<Vec2>& net() const { return net_; }
  const Vec2& control(int i, int j) const { return net_[i + u_.dim() * j]; }

  Vec2 eval(double u, double v) const;
  PatchEval eval_jacobian(double u, double v) const;

 private:
  SplineSpace u_, v_;
  std::vector<Vec2> net_;
};

/// Gauss–Legendre rule on [-1,1].
struct GaussRule {
  std::vector<double> nodes, weights;
};
const GaussRule& gauss_legendre(int n);

/// Quadrature points and weights for every piece of `breaks`.
void append_gauss_points(const std::vector<double>& breaks, int pointsPerPiece,
                         std::vector<double>& t, std::vector<double>& w);

/// Sorted union of two breakpoint sets, restricted to [a,b].
std::vector<double> merge_breaks(const std::vector<double>& x, const std::vector<double>& y,
                                 double a, double b);

struct PointConstraint {
  double t;
  Eigen::VectorXd value;
};

struct FitOptions {
  /// Weight of the ||f''||^2 smoothing term (0: plain L2 projection).
  double secondDerivativeWeight = 0.0;
  /// Gauss points per knot span; 0 selects degree+1.
  int pointsPerSpan = 0;
  /// Extra breakpoints for the quadrature (e.g. kinks of the target).
  std::vector<double> extraBreaks;
};

using FitTarget = std::function<Eigen::VectorXd(double)>;

/// Constrained least-squares fit in the L2 norm over the space's domain.
/// Returns dim x components coefficients. Throws Error(Fitting) if the
/// normal equations are singular.
Eigen::MatrixXd fit_l2(const SplineSpace& space, int components, const FitTarget& target,
                       std::span<const PointConstraint> constraints = {},
                       const FitOptions& options = {});

/// Interpolation at the Greville abscissae.
Eigen::MatrixXd interpolate(const SplineSpace& space, int components, const FitTarget& target);

SplineCurve fit_curve(const SplineSpace& space, const std::function<Vec2(double)>& target,
                      std::span<const PointConstraint> constraints = {},
                      const FitOptions& options = {});
SplineCurve interpolate_curve(const SplineSpace& space, const std::function<Vec2(double)>& target);
ScalarSplineFunction fit_scalar(const SplineSpace& space, const std::function<double(double)>& target,
                                const FitOptions& options = {});

/// Restricts an open or periodic curve to [a,b] (b > a, b - a <= 1), returned
/// as an open curve over [0,1] with the affine reparameterization
/// t = a + (b - a) * x. Exact up to round-off.
SplineCurve restrict_curve(const SplineCurve& curve, double a, double b);

/// L2 distance between two parametric functions on [a,b] by quadrature over `breaks`.
double l2_distance(const std::function<Vec2(double)>& f, const std::function<Vec2(double)>& g,
                   const std::vector<double>& breaks, int pointsPerPiece);

}  // namespace oodp
