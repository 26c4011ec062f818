// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

/// @file offset.hpp
/// Generalized inner offsetting C_O = C_B + mu * q.
///
/// mu is a spline minimizing
///   ||mu - mu_target||^2 + alpha ||C_O'||^2 + beta ||C_O''||^2,
/// with mu_target = min(c * mu_max, d). The loop shrinks d (and the
/// regularization weights) until the offset passes every validity gate.

#pragma once

#include "oodp/error.hpp"
#include "oodp/geometry.hpp"
#include "oodp/splines.hpp"

#include <memory>
#include <string>
#include <vector>

namespace oodp {

enum class QuasiNormalKind { CurveNormal, RadialToPoint, SmoothedNormal, PerSegment };

const char* to_string(QuasiNormalKind kind);
QuasiNormalKind quasi_normal_kind_from_string(const std::string& name);

/// q and its first two derivatives at one parameter.
struct QuasiNormalSample {
  Vec2 q = Vec2::Zero();
  Vec2 dq = Vec2::Zero();
  Vec2 ddq = Vec2::Zero();
};

struct QuasiNormalOptions {
  Vec2 center = Vec2::Zero();           ///< RadialToPoint
  double smoothingWeight = 1e-3;        ///< SmoothedNormal: initial ||C_S''||^2 weight
  int smoothingSpans = 0;               ///< SmoothedNormal: spans of C_S space (0: boundary space)
  int maxRetries = 20;                  ///< SmoothedNormal: weaker smoothing per retry
  int samplesPerSpan = 32;              ///< validity sampling density
};

class QuasiNormalField {
 public:
  QuasiNormalField() = default;

  static QuasiNormalField curve_normal(const SplineCurve& boundary);
  static QuasiNormalField radial(const SplineCurve& boundary, const Vec2& center);
  /// Normal of the smoothed curve `smooth`, evaluated at the parameters of `boundary`.
  static QuasiNormalField smoothed(const SplineCurve& boundary, const SplineCurve& smooth,
                                   double weightUsed);
  /// One field per parameter interval [breaks[i], breaks[i+1]).
  static QuasiNormalField per_segment(const SplineCurve& boundary, std::vector<double> breaks,
                                      std::vector<QuasiNormalField> fields);

  QuasiNormalKind kind() const { return kind_; }
  const SplineCurve& boundary() const { return boundary_; }
  const Vec2& center() const { return center_; }
  const SplineCurve& smooth_curve() const { return smooth_; }
  double smoothing_weight() const { return weight_; }

  QuasiNormalSample eval(double t) const;
  Vec2 operator()(double t) const { return eval(t).q; }

 private:
  QuasiNormalKind kind_ = QuasiNormalKind::CurveNormal;
  SplineCurve boundary_;
  SplineCurve smooth_;
  Vec2 center_ = Vec2::Zero();
  double weight_ = 0.0;
  std::vector<double> breaks_;
  std::vector<QuasiNormalField> fields_;
};

/// Inward unit normal of `curve` with derivatives (rotation of the tangent by +90 degrees).
QuasiNormalSample unit_normal(const SplineCurve& curve, double t);

struct QuasiNormalCheck {
  bool valid = true;
  double firstBadParam = 0.0;
  double minDet = 0.0;  ///< min over samples of det(C_B', q) / (|C_B'| |q|)
};

/// Samples det(C_B'(t), q(t)) > 0 on [a,b] (whole domain when a == b).
QuasiNormalCheck check_quasi_normal(const SplineCurve& boundary, const QuasiNormalField& q,
                                    int samplesPerSpan = 32, double a = 0.0, double b = 0.0);

/// Builds and validates a quasi-normal field. Throws Error(QuasiNormal).
QuasiNormalField make_quasi_normal(QuasiNormalKind kind, const SplineCurve& boundary,
                                   const QuasiNormalOptions& options = {});

/// det(C_B', q) / det(q, q') when det(q, q') > 0, otherwise +infinity.
double mu_max(const SplineCurve& boundary, const QuasiNormalField& q, double t);

struct OffsetParams {
  double c = 0.5;
  double d = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.5;
  int maxIterations = 20;
  SplineSpace muSpace = SplineSpace::uniform_periodic(3, 50);
  /// Optional shape of d: the effective bound is d * dProfile(t).
  std::optional<ScalarSplineFunction> dProfile;

  void validate() const;
};

double mu_target(const SplineCurve& boundary, const QuasiNormalField& q, const OffsetParams& params,
                 double t);

/// Assembles the quadratic energy once; each solve only rebuilds the
/// mu_target load vector. Works on the domain of the mu space (periodic or a
/// sub-interval of the boundary parameter range).
class MuSolver {
 public:
  MuSolver(const SplineCurve& boundary, const QuasiNormalField& q, SplineSpace muSpace);

  ScalarSplineFunction solve(const std::function<double(double)>& target, double alpha, double beta) const;

  /// Quadrature values of the three energy terms for a given mu.
  struct Energy {
    double fit = 0.0, first = 0.0, second = 0.0;
  };
  Energy energy(const ScalarSplineFunction& mu, const std::function<double(double)>& target) const;

  const SplineSpace& space() const { return space_; }

 private:
  struct Point {
    double t, w;
    int first;
    Eigen::VectorXd N, dN, ddN;
    QuasiNormalSample q;
    Vec2 dC, ddC;
  };
  SplineSpace space_;
  std::vector<Point> pts_;
  Eigen::MatrixXd mass_, k1_, k2_;
  Eigen::VectorXd r1_, r2_;
};

/// Offset curve C_B + mu q as a function.
Vec2 offset_point(const SplineCurve& boundary, const QuasiNormalField& q, const ScalarSplineFunction& mu,
                  double t);

struct ValidityReport {
  bool regular = false;    ///< 0 < mu < mu_max at all samples
  bool simple = false;     ///< offset polyline has no self-intersections
  bool inside = false;     ///< offset strictly inside the boundary
  bool ccw = false;        ///< offset counter-clockwise (always true for open segments)
  double firstIrregularParam = 0.0;
  std::optional<Crossing> crossing;
  double minMargin = 0.0;  ///< min over samples of mu_max - mu (inf when unbounded)
  bool valid() const { return regular && simple && inside && ccw; }
  std::string failed_gates() const;
};

/// Gate checks for mu over the domain of mu's space. `domain` is the closed
/// boundary polyline of Omega.
ValidityReport check_validity(const SplineCurve& boundary, const QuasiNormalField& q,
                              const ScalarSplineFunction& mu, const Polyline& domain,
                              const SamplingConfig& config = {});

struct OffsetIteration {
  int iteration = 0;
  double d = 0.0, alpha = 0.0, beta = 0.0;
  ValidityReport report;
};

struct OffsetResult {
  ScalarSplineFunction mu;
  bool valid = false;
  int iterationsUsed = 0;
  OffsetParams finalParams;
  ValidityReport diagnostics;
  std::vector<OffsetIteration> log;
};

/// Thrown when the loop runs out of iterations.
class OffsetFailure : public Error {
 public:
  OffsetFailure(const std::string& what, std::vector<OffsetIteration> log)
      : Error(ErrorCode::Offset, what), log_(std::move(log)) {}
  const std::vector<OffsetIteration>& log() const { return log_; }

 private:
  std::vector<OffsetIteration> log_;
};

/// Runs the shrink loop. The domain polyline defaults to a sampling of the boundary.
OffsetResult generalized_offset(const SplineCurve& boundary, const QuasiNormalField& q,
                                const OffsetParams& params, const SamplingConfig& config = {},
                                const Polyline* domain = nullptr);

/// Smallest sampled ray clearance d_max(t) along q (an upper bound for d).
double min_ray_clearance(const SplineCurve& boundary, const QuasiNormalField& q, const Polyline& domain,
                         int samples);

}  // namespace oodp
