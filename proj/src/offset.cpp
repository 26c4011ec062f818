// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/offset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace oodp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

/// Breakpoints of `curve` inside [a,b], with periodic copies.
std::vector<double> curve_breaks(const SplineCurve& curve, double a, double b) {
  std::vector<double> out;
  const auto br = curve.space().breakpoints();
  if (curve.space().is_periodic()) {
    for (int s = static_cast<int>(std::floor(a)) - 1; s <= static_cast<int>(std::ceil(b)) + 1; ++s)
      for (double x : br) out.push_back(x + s);
  } else {
    out = br;
  }
  return out;
}
}  // namespace

const char* to_string(QuasiNormalKind kind) {
  switch (kind) {
    case QuasiNormalKind::CurveNormal: return "curveNormal";
    case QuasiNormalKind::RadialToPoint: return "radialToPoint";
    case QuasiNormalKind::SmoothedNormal: return "smoothedNormal";
    case QuasiNormalKind::PerSegment: return "perSegment";
  }
  return "unknown";
}

QuasiNormalKind quasi_normal_kind_from_string(const std::string& name) {
  for (auto k : {QuasiNormalKind::CurveNormal, QuasiNormalKind::RadialToPoint, QuasiNormalKind::SmoothedNormal,
                 QuasiNormalKind::PerSegment})
    if (name == to_string(k)) return k;
  throw Error(ErrorCode::InvalidInput, "unknown quasi-normal kind '" + name + "'");
}

QuasiNormalSample unit_normal(const SplineCurve& curve, double t) {
  const auto c = curve.eval_all(t, 3);
  const Vec2 r = rot90(c[1]), dr = rot90(c[2]), ddr = rot90(c[3]);
  const double rho = r.norm();
  const double drho = r.dot(dr) / rho;
  const double ddrho = (dr.dot(dr) + r.dot(ddr)) / rho - drho * drho / rho;
  QuasiNormalSample s;
  s.q = r / rho;
  s.dq = dr / rho - r * drho / (rho * rho);
  s.ddq = ddr / rho - 2.0 * dr * drho / (rho * rho) - r * ddrho / (rho * rho) +
          2.0 * r * drho * drho / (rho * rho * rho);
  return s;
}

QuasiNormalField QuasiNormalField::curve_normal(const SplineCurve& boundary) {
  QuasiNormalField f;
  f.kind_ = QuasiNormalKind::CurveNormal;
  f.boundary_ = boundary;
  return f;
}

QuasiNormalField QuasiNormalField::radial(const SplineCurve& boundary, const Vec2& center) {
  QuasiNormalField f;
  f.kind_ = QuasiNormalKind::RadialToPoint;
  f.boundary_ = boundary;
  f.center_ = center;
  return f;
}

QuasiNormalField QuasiNormalField::smoothed(const SplineCurve& boundary, const SplineCurve& smooth,
                                            double weightUsed) {
  QuasiNormalField f;
  f.kind_ = QuasiNormalKind::SmoothedNormal;
  f.boundary_ = boundary;
  f.smooth_ = smooth;
  f.weight_ = weightUsed;
  return f;
}

QuasiNormalField QuasiNormalField::per_segment(const SplineCurve& boundary, std::vector<double> breaks,
                                               std::vector<QuasiNormalField> fields) {
  if (fields.empty() || breaks.size() != fields.size() + 1)
    throw Error(ErrorCode::InvalidInput, "per-segment quasi-normal needs one field per interval");
  QuasiNormalField f;
  f.kind_ = QuasiNormalKind::PerSegment;
  f.boundary_ = boundary;
  f.breaks_ = std::move(breaks);
  f.fields_ = std::move(fields);
  return f;
}

QuasiNormalSample QuasiNormalField::eval(double t) const {
  switch (kind_) {
    case QuasiNormalKind::CurveNormal:
      return unit_normal(boundary_, t);
    case QuasiNormalKind::SmoothedNormal:
      return unit_normal(smooth_, t);
    case QuasiNormalKind::RadialToPoint: {
      const auto c = boundary_.eval_all(t, 2);
      return {center_ - c[0], -c[1], -c[2]};
    }
    case QuasiNormalKind::PerSegment: {
      double x = t;
      const double a = breaks_.front(), b = breaks_.back();
      if (boundary_.space().is_periodic()) x = a + (x - a) - std::floor((x - a) / (b - a)) * (b - a);
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
      std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - breaks_.begin()), 1, fields_.size()) - 1;
      return fields_[i].eval(t);
    }
  }
  return {};
}

QuasiNormalCheck check_quasi_normal(const SplineCurve& boundary, const QuasiNormalField& q, int samplesPerSpan,
                                    double a, double b) {
  if (a == b) {
    a = boundary.space().begin();
    b = boundary.space().end();
  }
  const auto breaks = merge_breaks(curve_breaks(boundary, a, b), {}, a, b);
  QuasiNormalCheck r;
  r.minDet = kInf;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    for (int k = 0; k < samplesPerSpan; ++k) {
      const double t = breaks[i] + (breaks[i + 1] - breaks[i]) * (k + 0.5) / samplesPerSpan;
      const Vec2 d = boundary.eval(t, 1);
      const Vec2 qq = q(t);
      const double det = cross(d, qq) / (d.norm() * qq.norm());
      if (!(det > 0.0) && r.valid) {
        r.valid = false;
        r.firstBadParam = t;
      }
      r.minDet = std::min(r.minDet, det);
    }
  }
  return r;
}

QuasiNormalField make_quasi_normal(QuasiNormalKind kind, const SplineCurve& boundary,
                                   const QuasiNormalOptions& options) {
  auto fail = [](const QuasiNormalCheck& c, const std::string& what) {
    std::ostringstream os;
    os << what << ": det(C_B', q) <= 0 first at t = " << c.firstBadParam;
    throw Error(ErrorCode::QuasiNormal, os.str());
  };
  switch (kind) {
    case QuasiNormalKind::CurveNormal:
    case QuasiNormalKind::RadialToPoint: {
      auto f = kind == QuasiNormalKind::CurveNormal ? QuasiNormalField::curve_normal(boundary)
                                                    : QuasiNormalField::radial(boundary, options.center);
      const auto c = check_quasi_normal(boundary, f, options.samplesPerSpan);
      if (!c.valid) fail(c, std::string(to_string(kind)) + " is not a valid quasi-normal");
      return f;
    }
    case QuasiNormalKind::SmoothedNormal: {
      const SplineSpace space =
          options.smoothingSpans > 0
              ? SplineSpace::uniform_periodic(std::max(3, boundary.space().degree()), options.smoothingSpans)
              : boundary.space();
      double w = options.smoothingWeight;
      QuasiNormalCheck last;
      for (int attempt = 0; attempt <= options.maxRetries; ++attempt, w /= 10.0) {
        FitOptions fo;
        fo.secondDerivativeWeight = w;
        fo.pointsPerSpan = space.degree() + 3;
        fo.extraBreaks = boundary.space().breakpoints();
        const auto smooth = fit_curve(space, [&](double t) { return boundary.eval(t); }, {}, fo);
        auto f = QuasiNormalField::smoothed(boundary, smooth, w);
        last = check_quasi_normal(boundary, f, options.samplesPerSpan);
        if (last.valid) return f;
      }
      fail(last, "no smoothed normal is a valid quasi-normal");
      break;
    }
    case QuasiNormalKind::PerSegment:
      throw Error(ErrorCode::InvalidInput, "per-segment fields are assembled by the corner treatment");
  }
  return {};
}

double mu_max(const SplineCurve& boundary, const QuasiNormalField& q, double t) {
  const auto s = q.eval(t);
  const double denom = cross(s.q, s.dq);
  if (!(denom > 0.0)) return kInf;
  return cross(boundary.eval(t, 1), s.q) / denom;
}

void OffsetParams::validate() const {
  auto bad = [](const std::string& w) { throw Error(ErrorCode::InvalidInput, "offset parameter " + w); };
  if (!(c > 0.0 && c < 1.0)) bad("c must lie in (0,1)");
  if (!(d > 0.0)) bad("d must be positive");
  if (!(alpha >= 0.0)) bad("alpha must be >= 0");
  if (!(beta >= 0.0)) bad("beta must be >= 0");
  if (!(lambda > 0.0 && lambda < 1.0)) bad("lambda must lie in (0,1)");
  if (maxIterations < 1) bad("maxIterations must be >= 1");
}

double mu_target(const SplineCurve& boundary, const QuasiNormalField& q, const OffsetParams& params, double t) {
  const double d = params.dProfile ? params.d * params.dProfile->eval(t) : params.d;
  return std::min(params.c * mu_max(boundary, q, t), d);
}

// ---------------------------------------------------------------------------

MuSolver::MuSolver(const SplineCurve& boundary, const QuasiNormalField& q, SplineSpace muSpace)
    : space_(std::move(muSpace)) {
  const int n = space_.dim(), p = space_.degree();
  const double a = space_.begin(), b = space_.end();
  const auto breaks = merge_breaks(space_.breakpoints(), curve_breaks(boundary, a, b), a, b);
  std::vector<double> qt, qw;
  append_gauss_points(breaks, p + 3, qt, qw);
  mass_ = k1_ = k2_ = Eigen::MatrixXd::Zero(n, n);
  r1_ = r2_ = Eigen::VectorXd::Zero(n);
  pts_.reserve(qt.size());
  for (std::size_t i = 0; i < qt.size(); ++i) {
    const auto bv = space_.eval(qt[i], 2);
    const auto c = boundary.eval_all(qt[i], 2);
    Point pt{qt[i], qw[i], bv.first, bv.values.row(0).transpose(), bv.values.row(1).transpose(),
             bv.values.row(2).transpose(), q.eval(qt[i]), c[1], c[2]};
    std::vector<Vec2> first(p + 1), second(p + 1);
    for (int k = 0; k <= p; ++k) {
      first[k] = pt.dN[k] * pt.q.q + pt.N[k] * pt.q.dq;
      second[k] = pt.ddN[k] * pt.q.q + 2.0 * pt.dN[k] * pt.q.dq + pt.N[k] * pt.q.ddq;
    }
    for (int k = 0; k <= p; ++k) {
      const int ik = space_.wrap(pt.first + k);
      r1_[ik] += pt.w * first[k].dot(pt.dC);
      r2_[ik] += pt.w * second[k].dot(pt.ddC);
      for (int l = 0; l <= p; ++l) {
        const int il = space_.wrap(pt.first + l);
        mass_(ik, il) += pt.w * pt.N[k] * pt.N[l];
        k1_(ik, il) += pt.w * first[k].dot(first[l]);
        k2_(ik, il) += pt.w * second[k].dot(second[l]);
      }
    }
    pts_.push_back(std::move(pt));
  }
}

ScalarSplineFunction MuSolver::solve(const std::function<double(double)>& target, double alpha,
                                     double beta) const {
  const int n = space_.dim(), p = space_.degree();
  Eigen::VectorXd rhs = -alpha * r1_ - beta * r2_;
  for (const auto& pt : pts_) {
    const double f = target(pt.t);
    for (int k = 0; k <= p; ++k) rhs[space_.wrap(pt.first + k)] += pt.w * f * pt.N[k];
  }
  const Eigen::MatrixXd A = mass_ + alpha * k1_ + beta * k2_;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::Offset, "offset energy system is not positive definite");
  const Eigen::VectorXd c = llt.solve(rhs);
  return ScalarSplineFunction(space_, std::vector<double>(c.data(), c.data() + n));
}

MuSolver::Energy MuSolver::energy(const ScalarSplineFunction& mu, const std::function<double(double)>& target) const {
  Energy e;
  for (const auto& pt : pts_) {
    const auto m = mu.eval_all(pt.t, 2);
    const Vec2 d1 = pt.dC + m[1] * pt.q.q + m[0] * pt.q.dq;
    const Vec2 d2 = pt.ddC + m[2] * pt.q.q + 2.0 * m[1] * pt.q.dq + m[0] * pt.q.ddq;
    const double r = m[0] - target(pt.t);
    e.fit += pt.w * r * r;
    e.first += pt.w * d1.squaredNorm();
    e.second += pt.w * d2.squaredNorm();
  }
  return e;
}

Vec2 offset_point(const SplineCurve& boundary, const QuasiNormalField& q, const ScalarSplineFunction& mu, double t) {
  return boundary.eval(t) + mu.eval(t) * q(t);
}

std::string ValidityReport::failed_gates() const {
  std::string s;
  auto add = [&](bool ok, const char* name) {
    if (!ok) s += (s.empty() ? "" : ",") + std::string(name);
  };
  add(regular, "regularity");
  add(simple, "simplicity");
  add(inside, "containment");
  add(ccw, "orientation");
  return s.empty() ? "none" : s;
}

ValidityReport check_validity(const SplineCurve& boundary, const QuasiNormalField& q, const ScalarSplineFunction& mu,
                              const Polyline& domain, const SamplingConfig& config) {
  ValidityReport r;
  const auto& S = mu.space();
  const double a = S.begin(), b = S.end();

  // (a) 0 < mu < mu_max on 32 samples per span of the mu space
  r.regular = true;
  r.minMargin = kInf;
  for (const auto& [e0, e1] : S.elements()) {
    for (int k = 0; k < 32; ++k) {
      const double t = e0 + (e1 - e0) * (k + 0.5) / 32.0;
      const double m = mu.eval(t);
      const double mm = mu_max(boundary, q, t);
      const bool ok = m > 0.0 && m < mm;
      if (std::isfinite(mm)) r.minMargin = std::min(r.minMargin, mm - m);
      if (!(m > 0.0)) r.minMargin = std::min(r.minMargin, m);
      if (!ok && r.regular) {
        r.regular = false;
        r.firstIrregularParam = t;
      }
    }
  }

  const auto breaks = merge_breaks(S.breakpoints(), curve_breaks(boundary, a, b), a, b);
  const Polyline poly = sample_function([&](double t) { return offset_point(boundary, q, mu, t); }, breaks,
                                        config.samplesPerSpan, S.is_periodic());
  // (b)
  const auto simple = is_simple(poly, config.geometricTolerance);
  r.simple = simple.simple;
  r.crossing = simple.witness;
  // (c)
  const PolygonLocator loc(domain, config.geometricTolerance);
  r.inside = std::all_of(poly.vertices.begin(), poly.vertices.end(),
                         [&](const Vec2& v) { return loc.contains(v) == Containment::Inside; });
  // (d)
  r.ccw = S.is_periodic() ? signed_area(poly) > 0.0 : true;
  return r;
}

double min_ray_clearance(const SplineCurve& boundary, const QuasiNormalField& q, const Polyline& domain, int samples) {
  double m = kInf;
  const double a = boundary.space().begin(), b = boundary.space().end();
  for (int k = 0; k < samples; ++k) {
    const double t = a + (b - a) * (k + 0.5) / samples;
    m = std::min(m, ray_clearance(domain, boundary.eval(t), q(t)));
  }
  return m;
}

OffsetResult generalized_offset(const SplineCurve& boundary, const QuasiNormalField& q, const OffsetParams& params,
                                const SamplingConfig& config, const Polyline* domain) {
  params.validate();
  const auto& S = params.muSpace;
  const auto qc = check_quasi_normal(boundary, q, 32, S.begin(), S.end());
  if (!qc.valid) {
    std::ostringstream os;
    os << "quasi-normal is tangential or outward at t = " << qc.firstBadParam;
    throw Error(ErrorCode::QuasiNormal, os.str());
  }
  Polyline own;
  if (!domain) {
    own = sample_curve(boundary, config);
    domain = &own;
  }

  const MuSolver solver(boundary, q, S);
  OffsetParams cur = params;
  std::vector<OffsetIteration> log;
  for (int k = 1; k <= params.maxIterations; ++k) {
    const auto mu = solver.solve([&](double t) { return mu_target(boundary, q, cur, t); }, cur.alpha, cur.beta);
    const auto rep = check_validity(boundary, q, mu, *domain, config);
    log.push_back({k, cur.d, cur.alpha, cur.beta, rep});
    if (rep.valid()) {
      OffsetResult res;
      res.mu = mu;
      res.valid = true;
      res.iterationsUsed = k;
      res.finalParams = cur;
      res.diagnostics = rep;
      res.log = std::move(log);
      return res;
    }
    // alternate: odd iterations shrink d, even ones the regularizers
    const bool regularized = cur.alpha > 0.0 || cur.beta > 0.0;
    if (!regularized || k % 2 == 1) {
      cur.d *= cur.lambda;
    } else {
      cur.alpha /= 10.0;
      cur.beta /= 10.0;
    }
  }
  std::ostringstream os;
  os << "offset loop exhausted " << params.maxIterations << " iterations; last failed gates: "
     << log.back().report.failed_gates() << " (consider refining the mu space)";
  throw OffsetFailure(os.str(), std::move(log));
}

}  // namespace oodp
