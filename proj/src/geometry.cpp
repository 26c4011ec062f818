// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oodp {

Polyline Polyline::reversed() const {
  Polyline r = *this;
  std::reverse(r.vertices.begin(), r.vertices.end());
  std::reverse(r.params.begin(), r.params.end());
  return r;
}

Polyline sample_function(const std::function<Vec2(double)>& f, const std::vector<double>& breaks,
                         int perPiece, bool closed) {
  Polyline poly;
  poly.closed = closed;
  auto push = [&](double t) {
    const Vec2 p = f(t);
    if (!poly.vertices.empty() && (p - poly.vertices.back()).norm() <= 1e-12) return;
    poly.vertices.push_back(p);
    poly.params.push_back(t);
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    for (int k = 0; k < perPiece; ++k) push(breaks[i] + (breaks[i + 1] - breaks[i]) * k / perPiece);
  if (!closed) {
    push(breaks.back());
  } else if (poly.vertices.size() > 1 && (poly.vertices.back() - poly.vertices.front()).norm() <= 1e-12) {
    poly.vertices.pop_back();
    poly.params.pop_back();
  }
  return poly;
}

Polyline sample_curve(const SplineCurve& curve, const SamplingConfig& config) {
  return sample_function([&](double t) { return curve.eval(t); }, curve.space().breakpoints(),
                         config.samplesPerSpan, curve.space().is_periodic());
}

int winding_number(const Polyline& boundary, const Vec2& p) {
  int wn = 0;
  const std::size_t n = boundary.segment_count();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = boundary.segment_begin(i), b = boundary.segment_end(i);
    const double side = cross(b - a, p - a);
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && side > 0) ++wn;
    } else if (b.y() <= p.y() && side < 0) {
      --wn;
    }
  }
  return wn;
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 e = b - a;
  const double l2 = e.squaredNorm();
  if (l2 == 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(e) / l2, 0.0, 1.0);
  return (p - (a + s * e)).norm();
}

double distance_to_polyline(const Polyline& poly, const Vec2& p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.segment_count(); ++i)
    d = std::min(d, distance_to_segment(p, poly.segment_begin(i), poly.segment_end(i)));
  return d;
}

Containment winding_contains(const Polyline& boundary, const Vec2& point, double tolerance) {
  if (distance_to_polyline(boundary, point) <= tolerance) return Containment::BoundaryClose;
  return winding_number(boundary, point) != 0 ? Containment::Inside : Containment::Outside;
}

namespace {

struct SegmentHit {
  bool hit = false;
  double sa = 0.0, sb = 0.0;  // local fractions on both segments
};

SegmentHit intersect_segments(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double eps,
                              double tol) {
  const double d1 = cross(d - c, a - c), d2 = cross(d - c, b - c);
  const double d3 = cross(b - a, c - a), d4 = cross(b - a, d - a);
  SegmentHit h;
  if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
      ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))) {
    h.hit = true;
    h.sa = d1 / (d1 - d2);
    h.sb = d3 / (d3 - d4);
    return h;
  }
  // touching, collinear overlap, or near miss within tolerance
  const double dd[4] = {distance_to_segment(a, c, d), distance_to_segment(b, c, d),
                        distance_to_segment(c, a, b), distance_to_segment(d, a, b)};
  const int k = static_cast<int>(std::min_element(dd, dd + 4) - dd);
  if (dd[k] <= tol) {
    h.hit = true;
    auto frac = [](const Vec2& p, const Vec2& s0, const Vec2& s1) {
      const Vec2 e = s1 - s0;
      const double l2 = e.squaredNorm();
      return l2 == 0.0 ? 0.0 : std::clamp((p - s0).dot(e) / l2, 0.0, 1.0);
    };
    switch (k) {
      case 0: h.sa = 0.0; h.sb = frac(a, c, d); break;
      case 1: h.sa = 1.0; h.sb = frac(b, c, d); break;
      case 2: h.sb = 0.0; h.sa = frac(c, a, b); break;
      default: h.sb = 1.0; h.sa = frac(d, a, b); break;
    }
  }
  return h;
}

double param_at(const Polyline& poly, std::size_t seg, double frac) {
  if (poly.params.size() != poly.vertices.size()) return static_cast<double>(seg) + frac;
  const double t0 = poly.params[seg];
  double t1 = poly.params[(seg + 1) % poly.params.size()];
  if (seg + 1 == poly.params.size() && poly.closed && t1 <= t0) t1 += 1.0;
  return t0 + frac * (t1 - t0);
}

}  // namespace

BoundingBox bounding_box(const Polyline& poly) {
  BoundingBox b;
  for (const auto& v : poly.vertices) b.add(v);
  return b;
}

SimplicityResult is_simple(const Polyline& poly, double tolerance) {
  const std::size_t n = poly.segment_count();
  SimplicityResult result;
  if (n < 3) return result;
  const BoundingBox box = bounding_box(poly);
  const double scale = std::max((box.hi - box.lo).maxCoeff(), 1e-300);
  const double eps = 1e-12 * scale * scale;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> xmin(n), xmax(n), ymin(n), ymax(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly.segment_begin(i), b = poly.segment_end(i);
    xmin[i] = std::min(a.x(), b.x()) - tolerance;
    xmax[i] = std::max(a.x(), b.x()) + tolerance;
    ymin[i] = std::min(a.y(), b.y()) - tolerance;
    ymax[i] = std::max(a.y(), b.y()) + tolerance;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return xmin[l] < xmin[r] || (xmin[l] == xmin[r] && l < r);
  });

  // Earliest crossing in (segmentA, segmentB) order wins, independent of sweep order.
  std::optional<Crossing> best;
  for (std::size_t oi = 0; oi < n; ++oi) {
    const std::size_t i = order[oi];
    for (std::size_t oj = oi + 1; oj < n && xmin[order[oj]] <= xmax[i]; ++oj) {
      const std::size_t j = order[oj];
      if (ymin[j] > ymax[i] || ymax[j] < ymin[i]) continue;
      const std::size_t lo = std::min(i, j), hi = std::max(i, j);
      if (hi == lo + 1 || (poly.closed && lo == 0 && hi == n - 1)) continue;
      const auto h = intersect_segments(poly.segment_begin(lo), poly.segment_end(lo), poly.segment_begin(hi),
                                        poly.segment_end(hi), eps, tolerance);
      if (!h.hit) continue;
      if (best && (best->segmentA < lo || (best->segmentA == lo && best->segmentB <= hi))) continue;
      Crossing c;
      c.segmentA = lo;
      c.segmentB = hi;
      c.paramA = param_at(poly, lo, h.sa);
      c.paramB = param_at(poly, hi, h.sb);
      c.point = poly.segment_begin(lo) + h.sa * (poly.segment_end(lo) - poly.segment_begin(lo));
      best = c;
    }
  }
  if (best) {
    result.simple = false;
    result.witness = best;
  }
  return result;
}

double signed_area(const Polyline& poly) {
  double a = 0.0;
  const std::size_t n = poly.vertices.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(poly.vertices[i], poly.vertices[(i + 1) % n]);
  return 0.5 * a;
}

double ray_clearance(const Polyline& boundary, const Vec2& origin, const Vec2& direction, double tolerance) {
  const double dn = direction.norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < boundary.segment_count(); ++i) {
    const Vec2 a = boundary.segment_begin(i), e = boundary.segment_end(i) - a;
    const double denom = cross(direction, e);
    if (std::abs(denom) <= 1e-15 * dn * e.norm()) continue;
    const Vec2 ao = a - origin;
    const double s = cross(ao, e) / denom;
    const double lambda = cross(ao, direction) / denom;
    if (lambda < -1e-12 || lambda > 1.0 + 1e-12) continue;
    if (s * dn <= tolerance) continue;
    best = std::min(best, s);
  }
  return best;
}

// ---------------------------------------------------------------------------

PolygonLocator::PolygonLocator(Polyline boundary, double tolerance, int gridSize)
    : poly_(std::move(boundary)), tol_(tolerance), n_(gridSize) {
  box_ = bounding_box(poly_);
  box_.lo -= Vec2::Constant(2 * tol_);
  box_.hi += Vec2::Constant(2 * tol_);
  cell_ = (box_.hi - box_.lo) / n_;
  buckets_.assign(static_cast<std::size_t>(n_) * n_, {});
  for (std::size_t s = 0; s < poly_.segment_count(); ++s) {
    const Vec2 a = poly_.segment_begin(s), b = poly_.segment_end(s);
    const Vec2 lo = a.cwiseMin(b) - Vec2::Constant(tol_), hi = a.cwiseMax(b) + Vec2::Constant(tol_);
    const int i0 = std::clamp(static_cast<int>((lo.x() - box_.lo.x()) / cell_.x()), 0, n_ - 1);
    const int i1 = std::clamp(static_cast<int>((hi.x() - box_.lo.x()) / cell_.x()), 0, n_ - 1);
    const int j0 = std::clamp(static_cast<int>((lo.y() - box_.lo.y()) / cell_.y()), 0, n_ - 1);
    const int j1 = std::clamp(static_cast<int>((hi.y() - box_.lo.y()) / cell_.y()), 0, n_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[i + n_ * j].push_back(static_cast<int>(s));
  }
}

double PolygonLocator::distance(const Vec2& p) const { return distance_to_polyline(poly_, p); }

Containment PolygonLocator::contains(const Vec2& p) const {
  if (p.x() < box_.lo.x() || p.y() < box_.lo.y() || p.x() > box_.hi.x() || p.y() > box_.hi.y())
    return Containment::Outside;
  const int ci = std::clamp(static_cast<int>((p.x() - box_.lo.x()) / cell_.x()), 0, n_ - 1);
  const int cj = std::clamp(static_cast<int>((p.y() - box_.lo.y()) / cell_.y()), 0, n_ - 1);
  for (int s : buckets_[ci + n_ * cj])
    if (distance_to_segment(p, poly_.segment_begin(s), poly_.segment_end(s)) <= tol_)
      return Containment::BoundaryClose;
  // horizontal ray to +x, parity of crossings; each crossing counted in the cell holding it
  int crossings = 0;
  for (int i = ci; i < n_; ++i) {
    const double x0 = box_.lo.x() + i * cell_.x();
    const double x1 = (i == n_ - 1) ? std::numeric_limits<double>::infinity() : x0 + cell_.x();
    for (int s : buckets_[i + n_ * cj]) {
      const Vec2 a = poly_.segment_begin(s), b = poly_.segment_end(s);
      if ((a.y() <= p.y()) == (b.y() <= p.y())) continue;
      const double xi = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (xi <= p.x()) continue;
      const bool inCell = (i == 0 ? true : xi >= x0) && xi < x1;
      if (inCell) ++crossings;
    }
  }
  return (crossings % 2) ? Containment::Inside : Containment::Outside;
}

}  // namespace oodp
