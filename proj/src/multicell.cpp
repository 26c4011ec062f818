// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/multicell.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

namespace oodp {

namespace {

/// Liang-Barsky test of segment ab against the closed box [lo, hi].
bool segment_meets_box(const Vec2& a, const Vec2& b, const Vec2& lo, const Vec2& hi) {
  double t0 = 0.0, t1 = 1.0;
  const Vec2 d = b - a;
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (a[k] < lo[k] || a[k] > hi[k]) return false;
      continue;
    }
    double ta = (lo[k] - a[k]) / d[k], tb = (hi[k] - a[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

double radical_inverse(int i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

}  // namespace

Polyline hole_boundary(const RingManifold& ring, int samplesPerEdge) {
  // endpoints of the coupling pieces in traversal order
  std::vector<std::pair<Vec2, Vec2>> pieces;
  BoundingBox box;
  for (const auto& mp : ring.patches) {
    for (const auto& c : mp.patch.net()) box.add(c);
    switch (mp.kind) {
      case PatchKind::Ring: break;
      case PatchKind::Segment: pieces.emplace_back(edge_point(mp.patch, 3, 0.0), edge_point(mp.patch, 3, 1.0)); break;
      case PatchKind::Parallelogram:
        pieces.emplace_back(edge_point(mp.patch, 1, 0.0), edge_point(mp.patch, 3, 0.0));
        break;
      case PatchKind::Coons: break;
    }
  }
  const double tol = 1e-9 * std::max(1.0, (box.hi - box.lo).norm());
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const double gap = (pieces[k].second - pieces[(k + 1) % pieces.size()].first).norm();
    if (gap > tol) {
      std::ostringstream os;
      os << "hole boundary does not close: gap " << gap << " after piece " << k;
      throw Error(ErrorCode::Cover, os.str());
    }
  }
  return ring.inner_boundary(samplesPerEdge);
}

CellIndex MultiCellDomain::locate(const Vec2& p) const {
  const Vec2 x = (p - origin) / hc;
  return {static_cast<int>(std::floor(x.x())), static_cast<int>(std::floor(x.y()))};
}

bool MultiCellDomain::covers(const Vec2& p, double tol) const {
  const CellIndex c0 = locate(p);
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj) {
      const CellIndex c{c0[0] + di, c0[1] + dj};
      if (active(c) && (p - cell_lo(c)).minCoeff() >= -tol && (cell_hi(c) - p).minCoeff() >= -tol) return true;
    }
  return false;
}

std::pair<CellIndex, CellIndex> MultiCellDomain::index_bounds() const {
  CellIndex lo{cells.front()}, hi{cells.front()};
  for (const auto& c : cells)
    for (int k = 0; k < 2; ++k) {
      lo[k] = std::min(lo[k], c[k]);
      hi[k] = std::max(hi[k], c[k]);
    }
  return {lo, hi};
}

std::vector<std::pair<Vec2, Vec2>> MultiCellDomain::boundary_edges() const {
  std::vector<std::pair<Vec2, Vec2>> e;
  for (const auto& c : cells) {
    const Vec2 lo = cell_lo(c), hi = cell_hi(c);
    if (!active({c[0], c[1] - 1})) e.emplace_back(lo, Vec2(hi.x(), lo.y()));
    if (!active({c[0] + 1, c[1]})) e.emplace_back(Vec2(hi.x(), lo.y()), hi);
    if (!active({c[0], c[1] + 1})) e.emplace_back(hi, Vec2(lo.x(), hi.y()));
    if (!active({c[0] - 1, c[1]})) e.emplace_back(Vec2(lo.x(), hi.y()), lo);
  }
  return e;
}

MultiCellDomain cells_meeting(const Polyline& hole, double hc, const Vec2& origin, double tolerance, double dilation) {
  if (!(hc > 0.0)) throw Error(ErrorCode::InvalidInput, "cell size must be positive");
  MultiCellDomain d;
  d.hc = hc;
  d.origin = origin;
  std::set<CellIndex> sel;
  auto idx = [&](double x, double o) { return static_cast<int>(std::floor((x - o) / hc)); };
  // cells within `dilation` of the hole polyline
  const double pad = tolerance + std::max(0.0, dilation);
  for (std::size_t k = 0; k < hole.segment_count(); ++k) {
    const Vec2 a = hole.segment_begin(k), b = hole.segment_end(k);
    const Vec2 lo = a.cwiseMin(b) - Vec2::Constant(pad), hi = a.cwiseMax(b) + Vec2::Constant(pad);
    for (int i = idx(lo.x(), origin.x()); i <= idx(hi.x(), origin.x()); ++i)
      for (int j = idx(lo.y(), origin.y()); j <= idx(hi.y(), origin.y()); ++j) {
        const CellIndex c{i, j};
        if (sel.count(c)) continue;
        if (segment_meets_box(a, b, d.cell_lo(c) - Vec2::Constant(pad), d.cell_hi(c) + Vec2::Constant(pad)))
          sel.insert(c);
      }
  }
  // cells strictly inside the hole: a corner inside suffices
  const PolygonLocator loc(hole, tolerance);
  const auto box = bounding_box(hole);
  for (int i = idx(box.lo.x(), origin.x()); i <= idx(box.hi.x(), origin.x()); ++i)
    for (int j = idx(box.lo.y(), origin.y()); j <= idx(box.hi.y(), origin.y()); ++j) {
      const CellIndex c{i, j};
      if (sel.count(c)) continue;
      if (loc.contains(d.cell_lo(c)) != Containment::Outside) sel.insert(c);
    }
  d.cells.assign(sel.begin(), sel.end());
  return d;
}

std::size_t flood_fill_count(const MultiCellDomain& domain) {
  if (domain.cells.empty()) return 0;
  std::set<CellIndex> seen{domain.cells.front()};
  std::queue<CellIndex> q;
  q.push(domain.cells.front());
  while (!q.empty()) {
    const auto c = q.front();
    q.pop();
    for (const CellIndex n : {CellIndex{c[0] + 1, c[1]}, CellIndex{c[0] - 1, c[1]}, CellIndex{c[0], c[1] + 1},
                              CellIndex{c[0], c[1] - 1}})
      if (domain.active(n) && seen.insert(n).second) q.push(n);
  }
  return seen.size();
}

std::vector<Vec2> sample_inside(const Polyline& poly, int count) {
  const auto box = bounding_box(poly);
  const PolygonLocator loc(poly);
  std::vector<Vec2> out;
  for (int i = 1; static_cast<int>(out.size()) < count && i < 200 * count; ++i) {
    const Vec2 p(box.lo.x() + (box.hi.x() - box.lo.x()) * radical_inverse(i, 2),
                 box.lo.y() + (box.hi.y() - box.lo.y()) * radical_inverse(i, 3));
    if (loc.contains(p) == Containment::Inside) out.push_back(p);
  }
  return out;
}

CoverReport check_cover(const MultiCellDomain& domain, const Polyline& hole, const Polyline& omega,
                        const CoverOptions& options) {
  CoverReport r;
  r.connected = !domain.cells.empty() && flood_fill_count(domain) == domain.cells.size();

  const PolygonLocator loc(omega, options.tolerance);
  r.contained = true;
  for (const auto& c : domain.cells) {
    const Vec2 lo = domain.cell_lo(c), hi = domain.cell_hi(c);
    const Vec2 corners[4] = {lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};
    bool ok = true;
    for (int e = 0; e < 4 && ok; ++e)
      for (int k = 0; k < options.edgeSamples && ok; ++k) {
        const Vec2 p = corners[e] + (corners[(e + 1) % 4] - corners[e]) * k / options.edgeSamples;
        ok = loc.contains(p) == Containment::Inside && loc.distance(p) > options.tolerance;
      }
    if (!ok) {
      r.contained = false;
      r.violatingCell = c;
      break;
    }
  }

  r.covering = true;
  for (const auto& p : sample_inside(hole, options.coverageSamples))
    if (!domain.covers(p, options.tolerance)) ++r.uncoveredSamples;
  r.covering = r.uncoveredSamples == 0;

  r.overlapMargin = std::numeric_limits<double>::infinity();
  const auto edges = domain.boundary_edges();
  for (const auto& v : hole.vertices)
    for (const auto& [a, b] : edges) r.overlapMargin = std::min(r.overlapMargin, distance_to_segment(v, a, b));
  if (edges.empty()) r.overlapMargin = 0.0;
  return r;
}

MultiCellDomain select_cells(const Polyline& hole, const Polyline& omega, const CoverOptions& options,
                             CoverReport* report) {
  const auto box = bounding_box(hole);
  double hc = options.hc > 0.0 ? options.hc : 0.25 * (box.hi - box.lo).minCoeff();
  CoverReport rep;
  for (int k = 0; k <= options.maxHalvings; ++k, hc *= 0.5) {
    const Vec2 origin = options.anchor ? *options.anchor
                                       : Vec2(hc * std::floor(box.lo.x() / hc), hc * std::floor(box.lo.y() / hc));
    auto d = cells_meeting(hole, hc, origin, options.tolerance, options.overlapFraction * hc);
    rep = check_cover(d, hole, omega, options);
    rep.halvings = k;
    if (rep.valid()) {
      if (report) *report = rep;
      return d;
    }
  }
  if (report) *report = rep;
  std::ostringstream os;
  os << "no valid cell cover after " << options.maxHalvings << " halvings (connected " << rep.connected
     << ", contained " << rep.contained << ", covering " << rep.covering << ")";
  if (rep.violatingCell) os << "; cell (" << (*rep.violatingCell)[0] << ", " << (*rep.violatingCell)[1] << ") leaves the domain";
  throw Error(ErrorCode::Cover, os.str());
}

CellGeometryMap::CellGeometryMap(const MultiCellDomain& domain) : origin_(domain.origin), hc_(domain.hc) {
  const auto [lo, hi] = domain.index_bounds();
  lo_ = Vec2(lo[0], lo[1]);
  hi_ = Vec2(hi[0] + 1, hi[1] + 1);
}

}  // namespace oodp
