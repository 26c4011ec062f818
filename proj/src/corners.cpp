// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/corners.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oodp {

namespace {

[[noreturn]] void corner_error(const std::string& what) { throw Error(ErrorCode::Corner, what); }

std::vector<double> normalized_greville(const SplineSpace& S) {
  auto g = S.greville();
  for (auto& x : g) x = (x - S.begin()) / (S.end() - S.begin());
  return g;
}

double net_scale(const std::vector<Vec2>& pts) {
  BoundingBox box;
  for (const auto& p : pts) box.add(p);
  return std::max(1.0, (box.hi - box.lo).norm());
}

std::string with_index(const char* what, std::size_t i, const std::string& msg) {
  std::ostringstream os;
  os << what << ' ' << i << ": " << msg;
  return os.str();
}

}  // namespace

CornerList detect_corners(const SplineCurve& boundary, double angleTolerance) {
  const auto& S = boundary.space();
  if (!S.is_periodic()) throw Error(ErrorCode::InvalidInput, "corner detection needs a closed (periodic) boundary");
  const int p = S.degree();
  const auto b = S.breakpoints();
  const auto m = S.multiplicities();
  const std::size_t nb = b.size() - 1;  // last breakpoint repeats the first
  CornerList out;
  for (std::size_t k = 0; k < nb; ++k) {
    if (m[k] < p) continue;
    const double left = b[k] - (k == 0 ? b[nb - 1] - 1.0 : b[k - 1]);
    const double right = b[k + 1] - b[k];
    const double h = 1e-9 * std::min(left, right);
    const Vec2 tin = boundary.eval(b[k] - h, 1);
    const Vec2 tout = boundary.eval(b[k], 1);
    const double angle = std::atan2(cross(tin, tout), tin.dot(tout));
    if (std::abs(angle) <= angleTolerance) continue;
    if (std::abs(angle) > M_PI - 1e-9) {
      std::ostringstream os;
      os << "cusp at t = " << b[k] << " (anti-parallel tangents) is not supported";
      throw Error(ErrorCode::Corner, os.str());
    }
    Corner c;
    c.t = b[k];
    c.convex = angle > 0.0;
    c.delta = 0.25 * std::min(left, right);
    c.tangentIn = tin.normalized();
    c.tangentOut = tout.normalized();
    c.angle = angle;
    out.corners.push_back(c);
  }
  return out;
}

std::vector<Interval> segment_intervals(const CornerList& corners) {
  const auto& c = corners.corners;
  const std::size_t m = c.size();
  std::vector<Interval> out;
  for (std::size_t i = 0; i < m; ++i) {
    const Corner& c0 = c[i];
    const Corner& c1 = c[(i + 1) % m];
    const double t1 = i + 1 < m ? c1.t : c1.t + 1.0;
    Interval x{c0.convex ? c0.t + c0.delta : c0.t, c1.convex ? t1 - c1.delta : t1};
    if (!(x.b > x.a)) corner_error(with_index("segment", i, "trimmed interval is empty; decrease delta"));
    out.push_back(x);
  }
  return out;
}

SplineCurve reversed_curve(const SplineCurve& curve) {
  const auto& S = curve.space();
  if (S.is_periodic()) throw Error(ErrorCode::InvalidInput, "cannot reverse a periodic curve");
  const double a = S.begin(), b = S.end();
  std::vector<double> k(S.knots().rbegin(), S.knots().rend());
  for (auto& x : k) x = a + b - x;
  std::vector<Vec2> c(curve.coefs().rbegin(), curve.coefs().rend());
  return SplineCurve(SplineSpace::open(S.degree(), std::move(k)), std::move(c));
}

SplineCurve line_in_space(const SplineSpace& space, const Vec2& a, const Vec2& b) {
  const auto g = normalized_greville(space);
  std::vector<Vec2> c(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) c[i] = (1.0 - g[i]) * a + g[i] * b;
  return SplineCurve(space, std::move(c));
}

TensorPatch coons_patch(const SplineCurve& bottom, const SplineCurve& top, const SplineCurve& left,
                        const SplineCurve& right) {
  const auto& U = bottom.space();
  const auto& V = left.space();
  if (!(U == top.space()) || !(V == right.space()))
    throw Error(ErrorCode::InvalidInput, "opposite Coons edges must share a spline space");
  if (U.is_periodic() || V.is_periodic()) throw Error(ErrorCode::InvalidInput, "Coons edges must be open curves");
  const Vec2 p00 = bottom.eval(U.begin()), p10 = bottom.eval(U.end());
  const Vec2 p01 = top.eval(U.begin()), p11 = top.eval(U.end());
  std::vector<Vec2> all = bottom.coefs();
  all.insert(all.end(), left.coefs().begin(), left.coefs().end());
  const double tol = 1e-10 * net_scale(all);
  if ((left.eval(V.begin()) - p00).norm() > tol || (right.eval(V.begin()) - p10).norm() > tol ||
      (left.eval(V.end()) - p01).norm() > tol || (right.eval(V.end()) - p11).norm() > tol)
    corner_error("Coons edge endpoints do not match");

  const auto gu = normalized_greville(U);
  const auto gv = normalized_greville(V);
  const int nu = U.dim(), nv = V.dim();
  std::vector<Vec2> net(nu * nv);
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const double u = gu[i], v = gv[j];
      net[i + nu * j] = (1 - v) * bottom.coefs()[i] + v * top.coefs()[i] + (1 - u) * left.coefs()[j] +
                        u * right.coefs()[j] -
                        ((1 - u) * (1 - v) * p00 + u * (1 - v) * p10 + (1 - u) * v * p01 + u * v * p11);
    }
  }
  return TensorPatch(U, V, std::move(net));
}

TensorPatch coons_corner_patch(const SplineCurve& boundary, double t, double delta, const Vec2& innerPrev,
                               const Vec2& innerNext) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidInput, "corner delta must be positive");
  const auto bottom = reversed_curve(restrict_curve(boundary, t - delta, t));
  const auto left = restrict_curve(boundary, t, t + delta);
  const auto top = line_in_space(bottom.space(), left.eval(1.0), innerNext);
  const auto right = line_in_space(left.space(), bottom.eval(1.0), innerPrev);
  return coons_patch(bottom, top, left, right);
}

TensorPatch parallelogram_corner_patch(const Vec2& corner, const Vec2& a, const Vec2& b) {
  const double sinAngle = std::abs(cross(a, b)) / (a.norm() * b.norm());
  if (!(sinAngle >= std::sin(1e-3)))
    corner_error("quasi-normals at a non-convex corner are nearly parallel");
  const auto L = SplineSpace::uniform_open(1, 1);
  return TensorPatch(L, L, {corner, corner + a, corner + b, corner + a + b});
}

const char* to_string(EdgeRole role) {
  switch (role) {
    case EdgeRole::Dirichlet: return "dirichlet";
    case EdgeRole::Coupling: return "coupling";
    case EdgeRole::Glued: return "glued";
    case EdgeRole::Periodic: return "periodic";
  }
  return "unknown";
}

const char* to_string(PatchKind kind) {
  switch (kind) {
    case PatchKind::Ring: return "ring";
    case PatchKind::Segment: return "segment";
    case PatchKind::Coons: return "coons";
    case PatchKind::Parallelogram: return "parallelogram";
  }
  return "unknown";
}

EdgeRole edge_role_from_string(const std::string& name) {
  for (auto r : {EdgeRole::Dirichlet, EdgeRole::Coupling, EdgeRole::Glued, EdgeRole::Periodic})
    if (name == to_string(r)) return r;
  throw Error(ErrorCode::Format, "unknown edge role '" + name + "'");
}

PatchKind patch_kind_from_string(const std::string& name) {
  for (auto k : {PatchKind::Ring, PatchKind::Segment, PatchKind::Coons, PatchKind::Parallelogram})
    if (name == to_string(k)) return k;
  throw Error(ErrorCode::Format, "unknown patch kind '" + name + "'");
}

Vec2 edge_point(const TensorPatch& patch, int edge, double x) {
  const auto& U = patch.space_u();
  const auto& V = patch.space_v();
  const double u = U.begin() + x * (U.end() - U.begin());
  const double v = V.begin() + x * (V.end() - V.begin());
  switch (edge) {
    case 0: return patch.eval(U.begin(), v);
    case 1: return patch.eval(U.end(), v);
    case 2: return patch.eval(u, V.begin());
    case 3: return patch.eval(u, V.end());
  }
  throw Error(ErrorCode::InvalidInput, "edge id must be 0..3");
}

double RingManifold::interface_residue(int samplesPerEdge) const {
  double r = 0.0;
  for (const auto& f : interfaces) {
    for (int k = 0; k < samplesPerEdge; ++k) {
      const double x = static_cast<double>(k) / (samplesPerEdge - 1);
      const Vec2 a = edge_point(patches[f.patchA].patch, f.edgeA, x);
      const Vec2 b = edge_point(patches[f.patchB].patch, f.edgeB, f.reversed ? 1.0 - x : x);
      r = std::max(r, (a - b).norm());
    }
  }
  return r;
}

Polyline RingManifold::inner_boundary(int samplesPerEdge) const {
  Polyline poly;
  poly.closed = true;
  auto add = [&](const TensorPatch& p, int edge, bool backwards) {
    for (int k = 0; k < samplesPerEdge; ++k) {
      const double x = static_cast<double>(k) / samplesPerEdge;
      poly.vertices.push_back(edge_point(p, edge, backwards ? 1.0 - x : x));
    }
  };
  for (const auto& mp : patches) {
    switch (mp.kind) {
      case PatchKind::Ring: {
        const auto& U = mp.patch.space_u();
        const int n = samplesPerEdge * static_cast<int>(U.elements().size());
        for (int k = 0; k < n; ++k)
          poly.vertices.push_back(mp.patch.eval(U.begin() + (U.end() - U.begin()) * k / n, mp.patch.space_v().end()));
        break;
      }
      case PatchKind::Segment:
        add(mp.patch, 3, false);
        break;
      case PatchKind::Parallelogram:
        add(mp.patch, 1, false);
        add(mp.patch, 3, true);
        break;
      case PatchKind::Coons:
        break;
    }
  }
  return poly;
}

std::vector<RingValidation> RingManifold::validate(int grid) const {
  std::vector<RingValidation> out;
  for (const auto& p : patches) out.push_back(validate_patch(p.patch, grid));
  return out;
}

RingManifold manifold_from_ring(const RingPatch& ring) {
  RingManifold m;
  ManifoldPatch p;
  p.patch = ring.patch();
  p.kind = PatchKind::Ring;
  m.patches.push_back(std::move(p));
  return m;
}

CornerRing build_ring_manifold(const SplineCurve& boundary, const CornerList& corners, const RingOptions& options) {
  CornerRing out;
  out.corners = corners;
  if (corners.empty()) {
    auto q = make_quasi_normal(options.quasiNormal, boundary, options.quasiNormalOptions);
    auto off = generalized_offset(boundary, q, options.offset, options.sampling);
    auto ring = fit_ring(Ftilde(boundary, q, off.mu), options.validationGrid);
    out.manifold = manifold_from_ring(ring);
    out.smooth = std::move(ring);
    out.smoothOffset = std::move(off);
    out.smoothQuasiNormal = std::move(q);
    return out;
  }

  const std::size_t m = corners.size();
  const auto& C = corners.corners;
  const auto intervals = segment_intervals(corners);
  const Polyline domain = sample_curve(boundary, options.sampling);
  const auto& muRef = options.offset.muSpace;
  const double h = (muRef.end() - muRef.begin()) / static_cast<double>(muRef.elements().size());

  // offsets per segment
  std::vector<std::function<Vec2(double)>> offsetLocal(m);
  std::vector<double> xa(m), xb(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t0 = C[i].t, t1 = i + 1 < m ? C[i + 1].t : C[0].t + 1.0;
    SegmentOffset seg;
    seg.interval = intervals[i];
    seg.curve = restrict_curve(boundary, t0, t1);
    xa[i] = (intervals[i].a - t0) / (t1 - t0);
    xb[i] = (intervals[i].b - t0) / (t1 - t0);
    auto qopt = options.quasiNormalOptions;
    qopt.smoothingSpans = 0;
    try {
      seg.q = make_quasi_normal(options.quasiNormal, seg.curve, qopt);
      OffsetParams params = options.offset;
      params.dProfile.reset();
      const int spans = std::max(1, static_cast<int>(std::ceil((intervals[i].b - intervals[i].a) / h - 1e-9)));
      params.muSpace = SplineSpace::uniform_open(muRef.degree(), spans, xa[i], xb[i]);
      seg.offset = generalized_offset(seg.curve, seg.q, params, options.sampling, &domain);
    } catch (const OffsetFailure& e) {
      throw OffsetFailure(with_index("segment", i, e.what()), e.log());
    } catch (const Error& e) {
      throw Error(e.code(), with_index("segment", i, e.what()));
    }
    out.segments.push_back(std::move(seg));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& seg = out.segments[i];
    offsetLocal[i] = [&seg](double x) { return offset_point(seg.curve, seg.q, seg.offset.mu, x); };
  }

  // inner curves with endpoint constraints
  std::vector<Vec2> startTarget(m), endTarget(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t prev = (i + m - 1) % m;
    const Vec2 eP = offsetLocal[prev](xb[prev]);
    const Vec2 eN = offsetLocal[i](xa[i]);
    if (C[i].convex) {
      startTarget[i] = endTarget[prev] = 0.5 * (eP + eN);
    } else {
      startTarget[i] = eN;
      endTarget[prev] = eP;
    }
  }
  std::vector<SplineCurve> outer(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto& seg = out.segments[i];
    outer[i] = restrict_curve(boundary, intervals[i].a, intervals[i].b);
    const double a = xa[i], len = xb[i] - xa[i];
    FitOptions fo;
    fo.pointsPerSpan = outer[i].space().degree() + 4;
    for (double x : seg.offset.mu.space().breakpoints()) fo.extraBreaks.push_back((x - a) / len);
    for (double x : seg.curve.space().breakpoints()) fo.extraBreaks.push_back((x - a) / len);
    const std::vector<PointConstraint> cons{{0.0, startTarget[i]}, {1.0, endTarget[i]}};
    try {
      seg.inner = fit_curve(outer[i].space(), [&](double x) { return offsetLocal[i](a + len * x); }, cons, fo);
    } catch (const Error& e) {
      throw Error(e.code(), with_index("segment", i, e.what()));
    }
  }

  // patches: corner i at 2i, segment i at 2i+1
  auto& M = out.manifold;
  const auto L = SplineSpace::uniform_open(1, 1);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t prev = (i + m - 1) % m;
    ManifoldPatch cp;
    try {
      if (C[i].convex) {
        cp.kind = PatchKind::Coons;
        cp.patch = coons_corner_patch(boundary, C[i].t, C[i].delta, out.segments[prev].inner.eval(1.0),
                                      out.segments[i].inner.eval(0.0));
        cp.roles = {EdgeRole::Dirichlet, EdgeRole::Glued, EdgeRole::Dirichlet, EdgeRole::Glued};
      } else {
        cp.kind = PatchKind::Parallelogram;
        const Vec2 corner = outer[i].eval(0.0);
        cp.patch = parallelogram_corner_patch(corner, out.segments[prev].inner.eval(1.0) - corner,
                                              out.segments[i].inner.eval(0.0) - corner);
        cp.roles = {EdgeRole::Glued, EdgeRole::Coupling, EdgeRole::Glued, EdgeRole::Coupling};
      }
    } catch (const Error& e) {
      throw Error(e.code(), with_index("corner", i, e.what()));
    }
    M.patches.push_back(std::move(cp));

    ManifoldPatch sp;
    sp.kind = PatchKind::Segment;
    const int n = outer[i].space().dim();
    std::vector<Vec2> net(2 * n);
    for (int j = 0; j < n; ++j) {
      net[j] = outer[i].coefs()[j];
      net[j + n] = out.segments[i].inner.coefs()[j];
    }
    sp.patch = TensorPatch(outer[i].space(), L, std::move(net));
    sp.roles = {EdgeRole::Glued, EdgeRole::Glued, EdgeRole::Dirichlet, EdgeRole::Coupling};
    M.patches.push_back(std::move(sp));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const int c = static_cast<int>(2 * i), next = c + 1, prev = static_cast<int>((2 * i + 2 * m - 1) % (2 * m));
    if (C[i].convex) {
      M.interfaces.push_back({c, 3, next, 0, false});
      M.interfaces.push_back({c, 1, prev, 1, false});
    } else {
      M.interfaces.push_back({c, 0, next, 0, false});
      M.interfaces.push_back({c, 2, prev, 1, false});
    }
  }

  const double residue = M.interface_residue();
  if (residue > 1e-10) {
    std::ostringstream os;
    os << "ring manifold interfaces mismatch by " << residue;
    corner_error(os.str());
  }
  const auto checks = M.validate(options.validationGrid);
  for (std::size_t k = 0; k < checks.size(); ++k)
    if (!checks[k].singleSigned)
      corner_error(with_index(to_string(M.patches[k].kind), k, "patch Jacobian changes sign"));
  const Polyline inner = M.inner_boundary();
  const auto simple = is_simple(inner, options.sampling.geometricTolerance);
  if (!simple.simple) corner_error("inner boundary of the ring self-intersects");
  if (!(signed_area(inner) > 0.0)) corner_error("inner boundary of the ring is not counter-clockwise");
  const PolygonLocator loc(domain, options.sampling.geometricTolerance);
  for (const auto& v : inner.vertices)
    if (loc.contains(v) != Containment::Inside) corner_error("inner boundary of the ring leaves the domain");
  return out;
}

}  // namespace oodp
