// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "oodp/io.hpp"
#include "oodp/pipeline.hpp"
#include "oodp/presets.hpp"
#include "oodp/ring.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

namespace {

using namespace oodp;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

ScalarSplineFunction constant_mu(double value) {
  const SplineSpace s = SplineSpace::uniform_periodic(1, 4);
  return ScalarSplineFunction(s, std::vector<double>(s.dim(), value));
}

/// Random closed curve: a star-shaped perturbation of an ellipse.
SplineCurve random_curve(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = 0.6 + u(rng), b = 0.6 + u(rng);
  const double c2 = 0.15 * u(rng), c3 = 0.15 * u(rng), c5 = 0.05 * u(rng);
  const double ph = 2 * M_PI * u(rng);
  const int degree = 2 + static_cast<int>(rng() % 3);
  const int spans = 12 + static_cast<int>(rng() % 40);
  return polar_curve(
      [=](double th) {
        const double e = a * b / std::hypot(b * std::cos(th), a * std::sin(th));
        return e * (1.0 + c2 * std::cos(2 * th + ph) + c3 * std::sin(3 * th) + c5 * std::cos(5 * th - ph));
      },
      degree, spans);
}

Outcome criterion_mu_max() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const QuasiNormalKind kinds[] = {QuasiNormalKind::CurveNormal, QuasiNormalKind::RadialToPoint,
                                   QuasiNormalKind::SmoothedNormal};
  int triples = 0, finite = 0, failures = 0;
  double worst = 0.0;
  while (triples < 200) {
    const SplineCurve curve = random_curve(rng);
    QuasiNormalOptions opts;
    opts.center = Vec2(0.1 * (u(rng) - 0.5), 0.1 * (u(rng) - 0.5));
    QuasiNormalField q;
    try {
      q = make_quasi_normal(kinds[triples % 3], curve, opts);
    } catch (const Error&) {
      continue;
    }
    const double t = u(rng);
    ++triples;
    const double closed = mu_max(curve, q, t);
    auto sign_at = [&](double mu, double s) { return Ftilde(curve, q, constant_mu(mu)).jacobian_det(s, t); };
    const double ref = sign_at(1.0, 0.0);
    const bool refPositive = ref > 0.0;
    auto same = [&](double mu) { return (sign_at(mu, 1.0) > 0.0) == refPositive; };
    // Bracket the first sign change of D(1) in mu.
    double lo = 0.0, hi = 1e-3;
    while (hi < 1e12 && same(hi)) lo = hi, hi *= 2.0;
    if (hi >= 1e12) {
      if (std::isfinite(closed)) ++failures;
      continue;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (same(mid) ? lo : hi) = mid;
    }
    const double bisect = 0.5 * (lo + hi);
    ++finite;
    const double rel = std::abs(closed - bisect) / bisect;
    worst = std::max(worst, std::isfinite(rel) ? rel : 1.0);
    if (!(rel <= 1e-6)) ++failures;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = failures == 0 && secs < 10.0;
  o.detail = std::to_string(triples) + " triples (" + std::to_string(finite) + " bounded), " +
             std::to_string(failures) + " mismatches, worst rel " + fmt(worst) + ", " + fmt(secs) + " s";
  return o;
}

Outcome criterion_radial_identity() {
  const std::pair<std::string, SplineCurve> curves[] = {
      {"circle", ellipse_curve(1.0, 1.0, 3, 32)},
      {"ellipse", ellipse_curve(2.0, 1.0, 3, 64)},
      {"star", make_preset("star").boundary},
  };
  Outcome o;
  std::ostringstream d;
  QuasiNormalOptions opts;
  opts.center = Vec2::Zero();
  for (const auto& [name, curve] : curves) {
    const QuasiNormalField q = make_quasi_normal(QuasiNormalKind::RadialToPoint, curve, opts);
    double dev = 0.0;
    for (int i = 0; i < 2000; ++i) dev = std::max(dev, std::abs(mu_max(curve, q, (i + 0.37) / 2000.0) - 1.0));
    if (!(dev <= 1e-9)) o.pass = false;
    d << name << " " << fmt(dev) << "; ";
  }
  o.detail = "max |mu_max - 1|: " + d.str();
  return o;
}

Outcome criterion_jacobian_soundness() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const char* names[] = {"peanut", "star", "ellipse", "b612", "detailed"};
  const SamplingConfig gate;
  int fields = 0, attempts = 0, violations = 0;
  long samples = 0;
  while (fields < 50 && attempts < 1000) {
    ++attempts;
    const GeometryFile g = geometry_from_preset(names[attempts % 5]);
    const QuasiNormalField q = make_quasi_normal(g.quasiNormal, g.boundary, g.quasiNormalOptions);
    const Polyline domain = sample_curve(g.boundary, gate);
    const BoundingBox box = bounding_box(domain);
    const double cap = 0.5 * (box.hi - box.lo).maxCoeff();
    double a[4], ph[4];
    for (int k = 0; k < 4; ++k) a[k] = 0.2 * u(rng) / (k + 1), ph[k] = 2 * M_PI * u(rng);
    const double level = 0.3 + 0.7 * u(rng);
    auto factor = [&](double t) {
      double f = level;
      for (int k = 0; k < 4; ++k) f += a[k] * std::sin(2 * M_PI * (k + 1) * t + ph[k]);
      return std::clamp(f, 0.02, 1.05);
    };
    const MuSolver solver(g.boundary, q, SplineSpace::uniform_periodic(3, 20 + static_cast<int>(rng() % 60)));
    const ScalarSplineFunction mu =
        solver.solve([&](double t) { return factor(t) * std::min(mu_max(g.boundary, q, t), cap); }, 0.0, 0.0);
    if (!check_validity(g.boundary, q, mu, domain, gate).regular) continue;
    ++fields;
    const Ftilde F(g.boundary, q, mu);
    const auto breaks = g.boundary.space().breakpoints();
    const int perSpan = 4 * gate.samplesPerSpan, ns = 4 * gate.samplesPerSpan;
    int sign = 0;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b)
      for (int i = 0; i < perSpan; ++i) {
        const double t = breaks[b] + (i + 0.5) / perSpan * (breaks[b + 1] - breaks[b]);
        for (int j = 0; j <= ns; ++j) {
          const double det = F.jacobian_det(static_cast<double>(j) / ns, t);
          ++samples;
          const int s = det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
          if (sign == 0) sign = s;
          if (s == 0 || s != sign) ++violations;
        }
      }
  }
  Outcome o;
  o.pass = fields == 50 && violations == 0;
  o.detail = std::to_string(fields) + " fields passing the regularity gate (" + std::to_string(attempts) +
             " drawn), " + std::to_string(samples) + " samples, " + std::to_string(violations) + " sign violations";
  return o;
}

Outcome criterion_loop_termination() {
  Outcome o;
  std::ostringstream d;
  for (const char* name : {"peanut", "b612", "star", "detailed", "heart", "drop"}) {
    GeometryFile g = geometry_from_preset(name);
    g.offset.alpha = g.offset.beta = 0.0;
    g.offset.muSpace = SplineSpace::uniform_periodic(3, 50);
    g.offset.maxIterations = 20;
    try {
      const CornerRing ring = parameterize(g);
      int iterations = 0;
      if (ring.smoothOffset) iterations = ring.smoothOffset->iterationsUsed;
      for (const auto& s : ring.segments) iterations = std::max(iterations, s.offset.iterationsUsed);
      bool single = true;
      for (const auto& v : ring.manifold.validate()) single = single && v.singleSigned;
      const bool ok = single && iterations <= 20;
      o.pass = o.pass && ok;
      d << name << " " << iterations << (ok ? "" : " INVALID") << "; ";
    } catch (const Error& e) {
      o.pass = false;
      d << name << " failed (" << e.what() << "); ";
    }
  }
  o.detail = "iterations: " + d.str();
  return o;
}

/// Independent check of a cover: hole samples, containment in omega, edge connectivity.
int cover_violations(const OmpProblem& p, std::mt19937_64& rng, int& holeSamples) {
  int bad = 0;
  const auto& cells = p.cells;
  const BoundingBox hb = bounding_box(p.hole);
  std::uniform_real_distribution<double> ux(hb.lo.x(), hb.hi.x()), uy(hb.lo.y(), hb.hi.y());
  holeSamples = 0;
  for (int tries = 0; holeSamples < 10000 && tries < 1000000; ++tries) {
    const Vec2 x(ux(rng), uy(rng));
    if (winding_number(p.hole, x) == 0) continue;
    ++holeSamples;
    if (!cells.covers(x, 1e-12)) ++bad;
  }
  if (holeSamples < 10000) ++bad;
  constexpr int kGrid = 8;
  for (const auto& c : cells.cells) {
    const Vec2 lo = cells.cell_lo(c);
    for (int i = 0; i <= kGrid; ++i)
      for (int j = 0; j <= kGrid; ++j)
        if (winding_number(p.omega, lo + cells.hc * Vec2(i, j) / kGrid) == 0) ++bad;
  }
  for (const Vec2& v : p.omega.vertices) {
    const CellIndex c = cells.locate(v);
    const Vec2 lo = cells.cell_lo(c), hi = cells.cell_hi(c);
    if (cells.active(c) && (v.array() > lo.array()).all() && (v.array() < hi.array()).all()) ++bad;
  }
  if (!cells.cells.empty()) {
    std::set<CellIndex> seen{cells.cells.front()};
    std::deque<CellIndex> queue{cells.cells.front()};
    while (!queue.empty()) {
      const CellIndex c = queue.front();
      queue.pop_front();
      for (const CellIndex n : {CellIndex{c[0] + 1, c[1]}, CellIndex{c[0] - 1, c[1]}, CellIndex{c[0], c[1] + 1},
                                CellIndex{c[0], c[1] - 1}})
        if (cells.active(n) && seen.insert(n).second) queue.push_back(n);
    }
    bad += static_cast<int>(cells.cells.size() - seen.size());
  }
  return bad;
}

Outcome criterion_cover() {
  Outcome o;
  std::ostringstream d;
  std::mt19937_64 rng(5);
  for (const auto& name : preset_names()) {
    try {
      const OmpProblem p = build_problem(geometry_from_preset(name));
      int samples = 0;
      const int bad = cover_violations(p, rng, samples);
      o.pass = o.pass && bad == 0;
      d << name << " " << p.cells.cells.size() << " cells/" << bad << "; ";
    } catch (const Error& e) {
      o.pass = false;
      d << name << " failed (" << e.what() << "); ";
    }
  }
  o.detail = "cells/violations: " + d.str();
  return o;
}

OmpProblem two_rectangles() {
  OmpProblem pr;
  const SplineSpace s = SplineSpace::uniform_open(1, 1);
  ManifoldPatch mp;
  mp.patch = TensorPatch(s, s, {Vec2(0, 0), Vec2(0.625, 0), Vec2(0, 1), Vec2(0.625, 1)});
  mp.kind = PatchKind::Segment;
  mp.roles = {EdgeRole::Dirichlet, EdgeRole::Coupling, EdgeRole::Dirichlet, EdgeRole::Dirichlet};
  pr.ring.patches.push_back(mp);
  pr.cells.hc = 0.125;
  for (int i = 3; i < 8; ++i)
    for (int j = 0; j < 8; ++j) pr.cells.cells.push_back({i, j});
  pr.hole.vertices = {Vec2(0.625, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0.625, 1)};
  pr.omega.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  return pr;
}

Outcome criterion_patch_test() {
  Outcome o;
  const OmpProblem pr = two_rectangles();
  double worst = 0.0;
  for (const LinearSolver solver : {LinearSolver::Direct, LinearSolver::Iterative})
    for (int p = 1; p <= 3; ++p) {
      SolveOptions opt;
      opt.degree = p;
      opt.alongBase = 8;
      opt.radialBase = 5;
      opt.cellBase = 1;
      opt.linearSolver = solver;
      const SolveReport r = solve_coupled(pr, make_exact_solution("linear"), opt).second;
      worst = std::max({worst, r.linfRing, r.linfCells});
    }
  o.pass = worst <= 1e-10;
  o.detail = "max nodal error " + fmt(worst) + " over p = 1..3, direct and iterative";
  return o;
}

struct Study {
  std::string preset;
  std::vector<int> degrees, levels;
  ConvergenceReport report;
  std::string error;
};

std::vector<Study> run_studies(const std::vector<Study>& plans) {
  std::vector<Study> out;
  for (Study s : plans) {
    const auto t0 = Clock::now();
    try {
      const GeometryFile g = geometry_from_preset(s.preset);
      if (s.degrees.empty()) s.degrees = g.solve.degrees;
      if (s.levels.empty()) s.levels = g.solve.levels;
      const OmpProblem p = build_problem(g);
      s.report = convergence_study(p, make_exact_solution(g.solve.exactSolution), s.degrees, s.levels, solve_options(g));
      for (const auto& r : s.report.rows)
        if (!r.ok && s.error.empty()) s.error = r.error;
    } catch (const Error& e) {
      s.error = e.what();
    }
    std::cerr << "  " << s.preset << ": " << fmt(seconds_since(t0)) << " s\n";
    for (const auto& r : s.report.rows)
      std::cerr << "    p " << r.degree << " level " << r.level << " dofs " << r.dofs << " L2 " << fmt(r.l2)
                << " H1 " << fmt(r.h1) << " overlap " << fmt(r.overlap) << "\n";
    out.push_back(std::move(s));
  }
  return out;
}

Outcome criterion_rates(const std::vector<Study>& studies) {
  Outcome o;
  std::ostringstream d;
  const std::map<std::pair<std::string, int>, int> reference{
      {{"peanut", 2}, 1080}, {{"heart", 2}, 1460}, {{"drop", 2}, 1460}, {{"detailed", 3}, 2263}};
  for (const auto& s : studies) {
    if (s.preset == "circle" || s.preset == "ellipse" || s.preset == "b612" || s.preset == "square") continue;
    if (!s.error.empty()) {
      o.pass = false;
      d << s.preset << " failed (" << s.error << "); ";
      continue;
    }
    if (s.levels.size() < 4) o.pass = false;
    d << s.preset << ":";
    for (const auto& [p, slopes] : s.report.slopes) {
      const bool ok = std::abs(slopes.first - (p + 1)) <= 0.2 && std::abs(slopes.second - p) <= 0.2;
      o.pass = o.pass && ok;
      d << " p" << p << " " << fmt(slopes.first) << "/" << fmt(slopes.second) << (ok ? "" : " OUT");
      const auto ref = reference.find({s.preset, p});
      if (ref == reference.end()) continue;
      for (const auto& r : s.report.rows)
        if (r.degree == p && r.level == s.levels.front()) {
          const double ratio = static_cast<double>(r.dofs) / ref->second;
          const bool near = ratio >= 0.5 && ratio <= 2.0;
          o.pass = o.pass && near;
          d << " [" << r.dofs << " dofs vs " << ref->second << (near ? "" : " OUT") << "]";
        }
    }
    d << "; ";
  }
  o.detail = "L2/H1 slopes " + d.str();
  return o;
}

Outcome criterion_corner_gluing() {
  Outcome o;
  std::ostringstream d;
  for (const char* name : {"square", "heart"}) {
    const CornerRing ring = parameterize(geometry_from_preset(name));
    const double residue = ring.manifold.interface_residue();
    int bad = 0;
    for (const auto& v : ring.manifold.validate()) bad += v.singleSigned ? 0 : 1;
    o.pass = o.pass && residue < 1e-10 && bad == 0;
    d << name << " " << ring.manifold.patches.size() << " patches, residue " << fmt(residue) << ", " << bad
      << " folded; ";
  }
  o.detail = d.str();
  return o;
}

Outcome criterion_overlap(const std::vector<Study>& studies) {
  Outcome o;
  std::ostringstream d;
  for (const auto& s : studies) {
    if (!s.error.empty()) {
      o.pass = false;
      d << s.preset << " failed; ";
      continue;
    }
    int drops = 0, rises = 0;
    for (int p : s.degrees) {
      double prev = NAN;
      for (const auto& r : s.report.rows) {
        if (r.degree != p) continue;
        if (!std::isnan(prev)) (r.overlap < prev ? drops : rises) += 1;
        prev = r.overlap;
      }
    }
    o.pass = o.pass && rises == 0;
    d << s.preset << " " << rises << "/" << (drops + rises) << "; ";
  }
  o.detail = "non-decreasing steps per preset: " + d.str();
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::string& name, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };
  report(1, "mu_max closed form vs bisection", guarded(criterion_mu_max));
  report(2, "radial identity", guarded(criterion_radial_identity));
  report(3, "ring Jacobian soundness", guarded(criterion_jacobian_soundness));
  report(4, "offsetting loop termination", guarded(criterion_loop_termination));
  report(5, "multi-cell covering", guarded(criterion_cover));
  report(6, "patch test", guarded(criterion_patch_test));
  std::cerr << "convergence studies:\n";
  const std::vector<Study> studies = run_studies({
      {"peanut", {}, {}, {}, {}},
      {"star", {}, {}, {}, {}},
      {"heart", {}, {}, {}, {}},
      {"drop", {}, {}, {}, {}},
      {"detailed", {}, {}, {}, {}},
      {"circle", {2}, {0, 1, 2, 3}, {}, {}},
      {"ellipse", {2}, {0, 1, 2, 3}, {}, {}},
      {"b612", {2}, {0, 1, 2, 3}, {}, {}},
      {"square", {2}, {0, 1, 2, 3}, {}, {}},
  });
  report(7, "convergence rates", guarded([&] { return criterion_rates(studies); }));
  report(8, "corner gluing", guarded(criterion_corner_gluing));
  report(9, "overlap agreement", guarded([&] { return criterion_overlap(studies); }));
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
