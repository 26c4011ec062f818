// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/pipeline.hpp"

#include "json.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace oodp {

namespace {

/// Samples per coupling edge of the hole trace.
constexpr int kHoleSamples = 512;

}  // namespace

CornerList file_corners(const GeometryFile& file) {
  CornerList detected = detect_corners(file.boundary);
  if (file.corners.empty()) return detected;
  constexpr double kTol = 1e-12;
  const auto& found = detected.corners;
  for (std::size_t i = 0; i < file.corners.size(); ++i) {
    const double t = file.corners[i];
    bool match = false;
    for (const auto& c : found) match = match || std::abs(c.t - t) <= kTol;
    if (!match) {
      std::ostringstream os;
      os << "corners[" << i << "]: t = " << t << " is not a corner knot of the boundary";
      throw Error(ErrorCode::Corner, os.str());
    }
  }
  if (found.size() != file.corners.size()) {
    std::ostringstream os;
    os << "boundary has " << found.size() << " corners but " << file.corners.size() << " are annotated";
    throw Error(ErrorCode::Corner, os.str());
  }
  return detected;
}

RingOptions ring_options(const GeometryFile& file) {
  RingOptions o;
  o.quasiNormal = file.quasiNormal;
  o.quasiNormalOptions = file.quasiNormalOptions;
  o.offset = file.offset;
  return o;
}

CoverOptions cover_options(const GeometryFile& file) {
  CoverOptions o;
  o.hc = file.cover.cellSize;
  o.anchor = file.cover.anchor;
  o.maxHalvings = file.cover.maxHalvings;
  o.overlapFraction = file.cover.overlapFraction;
  return o;
}

CornerRing parameterize(const GeometryFile& file) {
  return build_ring_manifold(file.boundary, file_corners(file), ring_options(file));
}

std::vector<OffsetIteration> offset_log(const CornerRing& ring) {
  if (ring.smoothOffset) return ring.smoothOffset->log;
  std::vector<OffsetIteration> log;
  for (const auto& s : ring.segments) log.insert(log.end(), s.offset.log.begin(), s.offset.log.end());
  return log;
}

OmpProblem build_problem(const GeometryFile& file, CoverReport* coverReport) {
  OmpProblem problem;
  problem.ring = file.ring ? *file.ring : parameterize(file).manifold;
  problem.hole = hole_boundary(problem.ring, kHoleSamples);
  problem.omega = sample_curve(file.boundary);
  const CoverOptions options = cover_options(file);
  if (file.cells) {
    problem.cells = *file.cells;
    const CoverReport report = check_cover(problem.cells, problem.hole, problem.omega, options);
    if (coverReport) *coverReport = report;
    if (!report.valid()) throw Error(ErrorCode::Cover, "stored cells do not form a valid cover of the hole");
  } else {
    problem.cells = select_cells(problem.hole, problem.omega, options, coverReport);
  }
  return problem;
}

SolveOptions solve_options(const GeometryFile& file) {
  SolveOptions o;
  o.degree = file.solve.degree;
  o.level = file.solve.level;
  o.alongBase = file.solve.alongBase;
  o.radialBase = file.solve.radialBase;
  o.cellBase = file.solve.cellBase;
  return o;
}

namespace {

using Json = nlohmann::ordered_json;

std::string fixed(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

}  // namespace

std::vector<GateResult> validate_geometry(const GeometryFile& file) {
  std::vector<GateResult> gates;
  auto gate = [&](std::string name, bool pass, std::string detail, ErrorCode code) {
    gates.push_back({std::move(name), pass, std::move(detail), code});
  };
  const Polyline omega = sample_curve(file.boundary);
  const auto simple = is_simple(omega);
  gate("boundary_simple", simple.simple, simple.simple ? "" : "boundary polyline self-intersects",
       ErrorCode::InvalidInput);
  const double area = signed_area(omega);
  gate("boundary_ccw", area > 0.0, "signed area " + fixed(area), ErrorCode::InvalidInput);

  std::optional<RingManifold> ring = file.ring;
  try {
    const CornerList corners = file_corners(file);
    gate("corners", true, std::to_string(corners.size()) + " corners", ErrorCode::Corner);
    if (!ring) {
      const CornerRing built = build_ring_manifold(file.boundary, corners, ring_options(file));
      const auto log = offset_log(built);
      gate("offset", true, std::to_string(log.size()) + " iterations", ErrorCode::Offset);
      ring = built.manifold;
    }
  } catch (const Error& e) {
    const bool cornerStage = gates.back().name != "corners";
    gate(cornerStage ? "corners" : "offset", false, e.what(), e.code());
    return gates;
  }

  const auto checks = ring->validate();
  double c0 = std::numeric_limits<double>::infinity();
  bool single = true;
  for (const auto& v : checks) {
    single = single && v.singleSigned;
    c0 = std::min(c0, v.minAbsDet);
  }
  gate("ring_jacobian", single && c0 > 0.0, "min |det| " + fixed(c0), ErrorCode::RingFit);
  const double residue = ring->interface_residue();
  gate("ring_gluing", residue < 1e-10, "residue " + fixed(residue), ErrorCode::Corner);
  const Polyline inner = ring->inner_boundary();
  const auto innerSimple = is_simple(inner);
  gate("inner_simple", innerSimple.simple, innerSimple.simple ? "" : "inner boundary self-intersects",
       ErrorCode::RingFit);
  bool inside = true;
  for (const auto& v : inner.vertices) inside = inside && winding_contains(omega, v) == Containment::Inside;
  gate("inner_inside", inside, inside ? "" : "inner boundary leaves the domain", ErrorCode::RingFit);
  if (!innerSimple.simple || !inside) return gates;

  const Polyline hole = hole_boundary(*ring, kHoleSamples);
  const CoverOptions options = cover_options(file);
  MultiCellDomain cells;
  try {
    cells = file.cells ? *file.cells : select_cells(hole, omega, options);
  } catch (const Error& e) {
    gate("cover", false, e.what(), e.code());
    return gates;
  }
  const CoverReport r = check_cover(cells, hole, omega, options);
  gate("cells_connected", r.connected, std::to_string(cells.cells.size()) + " cells", ErrorCode::Cover);
  gate("cells_contained", r.contained, "", ErrorCode::Cover);
  gate("cells_cover_hole", r.covering, std::to_string(r.uncoveredSamples) + " uncovered samples", ErrorCode::Cover);
  gate("cells_overlap", r.overlapMargin > 0.0, "margin " + fixed(r.overlapMargin), ErrorCode::Cover);
  return gates;
}

std::string gates_json(const std::vector<GateResult>& gates) {
  Json a = Json::array();
  for (const auto& g : gates) {
    Json j;
    j["gate"] = g.name;
    j["pass"] = g.pass;
    if (!g.detail.empty()) j["detail"] = g.detail;
    a.push_back(j);
  }
  return a.dump(1) + "\n";
}

std::string cover_report_json(const CoverReport& report, const MultiCellDomain& cells) {
  Json j;
  j["cells"] = cells.cells.size();
  j["hc"] = cells.hc;
  j["halvings"] = report.halvings;
  j["connected"] = report.connected;
  j["contained"] = report.contained;
  j["covering"] = report.covering;
  j["uncovered_samples"] = report.uncoveredSamples;
  j["overlap_margin"] = report.overlapMargin;
  j["valid"] = report.valid();
  return j.dump(1) + "\n";
}

std::string solve_report_json(const SolveReport& r, const SolveOptions& o, const std::string& exact) {
  Json j;
  j["exact_solution"] = exact;
  j["degree"] = o.degree;
  j["level"] = o.level;
  j["along_subdivisions"] = o.alongBase << o.level;
  j["radial_spans"] = o.radialBase << o.level;
  j["cell_subdivisions"] = o.cellBase << o.level;
  j["dofs"] = {{"ring", r.dofRing}, {"cells", r.dofCells}, {"total", r.dofTotal}, {"unknowns", r.unknowns}};
  j["errors"] = {{"l2", r.l2},         {"h1", r.h1},         {"l2_ring", r.l2Ring},     {"h1_ring", r.h1Ring},
                 {"l2_hole", r.l2Hole}, {"h1_hole", r.h1Hole}, {"linf_ring", r.linfRing}, {"linf_cells", r.linfCells}};
  j["residual"] = r.residual;
  j["gmres_iterations"] = r.iterations;
  j["coupling_residue"] = r.couplingResidue;
  j["overlap_max"] = r.overlapMax;
  return j.dump(1) + "\n";
}

}  // namespace oodp
