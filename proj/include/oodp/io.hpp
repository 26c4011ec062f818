// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

/// @file io.hpp
/// Geometry files, SVG rendering and CSV tables.
///
/// Geometry files are JSON documents with a "format" tag and an integer
/// "version". Doubles are written with the shortest decimal form that reads
/// back to the same value; on input a number may also be given as a string
/// holding a hexadecimal float such as "0x1.8p+1".

#pragma once

#include "oodp/multicell.hpp"
#include "oodp/omp.hpp"

#include <string>

namespace oodp {

inline constexpr int kGeometryVersion = 1;

struct CoverParams {
  double cellSize = 0.0;  ///< 0: derived from the hole
  double overlapFraction = 0.15;
  int maxHalvings = 6;
  std::optional<Vec2> anchor;
};

struct SolveParams {
  std::string exactSolution = "sinpi";
  int degree = 2;
  int level = 0;
  std::vector<int> degrees{2, 3, 4};
  std::vector<int> levels{0, 1, 2, 3, 4};
  int alongBase = 2;
  int radialBase = 0;
  int cellBase = 0;
};

struct GeometryFile {
  int version = kGeometryVersion;
  std::string name;
  SplineCurve boundary;
  /// Annotated corner parameters. Empty: the boundary is treated as smooth
  /// unless it has corner knots, which are then detected.
  std::vector<double> corners;
  QuasiNormalKind quasiNormal = QuasiNormalKind::CurveNormal;
  QuasiNormalOptions quasiNormalOptions;
  OffsetParams offset;
  CoverParams cover;
  SolveParams solve;
  std::optional<RingManifold> ring;
  std::optional<MultiCellDomain> cells;
};

/// Throws Error(Format): syntax errors carry "line L, column C", semantic
/// errors the path of the offending field (e.g. "boundary.space.knots[3]").
GeometryFile parse_geometry(const std::string& text);
std::string serialize_geometry(const GeometryFile& file);

GeometryFile read_geometry_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Geometry file for a named preset (pipeline settings included).
GeometryFile geometry_from_preset(const std::string& name);

/// Exact equality of every stored field, numeric fields bit for bit.
bool same_geometry(const GeometryFile& a, const GeometryFile& b);

struct FieldSample {
  Vec2 x;
  double value = 0.0;
  std::string subdomain;  ///< "ring" or "cells"
};

/// Solution values on an n x n grid over the bounding box of omega. Points
/// in the ring take u^R; points of the cells outside the ring take u^C.
std::vector<FieldSample> sample_field(const CoupledSolution& solution, const OmpProblem& problem, int n);

struct RenderSpec {
  int width = 800, height = 800;
  int isolinesAlong = 8;       ///< per patch, along the boundary direction
  int isolinesAcross = 4;      ///< per patch, across the ring
  int curveSamples = 400;
  std::string ringColor = "#d62728";
  std::string cellColor = "#1f77b4";
  std::string boundaryColor = "#000000";

  void validate() const;
};

/// Deterministic SVG 1.1 document. Elements carry the classes "boundary",
/// "inner", "isoline", "cell" and "sample" so they can be counted.
std::string render_svg(const SplineCurve& boundary, const RingManifold* ring, const MultiCellDomain* cells,
                       const std::vector<FieldSample>* field, const RenderSpec& spec = {});

/// degree,level,h,dofs,l2,h1,overlap,ok
std::string convergence_csv(const ConvergenceReport& report);
/// degree,l2_slope,h1_slope
std::string slopes_csv(const ConvergenceReport& report);
/// x,y,value,subdomain
std::string field_csv(const std::vector<FieldSample>& samples);

/// JSON array with one object per iteration of the offsetting loop.
std::string offset_log_json(const std::vector<OffsetIteration>& log);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

}  // namespace oodp
