// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

/// @file pipeline.hpp
/// Geometry file to coupled problem: corners, ring, cells and solver options.

#pragma once

#include "oodp/corners.hpp"
#include "oodp/io.hpp"

namespace oodp {

/// Detected corners. Annotated corners must coincide with them, otherwise
/// Error(Corner) names the first mismatch.
CornerList file_corners(const GeometryFile& file);

RingOptions ring_options(const GeometryFile& file);
CoverOptions cover_options(const GeometryFile& file);

/// Offsetting and ring construction for the file's boundary.
CornerRing parameterize(const GeometryFile& file);

/// Offset iterations of every segment in order (one segment when smooth).
std::vector<OffsetIteration> offset_log(const CornerRing& ring);

/// Ring manifold and cells from the file when stored, otherwise computed.
/// `coverReport` is filled whenever the cells are checked.
OmpProblem build_problem(const GeometryFile& file, CoverReport* coverReport = nullptr);

SolveOptions solve_options(const GeometryFile& file);

struct GateResult {
  std::string name;
  bool pass = false;
  std::string detail;
  ErrorCode code = ErrorCode::InvalidInput;  ///< exit code when this gate fails
};

/// Every geometry invariant: boundary orientation and simplicity, corners,
/// offsetting, ring Jacobians and gluing, inner boundary, cover.
std::vector<GateResult> validate_geometry(const GeometryFile& file);

std::string gates_json(const std::vector<GateResult>& gates);
std::string cover_report_json(const CoverReport& report, const MultiCellDomain& cells);
/// Deterministic fields only (no timings).
std::string solve_report_json(const SolveReport& report, const SolveOptions& options, const std::string& exact);

}  // namespace oodp
