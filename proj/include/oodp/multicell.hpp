// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

/// @file multicell.hpp
/// Lattice cells covering the hole inside the ring.

#pragma once

#include "oodp/corners.hpp"
#include "oodp/geometry.hpp"

#include <array>
#include <set>

namespace oodp {

using CellIndex = std::array<int, 2>;

/// Closed CCW trace of the ring's coupling edges. Throws Error(Cover) if
/// consecutive pieces do not meet.
Polyline hole_boundary(const RingManifold& ring, int samplesPerEdge = 64);

struct MultiCellDomain {
  double hc = 0.0;
  Vec2 origin = Vec2::Zero();
  std::vector<CellIndex> cells;  ///< sorted, unique

  bool active(const CellIndex& c) const { return std::binary_search(cells.begin(), cells.end(), c); }
  Vec2 cell_lo(const CellIndex& c) const { return origin + hc * Vec2(c[0], c[1]); }
  Vec2 cell_hi(const CellIndex& c) const { return origin + hc * Vec2(c[0] + 1, c[1] + 1); }
  /// Cell containing p (half-open convention).
  CellIndex locate(const Vec2& p) const;
  /// p lies in the closed union of active cells (within tol).
  bool covers(const Vec2& p, double tol = 0.0) const;
  /// Index bounds [lo, hi] of the active set.
  std::pair<CellIndex, CellIndex> index_bounds() const;
  /// Union boundary: cell edges not shared by two active cells.
  std::vector<std::pair<Vec2, Vec2>> boundary_edges() const;
};

struct CoverOptions {
  double hc = 0.0;                 ///< 0: a quarter of the hole's bounding-box short side
  std::optional<Vec2> anchor;      ///< lattice origin; default snaps the hole's lower-left corner
  int maxHalvings = 6;
  int coverageSamples = 10000;
  int edgeSamples = 8;             ///< containment samples per cell edge
  double overlapFraction = 0.15;   ///< cells also cover points within this fraction of h_c of the hole
  double tolerance = 1e-9;
};

struct CoverReport {
  int halvings = 0;
  bool connected = false;
  bool contained = false;
  bool covering = false;
  int uncoveredSamples = 0;
  double overlapMargin = 0.0;
  std::optional<CellIndex> violatingCell;
  bool valid() const { return connected && contained && covering && overlapMargin > 0.0; }
};

/// Cells of the lattice that meet the hole region dilated by `dilation` in the max norm.
MultiCellDomain cells_meeting(const Polyline& hole, double hc, const Vec2& origin, double tolerance = 1e-9,
                              double dilation = 0.0);

/// Checks connectivity, containment in omega, coverage of the hole and the overlap margin.
CoverReport check_cover(const MultiCellDomain& domain, const Polyline& hole, const Polyline& omega,
                        const CoverOptions& options = {});

/// Selects cells, halving h_c until every invariant holds. Throws Error(Cover).
MultiCellDomain select_cells(const Polyline& hole, const Polyline& omega, const CoverOptions& options = {},
                             CoverReport* report = nullptr);

/// x = origin + hc * xi on the index rectangle of the active cells.
class CellGeometryMap {
 public:
  explicit CellGeometryMap(const MultiCellDomain& domain);
  Vec2 eval(const Vec2& xi) const { return origin_ + hc_ * xi; }
  Mat2 jacobian() const { return hc_ * Mat2::Identity(); }
  Vec2 param_lo() const { return lo_; }
  Vec2 param_hi() const { return hi_; }

 private:
  Vec2 origin_;
  double hc_;
  Vec2 lo_, hi_;
};

/// Edge-adjacency flood fill; returns the number of cells reached from the first one.
std::size_t flood_fill_count(const MultiCellDomain& domain);

/// Deterministic low-discrepancy points inside a closed polyline.
std::vector<Vec2> sample_inside(const Polyline& poly, int count);

}  // namespace oodp
