// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

/// @file omp.hpp
/// Overlapping multi-patch Poisson solver on a ring manifold plus a cell cover.
///
/// Unknowns are the non-Dirichlet coefficients of both subdomains. Galerkin
/// rows are tested with the interior functions of each subdomain; coupling
/// coefficients are fixed by collocating the partner solution at one point
/// per coupling function on the coupling boundary.

#pragma once

#include "oodp/corners.hpp"
#include "oodp/multicell.hpp"

#include <Eigen/Sparse>

#include <map>

namespace oodp {

struct ExactSolution {
  std::string name;
  std::function<double(const Vec2&)> u;
  std::function<Vec2(const Vec2&)> grad;
  std::function<double(const Vec2&)> f;  ///< -Laplace(u)
};

/// "sin" (sin x sin y), "sinpi" (sin pi x sin pi y), "linear" (1 + 2x - 3y), "zero".
ExactSolution make_exact_solution(const std::string& name);

enum class DofRole { Interior, Coupling, Dirichlet };

/// Collocation or interpolation site of one coefficient. Ring sites also
/// carry the patch and parameters (patch is -1 for cell sites).
struct Site {
  int id = 0;
  int patch = -1;
  double u = 0.0, v = 0.0;
  Vec2 x = Vec2::Zero();
};

/// Nonzero basis functions at one point: global ids, values and physical gradients.
struct BasisAtPoint {
  std::vector<int> ids;
  std::vector<double> values;
  std::vector<Vec2> grads;
};

/// C0 multipatch spline space on the ring manifold.
class RingSpace {
 public:
  /// Along-boundary elements of segment and ring patches are split into
  /// `alongSubdivisions`; every transversal direction and both directions of
  /// corner patches get `radialSpans` uniform elements.
  RingSpace(const RingManifold& ring, int degree, int alongSubdivisions, int radialSpans);

  struct Patch {
    TensorPatch geometry;
    SplineSpace u, v;
    std::vector<int> global;  ///< local i + nu j -> global id
  };

  int dim() const { return static_cast<int>(roles_.size()); }
  int degree() const { return degree_; }
  const std::vector<DofRole>& roles() const { return roles_; }
  const std::vector<Patch>& patches() const { return patches_; }
  /// One site per coupling (resp. Dirichlet) function.
  const std::vector<Site>& coupling_sites() const { return couplingSites_; }
  const std::vector<Site>& dirichlet_sites() const { return dirichletSites_; }

  BasisAtPoint basis(int patch, double u, double v, bool withGradients) const;

 private:
  int degree_;
  std::vector<Patch> patches_;
  std::vector<DofRole> roles_;
  std::vector<Site> couplingSites_, dirichletSites_;
};

/// Tensor spline space on the cell lattice, C0 across lattice lines, with
/// `subdivisions` uniform elements per cell and direction. Union-boundary
/// edges lying on `omega` are Dirichlet, the others coupling.
class CellSpace {
 public:
  CellSpace(const MultiCellDomain& cells, int degree, int subdivisions, const Polyline* omega = nullptr,
            double tolerance = 1e-9);

  int dim() const { return static_cast<int>(roles_.size()); }
  int subdivisions() const { return sub_; }
  const MultiCellDomain& cells() const { return cells_; }
  const SplineSpace& space_x() const { return x_; }
  const SplineSpace& space_y() const { return y_; }
  const std::vector<DofRole>& roles() const { return roles_; }
  /// Tensor index ix + nx iy -> compact id, or -1 when the function vanishes on the cells.
  const std::vector<int>& compact() const { return compact_; }
  const std::vector<Site>& coupling_sites() const { return couplingSites_; }
  const std::vector<Site>& dirichlet_sites() const { return dirichletSites_; }

  Vec2 to_param(const Vec2& x) const { return (x - cells_.origin) / cells_.hc; }
  BasisAtPoint basis(const Vec2& x, bool withGradients) const;

 private:
  MultiCellDomain cells_;
  int degree_, sub_;
  SplineSpace x_, y_;
  std::vector<int> compact_;
  std::vector<DofRole> roles_;
  std::vector<Site> couplingSites_, dirichletSites_;
};

/// Point inversion on the ring manifold.
class RingLocator {
 public:
  explicit RingLocator(const RingManifold& ring, int samplesPerElement = 6);
  struct Hit {
    int patch = -1;
    double u = 0.0, v = 0.0;
    double residual = 0.0;
  };
  /// Fails (empty) when no patch maps onto x within `tolerance`.
  std::optional<Hit> locate(const Vec2& x, double tolerance = 1e-10) const;

 private:
  struct Sample {
    int patch;
    double u, v;
    Vec2 x;
  };
  std::vector<TensorPatch> patches_;
  std::vector<Sample> samples_;
  BoundingBox box_;
  int n_ = 1;
  Vec2 cell_;
  std::vector<std::vector<int>> buckets_;
  double scale_ = 1.0;
  std::optional<Hit> newton(const Sample& s, const Vec2& x, double tol) const;
};

/// Worker threads used by assembly: OODP_THREADS when set, else the hardware concurrency.
int assembly_threads();

struct GalerkinSystem {
  Eigen::SparseMatrix<double> stiffness;  ///< dim x dim
  Eigen::VectorXd load;
};

/// Throws Error(Assembly) on a singular Jacobian.
GalerkinSystem assemble_galerkin(const RingSpace& space, const std::function<double(const Vec2&)>& f,
                                 int extraQuadrature = 0);
GalerkinSystem assemble_galerkin(const CellSpace& space, const std::function<double(const Vec2&)>& f,
                                 int extraQuadrature = 0);

struct OmpProblem {
  RingManifold ring;
  MultiCellDomain cells;
  Polyline hole;   ///< region attributed to the cells in error integrals
  Polyline omega;  ///< physical boundary
};

/// Direct sparse LU, or GMRES preconditioned by exact subdomain solves.
enum class LinearSolver { Auto, Direct, Iterative };

struct SolveOptions {
  int degree = 2;
  int level = 0;
  int alongBase = 1;   ///< along-boundary subdivisions at level 0
  int radialBase = 0;  ///< transversal spans at level 0 (0: from the geometry)
  int cellBase = 0;    ///< subdivisions per cell at level 0 (0: from the geometry)
  double residualTolerance = 1e-8;
  int extraQuadrature = 0;
  int holeSubsampling = 4;
  int overlapSamples = 2000;
  LinearSolver linearSolver = LinearSolver::Auto;
  int directLimit = 20000;  ///< Auto: unknowns below which the direct solver is used
};

/// Level-0 element counts derived from the geometry (deterministic).
SolveOptions resolve_bases(const OmpProblem& problem, SolveOptions options);

struct SolveReport {
  int dofRing = 0, dofCells = 0, dofTotal = 0;  ///< unknowns plus Dirichlet coefficients
  int unknowns = 0;
  double l2Ring = 0, h1Ring = 0, l2Hole = 0, h1Hole = 0, l2 = 0, h1 = 0;
  double residual = 0.0;
  int iterations = 0;  ///< GMRES iterations (0 for the direct solver)
  double couplingResidue = 0.0;  ///< max |u^R - u^C| at collocation points
  double overlapMax = 0.0;       ///< max |u^R - u^C| on sampled overlap points
  double linfRing = 0.0, linfCells = 0.0;  ///< max nodal error at quadrature points
  double wallSeconds = 0.0;
};

class CoupledSolution {
 public:
  CoupledSolution(const OmpProblem& problem, RingSpace ring, CellSpace cells, Eigen::VectorXd uR, Eigen::VectorXd uC);
  const RingSpace& ring_space() const { return ring_; }
  const CellSpace& cell_space() const { return cells_; }
  const Eigen::VectorXd& ring_coefs() const { return uR_; }
  const Eigen::VectorXd& cell_coefs() const { return uC_; }

  double eval_ring(int patch, double u, double v) const;
  std::optional<double> eval_ring(const Vec2& x) const;
  double eval_cells(const Vec2& x) const;

 private:
  RingSpace ring_;
  CellSpace cells_;
  Eigen::VectorXd uR_, uC_;
  RingLocator locator_;
};

/// Assembles and solves the coupled system, then measures errors against `exact`.
/// Throws Error(Solve) if the system is singular or the residual is too large.
std::pair<CoupledSolution, SolveReport> solve_coupled(const OmpProblem& problem, const ExactSolution& exact,
                                                      const SolveOptions& options);

struct ConvergenceRow {
  int degree = 0, level = 0;
  double h = 0.0;
  int dofs = 0;
  double l2 = 0.0, h1 = 0.0, overlap = 0.0;
  bool ok = true;
  std::string error;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  /// degree -> least-squares slopes of log(error) against log(h)
  std::map<int, std::pair<double, double>> slopes;
};

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

ConvergenceReport convergence_study(const OmpProblem& problem, const ExactSolution& exact,
                                    const std::vector<int>& degrees, const std::vector<int>& levels,
                                    SolveOptions base = {});

}  // namespace oodp
