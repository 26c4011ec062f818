// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/omp.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <sstream>

namespace oodp {

namespace {

double radical_inverse(int i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

/// Interpolates g at the Dirichlet sites; returns values indexed by global id.
template <class BasisAt>
Eigen::VectorXd dirichlet_lift(int dim, const std::vector<DofRole>& roles, const std::vector<Site>& sites,
                               const BasisAt& basisAt, const std::function<double(const Vec2&)>& g) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  if (sites.empty()) return out;
  std::vector<int> col(dim, -1);
  int n = 0;
  for (int i = 0; i < dim; ++i)
    if (roles[i] == DofRole::Dirichlet) col[i] = n++;
  if (n != static_cast<int>(sites.size())) throw Error(ErrorCode::Assembly, "Dirichlet sites do not match coefficients");
  std::vector<Eigen::Triplet<double>> t;
  Eigen::VectorXd rhs(n);
  for (int r = 0; r < n; ++r) {
    const auto B = basisAt(sites[r]);
    for (std::size_t k = 0; k < B.ids.size(); ++k)
      if (col[B.ids[k]] >= 0 && B.values[k] != 0.0) t.emplace_back(r, col[B.ids[k]], B.values[k]);
    rhs[r] = g(sites[r].x);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success) throw Error(ErrorCode::Solve, "Dirichlet interpolation is singular");
  const Eigen::VectorXd c = lu.solve(rhs);
  for (int i = 0; i < dim; ++i)
    if (col[i] >= 0) out[i] = c[col[i]];
  return out;
}

double eval_coefs(const BasisAtPoint& B, const Eigen::VectorXd& c) {
  double s = 0.0;
  for (std::size_t k = 0; k < B.ids.size(); ++k) s += B.values[k] * c[B.ids[k]];
  return s;
}

Vec2 eval_grad(const BasisAtPoint& B, const Eigen::VectorXd& c) {
  Vec2 s = Vec2::Zero();
  for (std::size_t k = 0; k < B.ids.size(); ++k) s += B.grads[k] * c[B.ids[k]];
  return s;
}

/// Rows and unknowns of one subdomain. Interior rows are Galerkin rows listed
/// in the order of their interior unknowns; coupling rows are collocation rows.
struct SubdomainBlocks {
  std::vector<int> interiorRows, interiorCols, couplingRows, couplingCols;
};

/// Exact inverse of the two diagonal subdomain blocks. Each block is upper
/// block-triangular: the collocation rows only see coupling unknowns, so the
/// coupling part is an edge interpolation and the interior part is SPD.
class SubdomainPreconditioner {
 public:
  using Sparse = Eigen::SparseMatrix<double>;

  void set_blocks(const std::array<SubdomainBlocks, 2>* blocks) { blocks_ = blocks; }

  template <class M>
  SubdomainPreconditioner& analyzePattern(const M&) { return *this; }
  template <class M>
  SubdomainPreconditioner& compute(const M& A) { return factorize(A); }

  template <class M>
  SubdomainPreconditioner& factorize(const M& A) {
    info_ = Eigen::Success;
    const Eigen::Index n = A.rows();
    // owner[k] = (subdomain, block kind 0 interior / 1 coupling, local index)
    std::vector<std::array<int, 3>> rowOwner(n, {-1, -1, -1}), colOwner(n, {-1, -1, -1});
    for (int s = 0; s < 2; ++s) {
      const auto& b = (*blocks_)[s];
      for (std::size_t k = 0; k < b.interiorRows.size(); ++k) rowOwner[b.interiorRows[k]] = {s, 0, static_cast<int>(k)};
      for (std::size_t k = 0; k < b.couplingRows.size(); ++k) rowOwner[b.couplingRows[k]] = {s, 1, static_cast<int>(k)};
      for (std::size_t k = 0; k < b.interiorCols.size(); ++k) colOwner[b.interiorCols[k]] = {s, 0, static_cast<int>(k)};
      for (std::size_t k = 0; k < b.couplingCols.size(); ++k) colOwner[b.couplingCols[k]] = {s, 1, static_cast<int>(k)};
    }
    std::array<std::vector<Eigen::Triplet<double>>, 2> tII, tIC, tCC;
    for (Eigen::Index j = 0; j < A.outerSize(); ++j)
      for (typename M::InnerIterator it(A, j); it; ++it) {
        const auto& r = rowOwner[it.row()];
        const auto& c = colOwner[it.col()];
        if (r[0] < 0 || c[0] < 0 || r[0] != c[0] || it.value() == 0.0) continue;
        const int s = r[0];
        if (r[1] == 0 && c[1] == 0) tII[s].emplace_back(r[2], c[2], it.value());
        else if (r[1] == 0) tIC[s].emplace_back(r[2], c[2], it.value());
        else if (c[1] == 1) tCC[s].emplace_back(r[2], c[2], it.value());
        else if (std::abs(it.value()) > 1e-10) info_ = Eigen::InvalidInput;  // collocation row sees an interior unknown
      }
    if (info_ != Eigen::Success) return *this;
    for (int s = 0; s < 2; ++s) {
      const auto& b = (*blocks_)[s];
      const auto nI = static_cast<Eigen::Index>(b.interiorRows.size());
      const auto nC = static_cast<Eigen::Index>(b.couplingRows.size());
      if (nI != static_cast<Eigen::Index>(b.interiorCols.size()) ||
          nC != static_cast<Eigen::Index>(b.couplingCols.size())) {
        info_ = Eigen::InvalidInput;
        return *this;
      }
      Sparse kII(nI, nI), bCC(nC, nC);
      kII.setFromTriplets(tII[s].begin(), tII[s].end());
      kIC_[s].resize(nI, nC);
      kIC_[s].setFromTriplets(tIC[s].begin(), tIC[s].end());
      bCC.setFromTriplets(tCC[s].begin(), tCC[s].end());
      bCC.makeCompressed();
      if (nI > 0) {
        llt_[s].compute(kII);
        if (llt_[s].info() != Eigen::Success) info_ = Eigen::NumericalIssue;
      }
      if (nC > 0) {
        lu_[s].analyzePattern(bCC);
        lu_[s].factorize(bCC);
        if (lu_[s].info() != Eigen::Success) info_ = Eigen::NumericalIssue;
      }
    }
    return *this;
  }

  Eigen::ComputationInfo info() const { return info_; }

  template <class R>
  Eigen::VectorXd solve(const Eigen::MatrixBase<R>& r) const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(r.size());
    for (int s = 0; s < 2; ++s) {
      const auto& b = (*blocks_)[s];
      Eigen::VectorXd zc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(b.couplingRows.size()));
      if (zc.size() > 0) {
        Eigen::VectorXd rc(zc.size());
        for (Eigen::Index k = 0; k < zc.size(); ++k) rc[k] = r[b.couplingRows[k]];
        zc = lu_[s].solve(rc);
        for (Eigen::Index k = 0; k < zc.size(); ++k) z[b.couplingCols[k]] = zc[k];
      }
      if (!b.interiorRows.empty()) {
        Eigen::VectorXd ri(static_cast<Eigen::Index>(b.interiorRows.size()));
        for (Eigen::Index k = 0; k < ri.size(); ++k) ri[k] = r[b.interiorRows[k]];
        if (zc.size() > 0) ri -= kIC_[s] * zc;
        const Eigen::VectorXd zi = llt_[s].solve(ri);
        for (Eigen::Index k = 0; k < zi.size(); ++k) z[b.interiorCols[k]] = zi[k];
      }
    }
    return z;
  }

 private:
  const std::array<SubdomainBlocks, 2>* blocks_ = nullptr;
  Eigen::ComputationInfo info_ = Eigen::Success;
  std::array<Eigen::SimplicialLLT<Sparse>, 2> llt_;
  std::array<Eigen::SparseLU<Sparse>, 2> lu_;
  std::array<Sparse, 2> kIC_;
};

double relative_residual(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double bnorm = b.norm();
  return (A * x - b).norm() / (bnorm > 0.0 ? bnorm : 1.0);
}

Eigen::VectorXd solve_direct(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw Error(ErrorCode::Solve, "coupled system is singular: " + lu.lastErrorMessage());
  return lu.solve(b);
}

/// Returns the solution and the GMRES iteration count (0 when solved directly).
std::pair<Eigen::VectorXd, int> solve_linear(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                                             const std::array<SubdomainBlocks, 2>& blocks, const SolveOptions& opt) {
  const bool iterative = opt.linearSolver == LinearSolver::Iterative ||
                         (opt.linearSolver == LinearSolver::Auto && A.rows() >= opt.directLimit);
  if (iterative) {
    Eigen::GMRES<Eigen::SparseMatrix<double>, SubdomainPreconditioner> gmres;
    gmres.preconditioner().set_blocks(&blocks);
    gmres.set_restart(150);
    gmres.setMaxIterations(1500);
    gmres.setTolerance(1e-4 * opt.residualTolerance);
    gmres.compute(A);
    if (gmres.info() == Eigen::Success) {
      // Correction sweeps on the true residual remove the round-off floor
      // left by the first solve.
      Eigen::VectorXd x = gmres.solve(b);
      int iterations = static_cast<int>(gmres.iterations());
      for (int sweep = 0; sweep < 2 && gmres.info() == Eigen::Success; ++sweep) {
        const Eigen::VectorXd r = b - A * x;
        if (r.norm() <= 1e-15 * b.norm()) break;
        const Eigen::VectorXd dx = gmres.solve(r);
        iterations += static_cast<int>(gmres.iterations());
        x += dx;
        if (dx.norm() <= 1e-14 * x.norm()) break;
      }
      if (gmres.info() == Eigen::Success && relative_residual(A, x, b) <= opt.residualTolerance)
        return {std::move(x), std::max(1, iterations)};
    }
  }
  return {solve_direct(A, b), 0};
}

}  // namespace

SolveOptions resolve_bases(const OmpProblem& problem, SolveOptions options) {
  double perimeter = 0.0;
  for (std::size_t k = 0; k < problem.omega.segment_count(); ++k)
    perimeter += (problem.omega.segment_end(k) - problem.omega.segment_begin(k)).norm();
  int alongElements = 0;
  double width = 0.0;
  int widthSamples = 0;
  for (const auto& mp : problem.ring.patches) {
    if (mp.kind != PatchKind::Ring && mp.kind != PatchKind::Segment) continue;
    alongElements += static_cast<int>(mp.patch.space_u().elements().size()) * options.alongBase;
    for (int k = 0; k < 16; ++k) {
      const double x = (k + 0.5) / 16.0;
      width += (edge_point(mp.patch, 3, x) - edge_point(mp.patch, 2, x)).norm();
      ++widthSamples;
    }
  }
  const double h = alongElements > 0 ? perimeter / alongElements : problem.cells.hc;
  if (options.radialBase <= 0)
    options.radialBase = std::max(1, static_cast<int>(std::lround(width / std::max(1, widthSamples) / h)));
  if (options.cellBase <= 0) options.cellBase = std::max(1, static_cast<int>(std::lround(problem.cells.hc / h)));
  return options;
}

CoupledSolution::CoupledSolution(const OmpProblem& problem, RingSpace ring, CellSpace cells, Eigen::VectorXd uR,
                                 Eigen::VectorXd uC)
    : ring_(std::move(ring)), cells_(std::move(cells)), uR_(std::move(uR)), uC_(std::move(uC)),
      locator_(problem.ring) {}

double CoupledSolution::eval_ring(int patch, double u, double v) const {
  return eval_coefs(ring_.basis(patch, u, v, false), uR_);
}

std::optional<double> CoupledSolution::eval_ring(const Vec2& x) const {
  const auto hit = locator_.locate(x);
  if (!hit) return std::nullopt;
  return eval_ring(hit->patch, hit->u, hit->v);
}

double CoupledSolution::eval_cells(const Vec2& x) const { return eval_coefs(cells_.basis(x, false), uC_); }

std::pair<CoupledSolution, SolveReport> solve_coupled(const OmpProblem& problem, const ExactSolution& exact,
                                                      const SolveOptions& input) {
  const auto start = std::chrono::steady_clock::now();
  const SolveOptions opt = resolve_bases(problem, input);
  const int p = opt.degree, L = opt.level;
  if (p < 1 || L < 0) throw Error(ErrorCode::InvalidInput, "degree must be >= 1 and level >= 0");
  const int scale = 1 << L;
  RingSpace R(problem.ring, p, opt.alongBase * scale, opt.radialBase * scale);
  CellSpace C(problem.cells, p, opt.cellBase * scale, &problem.omega);
  const RingLocator locator(problem.ring);

  const auto gR = dirichlet_lift(
      R.dim(), R.roles(), R.dirichlet_sites(), [&](const Site& s) { return R.basis(s.patch, s.u, s.v, false); },
      exact.u);
  const auto gC = dirichlet_lift(
      C.dim(), C.roles(), C.dirichlet_sites(), [&](const Site& s) { return C.basis(s.x, false); }, exact.u);

  const auto sysR = assemble_galerkin(R, exact.f, opt.extraQuadrature);
  const auto sysC = assemble_galerkin(C, exact.f, opt.extraQuadrature);

  // unknown numbering
  std::vector<int> colR(R.dim(), -1), colC(C.dim(), -1);
  int n = 0;
  for (int i = 0; i < R.dim(); ++i)
    if (R.roles()[i] != DofRole::Dirichlet) colR[i] = n++;
  for (int i = 0; i < C.dim(); ++i)
    if (C.roles()[i] != DofRole::Dirichlet) colC[i] = n++;

  std::array<SubdomainBlocks, 2> blocks;
  for (int i = 0; i < R.dim(); ++i)
    if (R.roles()[i] == DofRole::Coupling) blocks[0].couplingCols.push_back(colR[i]);
  for (int i = 0; i < C.dim(); ++i)
    if (C.roles()[i] == DofRole::Coupling) blocks[1].couplingCols.push_back(colC[i]);

  std::vector<Eigen::Triplet<double>> t;
  std::vector<double> rhs;
  auto galerkin_rows = [&](const GalerkinSystem& sys, const std::vector<DofRole>& roles, const std::vector<int>& col,
                           const Eigen::VectorXd& g, SubdomainBlocks& blk) {
    for (int i = 0; i < static_cast<int>(roles.size()); ++i) {
      if (roles[i] != DofRole::Interior) continue;
      const int row = static_cast<int>(rhs.size());
      blk.interiorRows.push_back(row);
      blk.interiorCols.push_back(col[i]);
      double b = sys.load[i];
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.stiffness, i); it; ++it) {
        const int j = static_cast<int>(it.row());
        if (col[j] >= 0) t.emplace_back(row, col[j], it.value());
        else b -= it.value() * g[j];
      }
      rhs.push_back(b);
    }
  };
  galerkin_rows(sysR, R.roles(), colR, gR, blocks[0]);
  galerkin_rows(sysC, C.roles(), colC, gC, blocks[1]);

  auto add_basis = [&](int row, const BasisAtPoint& B, const std::vector<int>& col, const Eigen::VectorXd& g,
                       double sign, double& b) {
    for (std::size_t k = 0; k < B.ids.size(); ++k) {
      if (B.values[k] == 0.0) continue;
      if (col[B.ids[k]] >= 0) t.emplace_back(row, col[B.ids[k]], sign * B.values[k]);
      else b -= sign * B.values[k] * g[B.ids[k]];
    }
  };
  for (const auto& s : R.coupling_sites()) {
    const int row = static_cast<int>(rhs.size());
    blocks[0].couplingRows.push_back(row);
    double b = 0.0;
    add_basis(row, R.basis(s.patch, s.u, s.v, false), colR, gR, 1.0, b);
    add_basis(row, C.basis(s.x, false), colC, gC, -1.0, b);
    rhs.push_back(b);
  }
  std::vector<RingLocator::Hit> cellSiteHits;
  for (const auto& s : C.coupling_sites()) {
    const auto hit = locator.locate(s.x, 1e-11);
    if (!hit) {
      std::ostringstream os;
      os << "cell collocation point (" << s.x.x() << ", " << s.x.y() << ") is not covered by the ring";
      throw Error(ErrorCode::Assembly, os.str());
    }
    cellSiteHits.push_back(*hit);
    const int row = static_cast<int>(rhs.size());
    blocks[1].couplingRows.push_back(row);
    double b = 0.0;
    add_basis(row, C.basis(s.x, false), colC, gC, 1.0, b);
    add_basis(row, R.basis(hit->patch, hit->u, hit->v, false), colR, gR, -1.0, b);
    rhs.push_back(b);
  }
  if (static_cast<int>(rhs.size()) != n) {
    std::ostringstream os;
    os << "coupled system is not square: " << rhs.size() << " rows, " << n << " unknowns";
    throw Error(ErrorCode::Assembly, os.str());
  }

  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  const Eigen::VectorXd bvec = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
  const auto [x, iterations] = solve_linear(A, bvec, blocks, opt);
  const double residual = relative_residual(A, x, bvec);
  if (!(residual <= opt.residualTolerance)) {
    std::ostringstream os;
    os << "coupled solve residual " << residual << " exceeds " << opt.residualTolerance;
    throw Error(ErrorCode::Solve, os.str());
  }

  Eigen::VectorXd uR = gR, uC = gC;
  for (int i = 0; i < R.dim(); ++i)
    if (colR[i] >= 0) uR[i] = x[colR[i]];
  for (int i = 0; i < C.dim(); ++i)
    if (colC[i] >= 0) uC[i] = x[colC[i]];

  SolveReport rep;
  rep.dofRing = R.dim();
  rep.dofCells = C.dim();
  rep.dofTotal = R.dim() + C.dim();
  rep.unknowns = n;
  rep.residual = residual;
  rep.iterations = iterations;

  for (const auto& s : R.coupling_sites())
    rep.couplingResidue = std::max(rep.couplingResidue, std::abs(eval_coefs(R.basis(s.patch, s.u, s.v, false), uR) -
                                                                 eval_coefs(C.basis(s.x, false), uC)));
  for (std::size_t k = 0; k < C.coupling_sites().size(); ++k) {
    const auto& h = cellSiteHits[k];
    rep.couplingResidue =
        std::max(rep.couplingResidue, std::abs(eval_coefs(C.basis(C.coupling_sites()[k].x, false), uC) -
                                               eval_coefs(R.basis(h.patch, h.u, h.v, false), uR)));
  }

  // errors on the ring
  const int nq = p + 3 + opt.extraQuadrature;
  const auto& rule = gauss_legendre(nq);
  double l2R = 0.0, h1R = 0.0;
  for (std::size_t k = 0; k < R.patches().size(); ++k) {
    const auto& P = R.patches()[k];
    for (const auto& [v0, v1] : P.v.elements())
      for (const auto& [u0, u1] : P.u.elements())
        for (int b = 0; b < nq; ++b)
          for (int a = 0; a < nq; ++a) {
            const double u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * rule.nodes[a];
            const double v = 0.5 * (v0 + v1) + 0.5 * (v1 - v0) * rule.nodes[b];
            const auto g = P.geometry.eval_jacobian(u, v);
            const double w =
                0.25 * (u1 - u0) * (v1 - v0) * rule.weights[a] * rule.weights[b] * std::abs(g.jacobian.determinant());
            const auto B = R.basis(static_cast<int>(k), u, v, true);
            const double e = eval_coefs(B, uR) - exact.u(g.point);
            const Vec2 ge = eval_grad(B, uR) - exact.grad(g.point);
            l2R += w * e * e;
            h1R += w * ge.squaredNorm();
            rep.linfRing = std::max(rep.linfRing, std::abs(e));
          }
  }

  // errors on the hole part of the cells
  const PolygonLocator holeLoc(problem.hole);
  const auto& cells = problem.cells;
  const int sub = opt.cellBase * scale;
  const double he = 1.0 / sub;
  double l2C = 0.0, h1C = 0.0;
  auto integrate_box = [&](const Vec2& lo, double size, bool clip) {
    for (int b = 0; b < nq; ++b)
      for (int a = 0; a < nq; ++a) {
        const Vec2 xi = lo + 0.5 * size * Vec2(1.0 + rule.nodes[a], 1.0 + rule.nodes[b]);
        const Vec2 x = cells.origin + cells.hc * xi;
        if (clip && holeLoc.contains(x) == Containment::Outside) continue;
        const double w = 0.25 * size * size * rule.weights[a] * rule.weights[b] * cells.hc * cells.hc;
        const auto B = C.basis(x, true);
        const double e = eval_coefs(B, uC) - exact.u(x);
        const Vec2 ge = eval_grad(B, uC) - exact.grad(x);
        l2C += w * e * e;
        h1C += w * ge.squaredNorm();
        rep.linfCells = std::max(rep.linfCells, std::abs(e));
      }
  };
  for (const auto& c : cells.cells) {
    const Vec2 center = cells.cell_lo(c) + 0.5 * cells.hc * Vec2(1, 1);
    const double halfDiag = 0.5 * std::sqrt(2.0) * cells.hc;
    const double dc = holeLoc.distance(center);
    if (dc > halfDiag && holeLoc.contains(center) == Containment::Outside) continue;
    const bool wholeCell = dc > halfDiag;
    for (int ey = 0; ey < sub; ++ey)
      for (int ex = 0; ex < sub; ++ex) {
        const Vec2 lo(c[0] + he * ex, c[1] + he * ey);
        if (wholeCell) {
          integrate_box(lo, he, false);
          continue;
        }
        const Vec2 xc = cells.origin + cells.hc * (lo + 0.5 * he * Vec2(1, 1));
        const double de = holeLoc.distance(xc);
        const double r = 0.5 * std::sqrt(2.0) * he * cells.hc;
        if (de > r) {
          if (holeLoc.contains(xc) != Containment::Outside) integrate_box(lo, he, false);
          continue;
        }
        const int m = opt.holeSubsampling;
        for (int sy = 0; sy < m; ++sy)
          for (int sx = 0; sx < m; ++sx) integrate_box(lo + he / m * Vec2(sx, sy), he / m, true);
      }
  }
  rep.l2Ring = std::sqrt(l2R);
  rep.h1Ring = std::sqrt(h1R);
  rep.l2Hole = std::sqrt(l2C);
  rep.h1Hole = std::sqrt(h1C);
  rep.l2 = std::sqrt(l2R + l2C);
  rep.h1 = std::sqrt(h1R + h1C);

  CoupledSolution sol(problem, std::move(R), std::move(C), std::move(uR), std::move(uC));

  // overlap agreement
  const PolygonLocator omegaLoc(problem.omega);
  const auto [ilo, ihi] = cells.index_bounds();
  const Vec2 lo = cells.origin + cells.hc * Vec2(ilo[0], ilo[1]);
  const Vec2 ext = cells.hc * Vec2(ihi[0] - ilo[0] + 1, ihi[1] - ilo[1] + 1);
  int found = 0;
  for (int i = 1; found < opt.overlapSamples && i < 50 * opt.overlapSamples; ++i) {
    const Vec2 x = lo + ext.cwiseProduct(Vec2(radical_inverse(i, 2), radical_inverse(i, 3)));
    if (!cells.covers(x) || holeLoc.contains(x) != Containment::Outside ||
        omegaLoc.contains(x) != Containment::Inside)
      continue;
    const auto ur = sol.eval_ring(x);
    if (!ur) continue;
    ++found;
    rep.overlapMax = std::max(rep.overlapMax, std::abs(*ur - sol.eval_cells(x)));
  }
  rep.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(sol), rep};
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport convergence_study(const OmpProblem& problem, const ExactSolution& exact,
                                    const std::vector<int>& degrees, const std::vector<int>& levels,
                                    SolveOptions base) {
  base = resolve_bases(problem, base);
  ConvergenceReport rep;
  for (int p : degrees) {
    std::vector<double> hs, l2s, h1s;
    for (int L : levels) {
      ConvergenceRow row;
      row.degree = p;
      row.level = L;
      row.h = problem.cells.hc / (base.cellBase * (1 << L));
      try {
        SolveOptions o = base;
        o.degree = p;
        o.level = L;
        const auto [sol, r] = solve_coupled(problem, exact, o);
        row.dofs = r.dofTotal;
        row.l2 = r.l2;
        row.h1 = r.h1;
        row.overlap = r.overlapMax;
        hs.push_back(row.h);
        l2s.push_back(row.l2);
        h1s.push_back(row.h1);
      } catch (const Error& e) {
        row.ok = false;
        row.error = e.what();
      }
      rep.rows.push_back(row);
    }
    rep.slopes[p] = {log_log_slope(hs, l2s), log_log_slope(hs, h1s)};
  }
  return rep;
}

}  // namespace oodp
