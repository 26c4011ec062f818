// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/omp.hpp"
#include "oodp/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

namespace oodp {
namespace {

/// Unit square: ring patch [0, 0.625] x [0, 1], cells cover [0.375, 1] x [0, 1].
OmpProblem two_rectangles() {
  OmpProblem pr;
  const auto s = SplineSpace::uniform_open(1, 1);
  ManifoldPatch mp;
  mp.patch = TensorPatch(s, s, {Vec2(0, 0), Vec2(0.625, 0), Vec2(0, 1), Vec2(0.625, 1)});
  mp.kind = PatchKind::Segment;
  mp.roles = {EdgeRole::Dirichlet, EdgeRole::Coupling, EdgeRole::Dirichlet, EdgeRole::Dirichlet};
  pr.ring.patches.push_back(mp);
  pr.cells.hc = 0.125;
  for (int i = 3; i < 8; ++i)
    for (int j = 0; j < 8; ++j) pr.cells.cells.push_back({i, j});
  pr.hole.vertices = {Vec2(0.625, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0.625, 1)};
  pr.hole.closed = true;
  pr.omega.vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  pr.omega.closed = true;
  return pr;
}

SolveOptions rect_options(int p, int level) {
  SolveOptions o;
  o.degree = p;
  o.level = level;
  o.alongBase = 8;
  o.radialBase = 5;
  o.cellBase = 1;
  return o;
}

TEST(RingSpace, AnnulusDimension) {
  const auto problem = build_problem(geometry_from_preset("circle"));
  const int p = 2, along = 2, radial = 3;
  const RingSpace space(problem.ring, p, along, radial);
  const int nPer = space.patches()[0].u.dim();
  EXPECT_TRUE(space.patches()[0].u.is_periodic());
  EXPECT_EQ(space.dim(), nPer * (radial + p));
  int dirichlet = 0, coupling = 0;
  for (auto r : space.roles()) {
    dirichlet += r == DofRole::Dirichlet;
    coupling += r == DofRole::Coupling;
  }
  EXPECT_EQ(dirichlet, nPer);
  EXPECT_EQ(coupling, nPer);
}

void check_cell_roles(const MultiCellDomain& cells, int p, int sub) {
  const CellSpace space(cells, p, sub);
  const auto& X = space.space_x();
  const auto& Y = space.space_y();
  for (int iy = 0; iy < Y.dim(); ++iy)
    for (int ix = 0; ix < X.dim(); ++ix) {
      const auto [ax, bx] = X.support(ix);
      const auto [ay, by] = Y.support(iy);
      bool any = false, all = true;
      for (int cx = static_cast<int>(std::floor(ax + 1e-9)); cx < static_cast<int>(std::ceil(bx - 1e-9)); ++cx)
        for (int cy = static_cast<int>(std::floor(ay + 1e-9)); cy < static_cast<int>(std::ceil(by - 1e-9)); ++cy) {
          any = any || cells.active({cx, cy});
          all = all && cells.active({cx, cy});
        }
      const int id = space.compact()[ix + X.dim() * iy];
      ASSERT_EQ(id >= 0, any) << ix << "," << iy;
      if (id >= 0) {
        EXPECT_EQ(space.roles()[id] == DofRole::Interior, all) << ix << "," << iy;
      }
    }
}

TEST(CellSpace, RectangleRolesFollowSupport) {
  MultiCellDomain d;
  d.hc = 0.5;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) d.cells.push_back({i, j});
  std::sort(d.cells.begin(), d.cells.end());
  check_cell_roles(d, 2, 1);
  check_cell_roles(d, 3, 2);
  const CellSpace space(d, 2, 1);
  for (const auto& s : space.coupling_sites()) {
    const Vec2 xi = space.to_param(s.x);
    const bool onRim = xi.x() <= 1e-12 || xi.x() >= 4 - 1e-12 || xi.y() <= 1e-12 || xi.y() >= 3 - 1e-12;
    EXPECT_TRUE(onRim) << xi.transpose();
  }
}

TEST(CellSpace, StaircaseRolesFollowSupport) {
  MultiCellDomain d;
  d.hc = 0.25;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j <= i; ++j) d.cells.push_back({i, j});
  std::sort(d.cells.begin(), d.cells.end());
  for (int p = 1; p <= 3; ++p) check_cell_roles(d, p, 2);
}

TEST(Assembly, ConstantsAreInKernel) {
  MultiCellDomain one;
  one.hc = 1.0;
  one.cells = {{0, 0}};
  const CellSpace q1(one, 1, 1);
  const auto sys = assemble_galerkin(q1, [](const Vec2&) { return 0.0; });
  ASSERT_EQ(sys.stiffness.rows(), 4);
  const Eigen::MatrixXd K(sys.stiffness);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(K.row(i).sum(), 0.0, 1e-14);
    EXPECT_NEAR(K(i, i), 2.0 / 3.0, 1e-14);
  }
  const auto problem = build_problem(geometry_from_preset("drop"));
  const RingSpace ring(problem.ring, 3, 2, 3);
  const auto rs = assemble_galerkin(ring, [](const Vec2&) { return 1.0; });
  const Eigen::VectorXd k1 = rs.stiffness * Eigen::VectorXd::Ones(ring.dim());
  EXPECT_LT(k1.lpNorm<Eigen::Infinity>(), 1e-10);
  EXPECT_LT((Eigen::MatrixXd(rs.stiffness) - Eigen::MatrixXd(rs.stiffness).transpose()).norm(), 1e-12);
  EXPECT_NEAR(rs.load.sum(), signed_area(problem.omega) - signed_area(problem.hole), 1e-4);
}

TEST(Assembly, BitIdenticalForAnyThreadCount) {
  const auto problem = build_problem(geometry_from_preset("heart"));
  const RingSpace ring(problem.ring, 3, 4, 4);
  const CellSpace cells(problem.cells, 3, 4);
  auto f = [](const Vec2& x) { return std::sin(3 * x.x()) * std::cos(x.y()); };
  const char* old = std::getenv("OODP_THREADS");
  const std::string saved = old ? old : "";
  std::vector<GalerkinSystem> r, c;
  for (const char* t : {"1", "3", "8"}) {
    setenv("OODP_THREADS", t, 1);
    r.push_back(assemble_galerkin(ring, f));
    c.push_back(assemble_galerkin(cells, f));
  }
  if (old) {
    setenv("OODP_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("OODP_THREADS");
  }
  auto same = [](const GalerkinSystem& a, const GalerkinSystem& b) {
    if (a.stiffness.nonZeros() != b.stiffness.nonZeros()) return false;
    for (Eigen::Index i = 0; i < a.stiffness.nonZeros(); ++i)
      if (a.stiffness.valuePtr()[i] != b.stiffness.valuePtr()[i] ||
          a.stiffness.innerIndexPtr()[i] != b.stiffness.innerIndexPtr()[i])
        return false;
    return (a.load.array() == b.load.array()).all();
  };
  for (std::size_t i = 1; i < r.size(); ++i) {
    EXPECT_TRUE(same(r[0], r[i]));
    EXPECT_TRUE(same(c[0], c[i]));
  }
}

TEST(Solve, PatchTestLinearIsExact) {
  const auto pr = two_rectangles();
  for (auto solver : {LinearSolver::Direct, LinearSolver::Iterative})
    for (int p = 1; p <= 3; ++p) {
      auto o = rect_options(p, 0);
      o.linearSolver = solver;
      const auto [sol, rep] = solve_coupled(pr, make_exact_solution("linear"), o);
      EXPECT_LT(rep.linfRing, 1e-10) << p;
      EXPECT_LT(rep.linfCells, 1e-10) << p;
      EXPECT_LT(rep.overlapMax, 1e-10) << p;
    }
}

TEST(Solve, HomogeneousProblemGivesZero) {
  const auto pr = two_rectangles();
  const auto [sol, rep] = solve_coupled(pr, make_exact_solution("zero"), rect_options(2, 0));
  EXPECT_EQ(sol.ring_coefs().lpNorm<Eigen::Infinity>(), 0.0);
  EXPECT_EQ(sol.cell_coefs().lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(Solve, TwoRectanglesConverge) {
  const auto pr = two_rectangles();
  const auto exact = make_exact_solution("sinpi");
  for (int p : {2, 3}) {
    std::vector<double> h, l2, h1, ov;
    for (int level = 0; level < 4; ++level) {
      const auto [sol, rep] = solve_coupled(pr, exact, rect_options(p, level));
      h.push_back(std::ldexp(0.125, -level));
      l2.push_back(rep.l2);
      h1.push_back(rep.h1);
      ov.push_back(rep.overlapMax);
    }
    EXPECT_NEAR(log_log_slope(h, l2), p + 1, 0.2) << p;
    EXPECT_NEAR(log_log_slope(h, h1), p, 0.2) << p;
    for (std::size_t i = 1; i < ov.size(); ++i) EXPECT_LT(ov[i], ov[i - 1]) << p;
  }
}

TEST(Solve, PeanutLocalSolutionsAgree) {
  const auto g = geometry_from_preset("peanut");
  const auto problem = build_problem(g);
  auto o = resolve_bases(problem, solve_options(g));
  o.degree = 2;
  o.level = 0;
  const auto [sol, rep] = solve_coupled(problem, make_exact_solution("sin"), o);
  EXPECT_GT(rep.dofTotal, 1080 / 2);
  EXPECT_LT(rep.dofTotal, 1080 * 2);
  EXPECT_LT(rep.residual, 1e-8);
  EXPECT_LT(rep.overlapMax, 2.0 * std::max(rep.linfRing, rep.linfCells));
}

TEST(RingLocator, InvertsPatchMaps) {
  const auto problem = build_problem(geometry_from_preset("square"));
  const RingLocator loc(problem.ring);
  for (std::size_t k = 0; k < problem.ring.patches.size(); ++k)
    for (double u : {0.1, 0.5, 0.93})
      for (double v : {0.05, 0.5, 0.97}) {
        const Vec2 x = problem.ring.patches[k].patch.eval(u, v);
        const auto hit = loc.locate(x);
        ASSERT_TRUE(hit);
        EXPECT_LT((problem.ring.patches[hit->patch].patch.eval(hit->u, hit->v) - x).norm(), 1e-10);
      }
  EXPECT_FALSE(loc.locate(Vec2(0.5, 0.5)));
}

TEST(Slopes, PowerLaw) {
  const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> e;
  for (double x : h) e.push_back(3.0 * std::pow(x, 2.5));
  EXPECT_NEAR(log_log_slope(h, e), 2.5, 1e-12);
}

TEST(ExactSolutions, LaplacianMatchesSource) {
  for (const auto& name : {"sin", "sinpi", "linear", "zero"}) {
    const auto ex = make_exact_solution(name);
    const double h = 1e-4;
    for (const Vec2& x : {Vec2(0.3, -0.2), Vec2(1.1, 0.7)}) {
      double lap = 0.0;
      for (const Vec2& e : {Vec2(h, 0), Vec2(0, h)}) lap += (ex.u(x + e) - 2 * ex.u(x) + ex.u(x - e)) / (h * h);
      EXPECT_NEAR(-lap, ex.f(x), 1e-5) << name;
      const Vec2 g((ex.u(x + Vec2(h, 0)) - ex.u(x - Vec2(h, 0))) / (2 * h),
                   (ex.u(x + Vec2(0, h)) - ex.u(x - Vec2(0, h))) / (2 * h));
      EXPECT_LT((ex.grad(x) - g).norm(), 1e-6) << name;
    }
  }
  EXPECT_THROW(make_exact_solution("cosh"), Error);
}

}  // namespace
}  // namespace oodp
