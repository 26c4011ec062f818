// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/omp.hpp"

#include <algorithm>
#include <thread>
#include <exception>
#include <cstdlib>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>

namespace oodp {

ExactSolution make_exact_solution(const std::string& name) {
  ExactSolution e;
  e.name = name;
  if (name == "sin") {
    e.u = [](const Vec2& x) { return std::sin(x.x()) * std::sin(x.y()); };
    e.grad = [](const Vec2& x) {
      return Vec2(std::cos(x.x()) * std::sin(x.y()), std::sin(x.x()) * std::cos(x.y()));
    };
    e.f = [](const Vec2& x) { return 2.0 * std::sin(x.x()) * std::sin(x.y()); };
  } else if (name == "sinpi") {
    e.u = [](const Vec2& x) { return std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()); };
    e.grad = [](const Vec2& x) {
      return Vec2(M_PI * std::cos(M_PI * x.x()) * std::sin(M_PI * x.y()),
                  M_PI * std::sin(M_PI * x.x()) * std::cos(M_PI * x.y()));
    };
    e.f = [](const Vec2& x) { return 2.0 * M_PI * M_PI * std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()); };
  } else if (name == "linear") {
    e.u = [](const Vec2& x) { return 1.0 + 2.0 * x.x() - 3.0 * x.y(); };
    e.grad = [](const Vec2&) { return Vec2(2.0, -3.0); };
    e.f = [](const Vec2&) { return 0.0; };
  } else if (name == "zero") {
    e.u = [](const Vec2&) { return 0.0; };
    e.grad = [](const Vec2&) { return Vec2(0.0, 0.0); };
    e.f = [](const Vec2&) { return 0.0; };
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown exact solution '" + name + "'");
  }
  return e;
}

// ---------------------------------------------------------------------------
// ring space

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

/// Local flat indices (i + nu j) along an edge, ordered by the edge parameter.
std::vector<int> edge_indices(int nu, int nv, int edge) {
  std::vector<int> out;
  switch (edge) {
    case 0: for (int j = 0; j < nv; ++j) out.push_back(nu * j); break;
    case 1: for (int j = 0; j < nv; ++j) out.push_back(nu - 1 + nu * j); break;
    case 2: for (int i = 0; i < nu; ++i) out.push_back(i); break;
    case 3: for (int i = 0; i < nu; ++i) out.push_back(i + nu * (nv - 1)); break;
  }
  return out;
}

}  // namespace

RingSpace::RingSpace(const RingManifold& ring, int degree, int alongSubdivisions, int radialSpans) : degree_(degree) {
  if (degree < 1 || alongSubdivisions < 1 || radialSpans < 1)
    throw Error(ErrorCode::InvalidInput, "invalid ring discretization parameters");
  std::vector<int> offset;
  int total = 0;
  for (const auto& mp : ring.patches) {
    Patch p;
    p.geometry = mp.patch;
    const bool along = mp.kind == PatchKind::Ring || mp.kind == PatchKind::Segment;
    p.u = mp.patch.space_u().refined(degree, along ? alongSubdivisions : radialSpans);
    p.v = mp.patch.space_v().refined(degree, radialSpans);
    offset.push_back(total);
    total += p.u.dim() * p.v.dim();
    patches_.push_back(std::move(p));
  }

  UnionFind uf(total);
  for (const auto& f : ring.interfaces) {
    const auto& A = patches_[f.patchA];
    const auto& B = patches_[f.patchB];
    auto ea = edge_indices(A.u.dim(), A.v.dim(), f.edgeA);
    auto eb = edge_indices(B.u.dim(), B.v.dim(), f.edgeB);
    if (ea.size() != eb.size()) {
      std::ostringstream os;
      os << "interface between patches " << f.patchA << " and " << f.patchB << " has " << ea.size() << " vs "
         << eb.size() << " coefficients";
      throw Error(ErrorCode::Assembly, os.str());
    }
    if (f.reversed) std::reverse(eb.begin(), eb.end());
    for (std::size_t r = 0; r < ea.size(); ++r) uf.unite(offset[f.patchA] + ea[r], offset[f.patchB] + eb[r]);
  }
  std::vector<int> compactOf(total, -1);
  int n = 0;
  for (int k = 0; k < total; ++k) {
    const int root = uf.find(k);
    if (compactOf[root] < 0) compactOf[root] = n++;
    compactOf[k] = compactOf[root];
  }
  for (std::size_t k = 0; k < patches_.size(); ++k) {
    auto& p = patches_[k];
    p.global.resize(p.u.dim() * p.v.dim());
    for (std::size_t l = 0; l < p.global.size(); ++l) p.global[l] = compactOf[offset[k] + l];
  }

  std::vector<char> dir(n, 0), cpl(n, 0);
  for (std::size_t k = 0; k < patches_.size(); ++k) {
    const auto& p = patches_[k];
    for (int e = 0; e < 4; ++e) {
      const EdgeRole role = ring.patches[k].roles[e];
      if (role != EdgeRole::Dirichlet && role != EdgeRole::Coupling) continue;
      for (int l : edge_indices(p.u.dim(), p.v.dim(), e)) (role == EdgeRole::Dirichlet ? dir : cpl)[p.global[l]] = 1;
    }
  }
  roles_.resize(n);
  for (int g = 0; g < n; ++g) roles_[g] = dir[g] ? DofRole::Dirichlet : cpl[g] ? DofRole::Coupling : DofRole::Interior;

  std::vector<char> placed(n, 0);
  for (std::size_t k = 0; k < patches_.size(); ++k) {
    const auto& p = patches_[k];
    for (int e = 0; e < 4; ++e) {
      const EdgeRole role = ring.patches[k].roles[e];
      if (role != EdgeRole::Dirichlet && role != EdgeRole::Coupling) continue;
      const bool alongU = e >= 2;
      const auto g = alongU ? p.u.greville() : p.v.greville();
      const auto idx = edge_indices(p.u.dim(), p.v.dim(), e);
      for (std::size_t r = 0; r < idx.size(); ++r) {
        const int id = p.global[idx[r]];
        const DofRole want = role == EdgeRole::Dirichlet ? DofRole::Dirichlet : DofRole::Coupling;
        if (placed[id] || roles_[id] != want) continue;
        placed[id] = 1;
        Site s;
        s.id = id;
        s.patch = static_cast<int>(k);
        s.u = alongU ? g[r] : (e == 0 ? p.u.begin() : p.u.end());
        s.v = alongU ? (e == 2 ? p.v.begin() : p.v.end()) : g[r];
        s.x = p.geometry.eval(s.u, s.v);
        (want == DofRole::Dirichlet ? dirichletSites_ : couplingSites_).push_back(s);
      }
    }
  }
}

BasisAtPoint RingSpace::basis(int patch, double u, double v, bool withGradients) const {
  const auto& p = patches_[patch];
  const auto bu = p.u.eval(u, withGradients ? 1 : 0);
  const auto bv = p.v.eval(v, withGradients ? 1 : 0);
  const int d = degree_;
  Mat2 jinvT = Mat2::Identity();
  if (withGradients) {
    const Mat2 J = p.geometry.eval_jacobian(u, v).jacobian;
    jinvT = J.inverse().transpose();
  }
  BasisAtPoint out;
  const int nu = p.u.dim();
  for (int b = 0; b <= d; ++b) {
    const int j = p.v.wrap(bv.first + b);
    for (int a = 0; a <= d; ++a) {
      const int i = p.u.wrap(bu.first + a);
      out.ids.push_back(p.global[i + nu * j]);
      out.values.push_back(bu.values(0, a) * bv.values(0, b));
      if (withGradients)
        out.grads.push_back(jinvT * Vec2(bu.values(1, a) * bv.values(0, b), bu.values(0, a) * bv.values(1, b)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// cell space

namespace {

SplineSpace lattice_space(int degree, int first, int last, int sub) {
  // cells first..last, C0 at every lattice line
  std::vector<double> k(degree + 1, static_cast<double>(first));
  for (int c = first; c <= last; ++c) {
    for (int s = 1; s < sub; ++s) k.push_back(c + static_cast<double>(s) / sub);
    if (c < last) k.insert(k.end(), degree, static_cast<double>(c + 1));
  }
  k.insert(k.end(), degree + 1, static_cast<double>(last + 1));
  return SplineSpace::open(degree, std::move(k));
}

std::pair<int, int> cell_range(const SplineSpace& S, int i) {
  const auto [a, b] = S.support(i);
  return {static_cast<int>(std::floor(a + 1e-9)), static_cast<int>(std::ceil(b - 1e-9)) - 1};
}

}  // namespace

CellSpace::CellSpace(const MultiCellDomain& cells, int degree, int subdivisions, const Polyline* omega,
                     double tolerance)
    : cells_(cells), degree_(degree), sub_(subdivisions) {
  if (cells.cells.empty()) throw Error(ErrorCode::InvalidInput, "cell space needs at least one active cell");
  if (degree < 1 || subdivisions < 1) throw Error(ErrorCode::InvalidInput, "invalid cell discretization parameters");
  const auto [lo, hi] = cells.index_bounds();
  x_ = lattice_space(degree, lo[0] - 1, hi[0] + 1, subdivisions);
  y_ = lattice_space(degree, lo[1] - 1, hi[1] + 1, subdivisions);
  const int nx = x_.dim(), ny = y_.dim();
  const auto gx = x_.greville(), gy = y_.greville();
  std::optional<PolygonLocator> loc;
  if (omega) loc.emplace(*omega, tolerance);
  const double distTol = 1e-9 * std::max(1.0, cells.hc);

  compact_.assign(nx * ny, -1);
  for (int iy = 0; iy < ny; ++iy) {
    const auto ry = cell_range(y_, iy);
    for (int ix = 0; ix < nx; ++ix) {
      const auto rx = cell_range(x_, ix);
      bool any = false, all = true;
      for (int cy = ry.first; cy <= ry.second; ++cy)
        for (int cx = rx.first; cx <= rx.second; ++cx) {
          const bool a = cells.active({cx, cy});
          any = any || a;
          all = all && a;
        }
      if (!any) continue;
      const int id = static_cast<int>(roles_.size());
      compact_[ix + nx * iy] = id;
      if (all) {
        roles_.push_back(DofRole::Interior);
        continue;
      }
      Site s;
      s.id = id;
      s.u = gx[ix];
      s.v = gy[iy];
      s.x = cells.origin + cells.hc * Vec2(gx[ix], gy[iy]);
      const bool onOmega = loc && loc->distance(s.x) <= distTol;
      roles_.push_back(onOmega ? DofRole::Dirichlet : DofRole::Coupling);
      (onOmega ? dirichletSites_ : couplingSites_).push_back(s);
    }
  }
}

BasisAtPoint CellSpace::basis(const Vec2& x, bool withGradients) const {
  const Vec2 xi = to_param(x);
  const auto bx = x_.eval(xi.x(), withGradients ? 1 : 0);
  const auto by = y_.eval(xi.y(), withGradients ? 1 : 0);
  const int nx = x_.dim();
  BasisAtPoint out;
  for (int b = 0; b <= degree_; ++b)
    for (int a = 0; a <= degree_; ++a) {
      const int id = compact_[bx.first + a + nx * (by.first + b)];
      if (id < 0) continue;
      out.ids.push_back(id);
      out.values.push_back(bx.values(0, a) * by.values(0, b));
      if (withGradients)
        out.grads.push_back(Vec2(bx.values(1, a) * by.values(0, b), bx.values(0, a) * by.values(1, b)) / cells_.hc);
    }
  return out;
}

// ---------------------------------------------------------------------------
// point inversion

RingLocator::RingLocator(const RingManifold& ring, int samplesPerElement) {
  for (std::size_t k = 0; k < ring.patches.size(); ++k) {
    const auto& P = ring.patches[k].patch;
    patches_.push_back(P);
    const auto& U = P.space_u();
    const auto& V = P.space_v();
    const int nu = samplesPerElement * static_cast<int>(U.elements().size()) + (U.is_periodic() ? 0 : 1);
    const int nv = samplesPerElement * static_cast<int>(V.elements().size()) + 1;
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i < nu; ++i) {
        const double u = U.begin() + (U.end() - U.begin()) * i / (U.is_periodic() ? nu : nu - 1);
        const double v = V.begin() + (V.end() - V.begin()) * j / (nv - 1);
        Sample s{static_cast<int>(k), u, v, P.eval(u, v)};
        box_.add(s.x);
        samples_.push_back(s);
      }
  }
  scale_ = std::max(1.0, (box_.hi - box_.lo).norm());
  n_ = std::max(1, static_cast<int>(std::sqrt(samples_.size() / 2.0)));
  cell_ = ((box_.hi - box_.lo) / n_).cwiseMax(Vec2::Constant(1e-12));
  buckets_.resize(n_ * n_);
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    const Vec2 r = (samples_[k].x - box_.lo).cwiseQuotient(cell_);
    const int i = std::clamp(static_cast<int>(r.x()), 0, n_ - 1), j = std::clamp(static_cast<int>(r.y()), 0, n_ - 1);
    buckets_[i + n_ * j].push_back(static_cast<int>(k));
  }
}

std::optional<RingLocator::Hit> RingLocator::newton(const Sample& s, const Vec2& x, double tol) const {
  const auto& P = patches_[s.patch];
  const auto& U = P.space_u();
  const auto& V = P.space_v();
  auto step = [&](double& u, double& v, const PatchEval& e, const Vec2& r) {
    const Vec2 d = e.jacobian.inverse() * r;
    u += d.x();
    v += d.y();
    if (U.is_periodic()) u -= std::floor(u);
    else u = std::clamp(u, U.begin(), U.end());
    v = std::clamp(v, V.begin(), V.end());
  };
  double u = s.u, v = s.v;
  for (int it = 0; it < 50; ++it) {
    const auto e = P.eval_jacobian(u, v);
    const Vec2 r = x - e.point;
    const double res = r.norm();
    if (std::abs(e.jacobian.determinant()) < 1e-300) break;
    if (res <= tol * scale_) {
      // Converged: polish towards round-off while the residual keeps dropping.
      Hit best{s.patch, u, v, res};
      PatchEval eb = e;
      Vec2 rb = r;
      for (int polish = 0; polish < 3 && best.residual > 0.0; ++polish) {
        double un = best.u, vn = best.v;
        step(un, vn, eb, rb);
        const auto en = P.eval_jacobian(un, vn);
        const Vec2 rn = x - en.point;
        if (!(rn.norm() < best.residual)) break;
        best = Hit{s.patch, un, vn, rn.norm()};
        eb = en;
        rb = rn;
      }
      return best;
    }
    step(u, v, e, r);
  }
  return std::nullopt;
}

std::optional<RingLocator::Hit> RingLocator::locate(const Vec2& x, double tolerance) const {
  const Vec2 r = (x - box_.lo).cwiseQuotient(cell_);
  const int ci = std::clamp(static_cast<int>(std::floor(r.x())), 0, n_ - 1);
  const int cj = std::clamp(static_cast<int>(std::floor(r.y())), 0, n_ - 1);
  std::vector<std::pair<double, int>> cand;
  const int want = 8;
  for (int ring = 0; ring < n_; ++ring) {
    for (int j = cj - ring; j <= cj + ring; ++j)
      for (int i = ci - ring; i <= ci + ring; ++i) {
        if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring || i < 0 || j < 0 || i >= n_ || j >= n_) continue;
        for (int k : buckets_[i + n_ * j]) cand.emplace_back((samples_[k].x - x).norm(), k);
      }
    if (static_cast<int>(cand.size()) >= want) {
      std::nth_element(cand.begin(), cand.begin() + want - 1, cand.end());
      if (cand[want - 1].first <= ring * cell_.minCoeff()) break;
    }
  }
  std::sort(cand.begin(), cand.end());
  std::vector<int> triedPatch;
  for (std::size_t c = 0; c < cand.size() && c < 4 * static_cast<std::size_t>(want); ++c) {
    if (auto hit = newton(samples_[cand[c].second], x, tolerance)) return hit;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// assembly

int assembly_threads() {
  if (const char* env = std::getenv("OODP_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1 && n <= 1024) return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

class TripletAccumulator {
 public:
  explicit TripletAccumulator(int n) : m_(n, n) {}
  void add(int i, int j, double v) {
    t_.emplace_back(i, j, v);
    if (t_.size() >= 4000000) flush();
  }
  Eigen::SparseMatrix<double> finish() {
    flush();
    m_.makeCompressed();
    return std::move(m_);
  }

 private:
  void flush() {
    Eigen::SparseMatrix<double> s(m_.rows(), m_.cols());
    s.setFromTriplets(t_.begin(), t_.end());
    m_ += s;
    t_.clear();
  }
  Eigen::SparseMatrix<double> m_;
  std::vector<Eigen::Triplet<double>> t_;
};

/// Element contribution: global ids, element matrix and load vector.
struct ElementMatrix {
  std::vector<int> ids;
  Eigen::MatrixXd K;
  Eigen::VectorXd F;
};

/// Runs `element(e, out)` for e in [0, count) on fixed chunks of elements and
/// merges the chunks in order, so the result does not depend on the thread count.
template <class ElementFn>
GalerkinSystem assemble_elements(int n, int count, const ElementFn& element) {
  constexpr int kChunk = 32, kChunksPerRound = 128;
  struct Chunk {
    std::vector<ElementMatrix> elements;
    std::exception_ptr error;
  };
  const int threads = assembly_threads();
  TripletAccumulator acc(n);
  GalerkinSystem sys;
  sys.load = Eigen::VectorXd::Zero(n);
  const int chunks = (count + kChunk - 1) / kChunk;
  for (int first = 0; first < chunks; first += kChunksPerRound) {
    const int last = std::min(chunks, first + kChunksPerRound);
    std::vector<Chunk> out(last - first);
    std::atomic<int> next{first};
    auto work = [&] {
      for (int c = next++; c < last; c = next++) {
        auto& chunk = out[c - first];
        try {
          for (int e = c * kChunk; e < std::min(count, (c + 1) * kChunk); ++e) {
            chunk.elements.emplace_back();
            element(e, chunk.elements.back());
          }
        } catch (...) {
          chunk.error = std::current_exception();
        }
      }
    };
    const int nt = std::min(threads, last - first);
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& chunk : out) {
      if (chunk.error) std::rethrow_exception(chunk.error);
      for (const auto& em : chunk.elements)
        for (std::size_t r = 0; r < em.ids.size(); ++r) {
          sys.load[em.ids[r]] += em.F[r];
          for (std::size_t q = 0; q < em.ids.size(); ++q) acc.add(em.ids[r], em.ids[q], em.K(r, q));
        }
    }
  }
  sys.stiffness = acc.finish();
  return sys;
}

}  // namespace

GalerkinSystem assemble_galerkin(const RingSpace& space, const std::function<double(const Vec2&)>& f,
                                 int extraQuadrature) {
  const int nq = space.degree() + 1 + extraQuadrature;
  const int nb = (space.degree() + 1) * (space.degree() + 1);
  const auto& rule = gauss_legendre(nq);
  struct Element {
    int patch;
    double u0, u1, v0, v1;
  };
  std::vector<Element> elements;
  for (std::size_t k = 0; k < space.patches().size(); ++k) {
    const auto& P = space.patches()[k];
    for (const auto& [v0, v1] : P.v.elements())
      for (const auto& [u0, u1] : P.u.elements()) elements.push_back({static_cast<int>(k), u0, u1, v0, v1});
  }
  return assemble_elements(space.dim(), static_cast<int>(elements.size()), [&](int e, ElementMatrix& out) {
    const auto& el = elements[e];
    const auto& P = space.patches()[el.patch];
    out.K = Eigen::MatrixXd::Zero(nb, nb);
    out.F = Eigen::VectorXd::Zero(nb);
    for (int b = 0; b < nq; ++b)
      for (int a = 0; a < nq; ++a) {
        const double u = 0.5 * (el.u0 + el.u1) + 0.5 * (el.u1 - el.u0) * rule.nodes[a];
        const double v = 0.5 * (el.v0 + el.v1) + 0.5 * (el.v1 - el.v0) * rule.nodes[b];
        const auto g = P.geometry.eval_jacobian(u, v);
        const double det = g.jacobian.determinant();
        if (!(std::abs(det) > 1e-300)) {
          std::ostringstream os;
          os << "singular Jacobian in patch " << el.patch << ", element [" << el.u0 << ", " << el.u1 << "] x ["
             << el.v0 << ", " << el.v1 << "]";
          throw Error(ErrorCode::Assembly, os.str());
        }
        const double w = 0.25 * (el.u1 - el.u0) * (el.v1 - el.v0) * rule.weights[a] * rule.weights[b] * std::abs(det);
        const auto B = space.basis(el.patch, u, v, true);
        out.ids = B.ids;
        const double fx = f(g.point);
        for (int r = 0; r < nb; ++r) {
          out.F[r] += w * fx * B.values[r];
          for (int c = 0; c < nb; ++c) out.K(r, c) += w * B.grads[r].dot(B.grads[c]);
        }
      }
  });
}

GalerkinSystem assemble_galerkin(const CellSpace& space, const std::function<double(const Vec2&)>& f,
                                 int extraQuadrature) {
  const int p = space.space_x().degree();
  const int nq = p + 1 + extraQuadrature;
  const int nb = (p + 1) * (p + 1);
  const auto& rule = gauss_legendre(nq);
  const auto& cells = space.cells();
  const int sub = space.subdivisions();
  const double h = 1.0 / sub;
  const int perCell = sub * sub;
  return assemble_elements(
      space.dim(), static_cast<int>(cells.cells.size()) * perCell, [&](int e, ElementMatrix& out) {
        const auto& c = cells.cells[e / perCell];
        const int ex = (e % perCell) % sub, ey = (e % perCell) / sub;
        std::map<int, int> local;
        out.K = Eigen::MatrixXd::Zero(nb, nb);
        out.F = Eigen::VectorXd::Zero(nb);
        for (int b = 0; b < nq; ++b)
          for (int a = 0; a < nq; ++a) {
            const Vec2 xi(c[0] + h * (ex + 0.5 + 0.5 * rule.nodes[a]), c[1] + h * (ey + 0.5 + 0.5 * rule.nodes[b]));
            const Vec2 x = cells.origin + cells.hc * xi;
            const double w = 0.25 * h * h * rule.weights[a] * rule.weights[b] * cells.hc * cells.hc;
            const auto B = space.basis(x, true);
            std::vector<int> slot(B.ids.size());
            for (std::size_t r = 0; r < B.ids.size(); ++r) {
              auto [it, inserted] = local.emplace(B.ids[r], static_cast<int>(out.ids.size()));
              if (inserted) out.ids.push_back(B.ids[r]);
              slot[r] = it->second;
            }
            const double fx = f(x);
            for (std::size_t r = 0; r < B.ids.size(); ++r) {
              out.F[slot[r]] += w * fx * B.values[r];
              for (std::size_t q = 0; q < B.ids.size(); ++q) out.K(slot[r], slot[q]) += w * B.grads[r].dot(B.grads[q]);
            }
          }
        const auto m = static_cast<Eigen::Index>(out.ids.size());
        out.K.conservativeResize(m, m);
        out.F.conservativeResize(m);
      });
}

}  // namespace oodp
