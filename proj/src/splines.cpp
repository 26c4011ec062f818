// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/splines.hpp"

#include "oodp/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace oodp {

namespace {

constexpr double kKnotTol = 1e-14;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidInput, what);
}

}  // namespace

// ---------------------------------------------------------------------------
// SplineSpace

SplineSpace SplineSpace::open(int degree, std::vector<double> knots) {
  require(degree >= 1, "spline degree must be >= 1");
  const int m = static_cast<int>(knots.size());
  require(m >= 2 * (degree + 1), "open knot vector too short for its degree");
  for (int i = 1; i < m; ++i) {
    if (!(knots[i] >= knots[i - 1])) {
      std::ostringstream os;
      os << "knots not nondecreasing at index " << i;
      throw Error(ErrorCode::InvalidInput, os.str());
    }
  }
  for (int i = 1; i <= degree; ++i) {
    require(knots[i] == knots[0] && knots[m - 1 - i] == knots[m - 1],
            "open knot vector must be clamped (end multiplicity p+1)");
  }
  require(knots[m - 1] > knots[0], "open knot vector has an empty domain");
  // interior multiplicity <= p
  int run = 1;
  for (int i = degree + 2; i < m - degree - 1; ++i) {
    run = (knots[i] == knots[i - 1]) ? run + 1 : 1;
    require(run <= degree, "interior knot multiplicity exceeds the degree");
  }
  SplineSpace s;
  s.degree_ = degree;
  s.periodic_ = false;
  s.dim_ = m - degree - 1;
  s.knots_ = knots;
  s.defining_ = std::move(knots);
  return s;
}

SplineSpace SplineSpace::uniform_open(int degree, int spans, double a, double b) {
  require(spans >= 1, "need at least one span");
  std::vector<double> k;
  for (int i = 0; i < degree; ++i) k.push_back(a);
  for (int i = 0; i <= spans; ++i) k.push_back(i == spans ? b : a + (b - a) * i / spans);
  for (int i = 0; i < degree; ++i) k.push_back(b);
  return open(degree, std::move(k));
}

SplineSpace SplineSpace::open_from_breaks(int degree, const std::vector<double>& breaks,
                                          const std::vector<int>& interiorMults) {
  require(breaks.size() >= 2, "need at least two breakpoints");
  require(interiorMults.size() + 2 == breaks.size(), "multiplicity count mismatch");
  std::vector<double> k(degree + 1, breaks.front());
  for (std::size_t i = 1; i + 1 < breaks.size(); ++i)
    for (int r = 0; r < interiorMults[i - 1]; ++r) k.push_back(breaks[i]);
  for (int i = 0; i <= degree; ++i) k.push_back(breaks.back());
  return open(degree, std::move(k));
}

SplineSpace SplineSpace::periodic(int degree, std::vector<double> u) {
  require(degree >= 1, "spline degree must be >= 1");
  const int n = static_cast<int>(u.size());
  require(n > degree, "periodic space needs more knots per period than its degree");
  require(u.front() == 0.0, "periodic knots must start at 0");
  require(u.back() < 1.0, "periodic knots must lie in [0,1)");
  int run = 1;
  for (int i = 1; i < n; ++i) {
    if (!(u[i] >= u[i - 1])) {
      std::ostringstream os;
      os << "knots not nondecreasing at index " << i;
      throw Error(ErrorCode::InvalidInput, os.str());
    }
    run = (u[i] == u[i - 1]) ? run + 1 : 1;
    require(run <= degree, "periodic knot multiplicity exceeds the degree");
  }
  SplineSpace s;
  s.degree_ = degree;
  s.periodic_ = true;
  s.dim_ = n;
  s.knots_.resize(n + 2 * degree + 1);
  for (int j = 0; j < n + 2 * degree + 1; ++j) {
    const int r = j - degree;
    const int q = static_cast<int>(std::floor(static_cast<double>(r) / n));
    s.knots_[j] = u[r - q * n] + q;
  }
  s.defining_ = std::move(u);
  return s;
}

SplineSpace SplineSpace::uniform_periodic(int degree, int spans) {
  std::vector<double> u(spans);
  for (int i = 0; i < spans; ++i) u[i] = static_cast<double>(i) / spans;
  return periodic(degree, std::move(u));
}

double SplineSpace::begin() const { return periodic_ ? 0.0 : knots_[degree_]; }
double SplineSpace::end() const { return periodic_ ? 1.0 : knots_[dim_]; }

std::vector<double> SplineSpace::breakpoints() const {
  std::vector<double> b;
  const int last = periodic_ ? degree_ + dim_ : dim_;
  for (int k = degree_; k <= last; ++k)
    if (b.empty() || knots_[k] > b.back()) b.push_back(knots_[k]);
  return b;
}

std::vector<int> SplineSpace::multiplicities() const {
  const auto b = breakpoints();
  std::vector<int> m(b.size(), 0);
  if (periodic_) {
    for (double x : defining_) {
      auto it = std::lower_bound(b.begin(), b.end(), x);
      ++m[it - b.begin()];
    }
    m.back() = m.front();
  } else {
    for (double x : knots_) {
      auto it = std::lower_bound(b.begin(), b.end(), x);
      ++m[it - b.begin()];
    }
  }
  return m;
}

double SplineSpace::reduce(double t) const {
  if (periodic_) {
    double r = t - std::floor(t);
    if (r >= 1.0) r = 0.0;
    return r;
  }
  const double a = begin(), b = end();
  const double tol = 1e-12 * std::max(1.0, b - a);
  if (t < a - tol || t > b + tol) {
    std::ostringstream os;
    os << "parameter " << t << " outside domain [" << a << ", " << b << "]";
    throw Error(ErrorCode::InvalidInput, os.str());
  }
  return std::clamp(t, a, b);
}

int SplineSpace::find_span(double t) const {
  const int lo = degree_;
  const int hi = periodic_ ? degree_ + dim_ : dim_;  // knots_[hi] is the domain end
  if (t >= knots_[hi]) {
    int k = hi - 1;
    while (k > lo && knots_[k] == knots_[hi]) --k;
    return k;
  }
  auto first = knots_.begin() + lo;
  auto last = knots_.begin() + hi + 1;
  auto it = std::upper_bound(first, last, t);
  int k = static_cast<int>(it - knots_.begin()) - 1;
  return std::max(k, lo);
}

BasisValues SplineSpace::eval(double t, int derivs) const {
  t = reduce(t);
  const int p = degree_;
  const int k = find_span(t);
  const auto& U = knots_;
  const int nd = std::min(derivs, p);

  // Piegl & Tiller, algorithm A2.3
  std::array<std::array<double, 16>, 16> ndu{};
  std::array<double, 16> left{}, right{};
  require(p < 15, "degree too high");
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = t - U[k + 1 - j];
    right[j] = U[k + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  BasisValues out;
  out.first = k - p;
  out.values = Eigen::MatrixXd::Zero(derivs + 1, p + 1);
  for (int j = 0; j <= p; ++j) out.values(0, j) = ndu[j][p];

  std::array<std::array<double, 16>, 2> a{};
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int kk = 1; kk <= nd; ++kk) {
      double d = 0.0;
      const int rk = r - kk, pk = p - kk;
      if (r >= kk) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? kk - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][kk] = -a[s1][kk - 1] / ndu[pk + 1][r];
        d += a[s2][kk] * ndu[r][pk];
      }
      out.values(kk, r) = d;
      std::swap(s1, s2);
    }
  }
  double fac = p;
  for (int kk = 1; kk <= nd; ++kk) {
    out.values.row(kk) *= fac;
    fac *= (p - kk);
  }
  return out;
}

std::vector<double> SplineSpace::greville() const {
  std::vector<double> g(dim_);
  for (int j = 0; j < dim_; ++j) {
    double s = 0.0;
    for (int r = 1; r <= degree_; ++r) s += knots_[j + r];
    s /= degree_;
    if (periodic_) {
      s -= std::floor(s);
      if (s >= 1.0) s = 0.0;
    }
    g[j] = s;
  }
  return g;
}

std::pair<double, double> SplineSpace::support(int i) const {
  return {knots_[i], knots_[i + degree_ + 1]};
}

std::vector<std::pair<double, double>> SplineSpace::elements() const {
  std::vector<std::pair<double, double>> e;
  const auto b = breakpoints();
  for (std::size_t i = 0; i + 1 < b.size(); ++i) e.emplace_back(b[i], b[i + 1]);
  return e;
}

SplineSpace SplineSpace::refined(int q, int subdivisions) const {
  require(q >= 1 && subdivisions >= 1, "invalid refinement request");
  const auto b = breakpoints();
  const auto m = multiplicities();
  auto newMult = [&](int mult) {
    const int continuity = degree_ - mult;
    return std::clamp(q - continuity, 1, q);
  };
  std::vector<double> fine;
  std::vector<int> mults;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    for (int s = 0; s < subdivisions; ++s) {
      fine.push_back(b[i] + (b[i + 1] - b[i]) * s / subdivisions);
      mults.push_back(s == 0 ? newMult(m[i]) : 1);
    }
  }
  if (periodic_) {
    std::vector<double> u;
    for (std::size_t i = 0; i < fine.size(); ++i)
      for (int r = 0; r < mults[i]; ++r) u.push_back(fine[i]);
    return periodic(q, std::move(u));
  }
  fine.push_back(b.back());
  std::vector<int> interior(mults.begin() + 1, mults.end());
  return open_from_breaks(q, fine, interior);
}

// ---------------------------------------------------------------------------
// SplineFunction

template <class Coef>
SplineFunction<Coef>::SplineFunction(SplineSpace space, std::vector<Coef> coefs)
    : space_(std::move(space)), coefs_(std::move(coefs)) {
  require(static_cast<int>(coefs_.size()) == space_.dim(),
          "coefficient count does not match the space dimension");
}

namespace {
template <class Coef>
Coef zero_of() {
  if constexpr (std::is_same_v<Coef, double>) {
    return 0.0;
  } else {
    return Coef::Zero();
  }
}
}  // namespace

template <class Coef>
Coef SplineFunction<Coef>::eval(double t, int deriv) const {
  const auto bv = space_.eval(t, deriv);
  Coef r = zero_of<Coef>();
  for (int j = 0; j <= space_.degree(); ++j) r += bv.values(deriv, j) * coefs_[space_.wrap(bv.first + j)];
  return r;
}

template <class Coef>
std::vector<Coef> SplineFunction<Coef>::eval_all(double t, int derivs) const {
  const auto bv = space_.eval(t, derivs);
  std::vector<Coef> r(derivs + 1, zero_of<Coef>());
  for (int j = 0; j <= space_.degree(); ++j) {
    const Coef& c = coefs_[space_.wrap(bv.first + j)];
    for (int d = 0; d <= derivs; ++d) r[d] += bv.values(d, j) * c;
  }
  return r;
}

template class SplineFunction<double>;
template class SplineFunction<Vec2>;

// ---------------------------------------------------------------------------
// TensorPatch

TensorPatch::TensorPatch(SplineSpace u, SplineSpace v, std::vector<Vec2> net)
    : u_(std::move(u)), v_(std::move(v)), net_(std::move(net)) {
  require(static_cast<int>(net_.size()) == u_.dim() * v_.dim(),
          "control net size does not match the patch spaces");
}

Vec2 TensorPatch::eval(double u, double v) const { return eval_jacobian(u, v).point; }

PatchEval TensorPatch::eval_jacobian(double u, double v) const {
  const auto bu = u_.eval(u, 1);
  const auto bv = v_.eval(v, 1);
  PatchEval r{Vec2::Zero(), Mat2::Zero()};
  for (int j = 0; j <= v_.degree(); ++j) {
    const int gj = v_.wrap(bv.first + j);
    for (int i = 0; i <= u_.degree(); ++i) {
      const Vec2& c = net_[u_.wrap(bu.first + i) + u_.dim() * gj];
      r.point += bu.values(0, i) * bv.values(0, j) * c;
      r.jacobian.col(0) += bu.values(1, i) * bv.values(0, j) * c;
      r.jacobian.col(1) += bu.values(0, i) * bv.values(1, j) * c;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Quadrature

const GaussRule& gauss_legendre(int n) {
  static const std::vector<GaussRule> rules = [] {
    std::vector<GaussRule> all(41);
    for (int m = 1; m <= 40; ++m) {
      GaussRule g;
      g.nodes.resize(m);
      g.weights.resize(m);
      for (int i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
          double p0 = 1.0, p1 = x;
          for (int k = 2; k <= m; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
          }
          if (m == 1) p0 = 1.0;
          dp = m * (x * p1 - p0) / (x * x - 1.0);
          const double dx = p1 / dp;
          x -= dx;
          if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= m; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = m * (x * p1 - p0) / (x * x - 1.0);
        g.nodes[i] = -x;
        g.nodes[m - 1 - i] = x;
        g.weights[i] = g.weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
      }
      if (m == 1) {
        g.nodes[0] = 0.0;
        g.weights[0] = 2.0;
      }
      all[m] = std::move(g);
    }
    return all;
  }();
  require(n >= 1 && n <= 40, "unsupported Gauss rule size");
  return rules[n];
}

void append_gauss_points(const std::vector<double>& breaks, int n, std::vector<double>& t,
                         std::vector<double>& w) {
  const auto& g = gauss_legendre(n);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (int k = 0; k < n; ++k) {
      t.push_back(c + h * g.nodes[k]);
      w.push_back(h * g.weights[k]);
    }
  }
}

std::vector<double> merge_breaks(const std::vector<double>& x, const std::vector<double>& y,
                                 double a, double b) {
  std::vector<double> all;
  all.push_back(a);
  all.push_back(b);
  for (double v : x)
    if (v > a && v < b) all.push_back(v);
  for (double v : y)
    if (v > a && v < b) all.push_back(v);
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double v : all)
    if (out.empty() || v - out.back() > kKnotTol * std::max(1.0, std::abs(b - a))) out.push_back(v);
  if (out.back() != b) out.back() = b;
  return out;
}

// ---------------------------------------------------------------------------
// Fitting

Eigen::MatrixXd fit_l2(const SplineSpace& space, int components, const FitTarget& target,
                       std::span<const PointConstraint> constraints, const FitOptions& options) {
  const int n = space.dim();
  const int p = space.degree();
  const int ppp = options.pointsPerSpan > 0 ? options.pointsPerSpan : p + 1;
  const auto breaks = merge_breaks(space.breakpoints(), options.extraBreaks, space.begin(), space.end());
  std::vector<double> qt, qw;
  append_gauss_points(breaks, ppp, qt, qw);

  const int nc = static_cast<int>(constraints.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + nc, n + nc);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + nc, components);
  const bool smooth = options.secondDerivativeWeight > 0.0;
  for (std::size_t q = 0; q < qt.size(); ++q) {
    const auto bv = space.eval(qt[q], smooth ? 2 : 0);
    const Eigen::VectorXd f = target(qt[q]);
    for (int a = 0; a <= p; ++a) {
      const int ia = space.wrap(bv.first + a);
      rhs.row(ia) += qw[q] * bv.values(0, a) * f.transpose();
      for (int b = 0; b <= p; ++b) {
        const int ib = space.wrap(bv.first + b);
        double v = bv.values(0, a) * bv.values(0, b);
        if (smooth) v += options.secondDerivativeWeight * bv.values(2, a) * bv.values(2, b);
        K(ia, ib) += qw[q] * v;
      }
    }
  }
  for (int c = 0; c < nc; ++c) {
    const auto bv = space.eval(constraints[c].t, 0);
    for (int a = 0; a <= p; ++a) {
      const int ia = space.wrap(bv.first + a);
      K(n + c, ia) += bv.values(0, a);
      K(ia, n + c) += bv.values(0, a);
    }
    rhs.row(n + c) = constraints[c].value.transpose();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  lu.setThreshold(1e-13);
  if (lu.rank() < n + nc) {
    std::ostringstream os;
    os << "least-squares fit is rank deficient (rank " << lu.rank() << " of " << n + nc << ")";
    throw Error(ErrorCode::Fitting, os.str());
  }
  Eigen::MatrixXd sol = lu.solve(rhs);
  return sol.topRows(n);
}

Eigen::MatrixXd interpolate(const SplineSpace& space, int components, const FitTarget& target) {
  const int n = space.dim();
  const auto g = space.greville();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs(n, components);
  for (int i = 0; i < n; ++i) {
    const auto bv = space.eval(g[i], 0);
    for (int a = 0; a <= space.degree(); ++a) A(i, space.wrap(bv.first + a)) += bv.values(0, a);
    rhs.row(i) = target(g[i]).transpose();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw Error(ErrorCode::Fitting, "Greville interpolation matrix is singular");
  return lu.solve(rhs);
}

namespace {
SplineCurve to_curve(const SplineSpace& space, const Eigen::MatrixXd& c) {
  std::vector<Vec2> pts(space.dim());
  for (int i = 0; i < space.dim(); ++i) pts[i] = Vec2(c(i, 0), c(i, 1));
  return SplineCurve(space, std::move(pts));
}
FitTarget wrap2(const std::function<Vec2(double)>& f) {
  return [f](double t) {
    const Vec2 v = f(t);
    return Eigen::VectorXd(v);
  };
}
}  // namespace

SplineCurve fit_curve(const SplineSpace& space, const std::function<Vec2(double)>& target,
                      std::span<const PointConstraint> constraints, const FitOptions& options) {
  return to_curve(space, fit_l2(space, 2, wrap2(target), constraints, options));
}

SplineCurve interpolate_curve(const SplineSpace& space, const std::function<Vec2(double)>& target) {
  return to_curve(space, interpolate(space, 2, wrap2(target)));
}

ScalarSplineFunction fit_scalar(const SplineSpace& space, const std::function<double(double)>& target,
                                const FitOptions& options) {
  const auto c = fit_l2(
      space, 1, [&](double t) { return Eigen::VectorXd::Constant(1, target(t)); }, {}, options);
  return ScalarSplineFunction(space, std::vector<double>(c.data(), c.data() + c.rows()));
}

SplineCurve restrict_curve(const SplineCurve& curve, double a, double b) {
  const auto& S = curve.space();
  require(b > a, "restriction interval is empty");
  const int p = S.degree();
  std::vector<double> inner;
  if (S.is_periodic()) {
    for (int shift = static_cast<int>(std::floor(a)) - 1; shift <= static_cast<int>(std::ceil(b)) + 1; ++shift)
      for (double u : S.defining_knots())
        if (u + shift > a && u + shift < b) inner.push_back(u + shift);
  } else {
    for (int i = p + 1; i < S.dim(); ++i)
      if (S.knots()[i] > a && S.knots()[i] < b) inner.push_back(S.knots()[i]);
  }
  std::sort(inner.begin(), inner.end());
  const double len = b - a;
  std::vector<double> k(p + 1, 0.0);
  for (double x : inner) {
    const double xi = (x - a) / len;
    if (xi > 1e-13 && xi < 1.0 - 1e-13) k.push_back(xi);
  }
  for (int i = 0; i <= p; ++i) k.push_back(1.0);
  const auto space = SplineSpace::open(p, std::move(k));
  return interpolate_curve(space, [&](double x) { return curve.eval(a + len * std::clamp(x, 0.0, 1.0)); });
}

double l2_distance(const std::function<Vec2(double)>& f, const std::function<Vec2(double)>& g,
                   const std::vector<double>& breaks, int pointsPerPiece) {
  std::vector<double> t, w;
  append_gauss_points(breaks, pointsPerPiece, t, w);
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += w[i] * (f(t[i]) - g(t[i])).squaredNorm();
  return std::sqrt(s);
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::Fitting: return "fitting";
    case ErrorCode::QuasiNormal: return "quasi-normal";
    case ErrorCode::Offset: return "offset";
    case ErrorCode::RingFit: return "ring-fit";
    case ErrorCode::Corner: return "corner";
    case ErrorCode::Cover: return "cover";
    case ErrorCode::Assembly: return "assembly";
    case ErrorCode::Solve: return "solve";
    case ErrorCode::Format: return "format";
  }
  return "unknown";
}

}  // namespace oodp
