// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/io.hpp"

#include "oodp/presets.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace oodp {

using Json = nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

namespace {

constexpr const char* kFormatTag = "oodp-geometry";

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::Format, (path.empty() ? std::string("document") : path) + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

/// Object reader that rejects unknown keys.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }
  ~Reader() = default;

  const Json* optional(const std::string& key) {
    seen_.push_back(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const Json& required(const std::string& key) {
    const Json* v = optional(key);
    if (!v) fail(path_, "missing field \"" + key + "\"");
    return *v;
  }
  std::string path(const std::string& key) const { return join(path_, key); }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) fail(join(path_, it.key()), "unknown field");
  }

 private:
  const Json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

double get_double(const Json& v, const std::string& path) {
  double x = 0.0;
  if (v.is_number()) {
    x = v.get<double>();
  } else if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    char* end = nullptr;
    x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) fail(path, "cannot read \"" + s + "\" as a number");
  } else {
    fail(path, "expected a number");
  }
  if (!std::isfinite(x)) fail(path, "number is not finite");
  return x;
}

int get_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < -(1LL << 30) || x > (1LL << 30)) fail(path, "integer out of range");
  return static_cast<int>(x);
}

bool get_bool(const Json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

const Json& get_array(const Json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

Vec2 get_vec2(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected a pair [x, y]");
  return {get_double(v[0], index(path, 0)), get_double(v[1], index(path, 1))};
}

std::vector<double> get_doubles(const Json& v, const std::string& path) {
  std::vector<double> out;
  const auto& a = get_array(v, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(get_double(a[i], index(path, i)));
  return out;
}

std::vector<int> get_ints(const Json& v, const std::string& path) {
  std::vector<int> out;
  const auto& a = get_array(v, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(get_int(a[i], index(path, i)));
  return out;
}

std::vector<Vec2> get_points(const Json& v, const std::string& path) {
  std::vector<Vec2> out;
  const auto& a = get_array(v, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(get_vec2(a[i], index(path, i)));
  return out;
}

Json vec2_json(const Vec2& p) { return Json::array({p.x(), p.y()}); }

Json points_json(const std::vector<Vec2>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(vec2_json(p));
  return a;
}

// --- spline spaces and curves ---

SplineSpace read_space(const Json& j, const std::string& path) {
  Reader r(j, path);
  const int p = get_int(r.required("degree"), r.path("degree"));
  const bool periodic = r.optional("periodic") ? get_bool(*r.optional("periodic"), r.path("periodic")) : false;
  const auto knots = get_doubles(r.required("knots"), r.path("knots"));
  r.finish();
  const std::string kp = join(path, "knots");
  if (p < 1 || p > 10) fail(join(path, "degree"), "degree must be between 1 and 10");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (knots[i] < knots[i - 1]) {
      std::ostringstream os;
      os << "knot " << i << " (" << format_double(knots[i]) << ") is smaller than knot " << i - 1 << " ("
         << format_double(knots[i - 1]) << ")";
      fail(index(kp, i), os.str());
    }
  if (periodic) {
    if (knots.empty() || knots.front() != 0.0) fail(kp, "periodic knots must start at 0");
    if (knots.back() >= 1.0) fail(index(kp, knots.size() - 1), "periodic knots must lie in [0, 1)");
  } else {
    const auto n = knots.size();
    if (n < static_cast<std::size_t>(2 * p + 2)) fail(kp, "an open space needs at least 2(p+1) knots");
    for (int k = 1; k <= p; ++k) {
      if (knots[k] != knots[0]) fail(index(kp, k), "open knot vectors must start with p+1 equal knots");
      if (knots[n - 1 - k] != knots[n - 1]) fail(index(kp, n - 1 - k), "open knot vectors must end with p+1 equal knots");
    }
    if (!(knots.back() > knots.front())) fail(kp, "knot vector has zero length");
  }
  try {
    return periodic ? SplineSpace::periodic(p, knots) : SplineSpace::open(p, knots);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

Json space_json(const SplineSpace& s) {
  Json j;
  j["degree"] = s.degree();
  j["periodic"] = s.is_periodic();
  j["knots"] = s.defining_knots();
  return j;
}

SplineCurve read_curve(const Json& j, const std::string& path) {
  Reader r(j, path);
  auto space = read_space(r.required("space"), r.path("space"));
  auto pts = get_points(r.required("control_points"), r.path("control_points"));
  r.finish();
  if (static_cast<int>(pts.size()) != space.dim()) {
    std::ostringstream os;
    os << "expected " << space.dim() << " control points for this space, got " << pts.size();
    fail(join(path, "control_points"), os.str());
  }
  return SplineCurve(std::move(space), std::move(pts));
}

Json curve_json(const SplineCurve& c) {
  Json j;
  j["space"] = space_json(c.space());
  j["control_points"] = points_json(c.coefs());
  return j;
}

ScalarSplineFunction read_scalar(const Json& j, const std::string& path) {
  Reader r(j, path);
  auto space = read_space(r.required("space"), r.path("space"));
  auto coefs = get_doubles(r.required("coefficients"), r.path("coefficients"));
  r.finish();
  if (static_cast<int>(coefs.size()) != space.dim())
    fail(join(path, "coefficients"), "expected " + std::to_string(space.dim()) + " coefficients");
  return ScalarSplineFunction(std::move(space), std::move(coefs));
}

Json scalar_json(const ScalarSplineFunction& f) {
  Json j;
  j["space"] = space_json(f.space());
  j["coefficients"] = f.coefs();
  return j;
}

// --- sections ---

void read_quasi_normal(const Json& j, const std::string& path, GeometryFile& g) {
  Reader r(j, path);
  if (const Json* v = r.optional("kind")) {
    const auto name = get_string(*v, r.path("kind"));
    try {
      g.quasiNormal = quasi_normal_kind_from_string(name);
    } catch (const Error&) {
      fail(r.path("kind"), "unknown quasi-normal kind \"" + name + "\"");
    }
  }
  auto& o = g.quasiNormalOptions;
  if (const Json* v = r.optional("center")) o.center = get_vec2(*v, r.path("center"));
  if (const Json* v = r.optional("smoothing_weight")) o.smoothingWeight = get_double(*v, r.path("smoothing_weight"));
  if (const Json* v = r.optional("smoothing_spans")) o.smoothingSpans = get_int(*v, r.path("smoothing_spans"));
  if (const Json* v = r.optional("max_retries")) o.maxRetries = get_int(*v, r.path("max_retries"));
  if (const Json* v = r.optional("samples_per_span")) o.samplesPerSpan = get_int(*v, r.path("samples_per_span"));
  r.finish();
  if (!(o.smoothingWeight > 0.0)) fail(r.path("smoothing_weight"), "must be positive");
  if (o.smoothingSpans < 0) fail(r.path("smoothing_spans"), "must be non-negative");
  if (o.maxRetries < 0) fail(r.path("max_retries"), "must be non-negative");
  if (o.samplesPerSpan < 1) fail(r.path("samples_per_span"), "must be positive");
}

void read_offset(const Json& j, const std::string& path, OffsetParams& o) {
  Reader r(j, path);
  if (const Json* v = r.optional("c")) o.c = get_double(*v, r.path("c"));
  if (const Json* v = r.optional("d")) o.d = get_double(*v, r.path("d"));
  if (const Json* v = r.optional("alpha")) o.alpha = get_double(*v, r.path("alpha"));
  if (const Json* v = r.optional("beta")) o.beta = get_double(*v, r.path("beta"));
  if (const Json* v = r.optional("lambda")) o.lambda = get_double(*v, r.path("lambda"));
  if (const Json* v = r.optional("max_iterations")) o.maxIterations = get_int(*v, r.path("max_iterations"));
  if (const Json* v = r.optional("mu_space")) o.muSpace = read_space(*v, r.path("mu_space"));
  if (const Json* v = r.optional("d_profile")) o.dProfile = read_scalar(*v, r.path("d_profile"));
  r.finish();
  try {
    o.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

void read_cover(const Json& j, const std::string& path, CoverParams& c) {
  Reader r(j, path);
  if (const Json* v = r.optional("cell_size")) c.cellSize = get_double(*v, r.path("cell_size"));
  if (const Json* v = r.optional("overlap_fraction")) c.overlapFraction = get_double(*v, r.path("overlap_fraction"));
  if (const Json* v = r.optional("max_halvings")) c.maxHalvings = get_int(*v, r.path("max_halvings"));
  if (const Json* v = r.optional("anchor")) c.anchor = get_vec2(*v, r.path("anchor"));
  r.finish();
  if (c.cellSize < 0.0) fail(r.path("cell_size"), "must be non-negative");
  if (c.overlapFraction < 0.0 || c.overlapFraction >= 1.0) fail(r.path("overlap_fraction"), "must lie in [0, 1)");
  if (c.maxHalvings < 0) fail(r.path("max_halvings"), "must be non-negative");
}

void read_solve(const Json& j, const std::string& path, SolveParams& s) {
  Reader r(j, path);
  if (const Json* v = r.optional("exact_solution")) s.exactSolution = get_string(*v, r.path("exact_solution"));
  if (const Json* v = r.optional("degree")) s.degree = get_int(*v, r.path("degree"));
  if (const Json* v = r.optional("level")) s.level = get_int(*v, r.path("level"));
  if (const Json* v = r.optional("degrees")) s.degrees = get_ints(*v, r.path("degrees"));
  if (const Json* v = r.optional("levels")) s.levels = get_ints(*v, r.path("levels"));
  if (const Json* v = r.optional("along_base")) s.alongBase = get_int(*v, r.path("along_base"));
  if (const Json* v = r.optional("radial_base")) s.radialBase = get_int(*v, r.path("radial_base"));
  if (const Json* v = r.optional("cell_base")) s.cellBase = get_int(*v, r.path("cell_base"));
  r.finish();
  try {
    make_exact_solution(s.exactSolution);
  } catch (const Error&) {
    fail(r.path("exact_solution"), "unknown exact solution \"" + s.exactSolution + "\"");
  }
  auto check_degree = [&](int p, const std::string& at) {
    if (p < 1 || p > 8) fail(at, "degree must be between 1 and 8");
  };
  auto check_level = [&](int l, const std::string& at) {
    if (l < 0 || l > 8) fail(at, "level must be between 0 and 8");
  };
  check_degree(s.degree, r.path("degree"));
  check_level(s.level, r.path("level"));
  for (std::size_t i = 0; i < s.degrees.size(); ++i) check_degree(s.degrees[i], index(r.path("degrees"), i));
  for (std::size_t i = 0; i < s.levels.size(); ++i) check_level(s.levels[i], index(r.path("levels"), i));
  if (s.alongBase < 1) fail(r.path("along_base"), "must be positive");
  if (s.radialBase < 0) fail(r.path("radial_base"), "must be non-negative");
  if (s.cellBase < 0) fail(r.path("cell_base"), "must be non-negative");
}

RingManifold read_ring(const Json& j, const std::string& path) {
  Reader r(j, path);
  RingManifold m;
  const auto& patches = get_array(r.required("patches"), r.path("patches"));
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const std::string pp = index(r.path("patches"), i);
    Reader pr(patches[i], pp);
    ManifoldPatch mp;
    const auto kind = get_string(pr.required("kind"), pr.path("kind"));
    try {
      mp.kind = patch_kind_from_string(kind);
    } catch (const Error&) {
      fail(pr.path("kind"), "unknown patch kind \"" + kind + "\"");
    }
    const auto& roles = get_array(pr.required("roles"), pr.path("roles"));
    if (roles.size() != 4) fail(pr.path("roles"), "expected 4 edge roles");
    for (std::size_t e = 0; e < 4; ++e) {
      const auto name = get_string(roles[e], index(pr.path("roles"), e));
      try {
        mp.roles[e] = edge_role_from_string(name);
      } catch (const Error&) {
        fail(index(pr.path("roles"), e), "unknown edge role \"" + name + "\"");
      }
    }
    auto u = read_space(pr.required("u"), pr.path("u"));
    auto v = read_space(pr.required("v"), pr.path("v"));
    auto net = get_points(pr.required("net"), pr.path("net"));
    pr.finish();
    if (static_cast<int>(net.size()) != u.dim() * v.dim())
      fail(pr.path("net"), "expected " + std::to_string(u.dim() * v.dim()) + " control points");
    mp.patch = TensorPatch(std::move(u), std::move(v), std::move(net));
    m.patches.push_back(std::move(mp));
  }
  if (const Json* v = r.optional("interfaces")) {
    const auto& a = get_array(*v, r.path("interfaces"));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string ip = index(r.path("interfaces"), i);
      Reader ir(a[i], ip);
      Interface f;
      const auto sa = get_ints(ir.required("a"), ir.path("a"));
      const auto sb = get_ints(ir.required("b"), ir.path("b"));
      if (const Json* rv = ir.optional("reversed")) f.reversed = get_bool(*rv, ir.path("reversed"));
      ir.finish();
      for (const auto& [side, at] : {std::pair{sa, ir.path("a")}, std::pair{sb, ir.path("b")}}) {
        if (side.size() != 2) fail(at, "expected [patch, edge]");
        if (side[0] < 0 || side[0] >= static_cast<int>(m.patches.size())) fail(index(at, 0), "patch index out of range");
        if (side[1] < 0 || side[1] > 3) fail(index(at, 1), "edge index must be 0..3");
      }
      f.patchA = sa[0];
      f.edgeA = sa[1];
      f.patchB = sb[0];
      f.edgeB = sb[1];
      m.interfaces.push_back(f);
    }
  }
  r.finish();
  return m;
}

Json ring_json(const RingManifold& m) {
  Json j;
  Json patches = Json::array();
  for (const auto& mp : m.patches) {
    Json p;
    p["kind"] = to_string(mp.kind);
    Json roles = Json::array();
    for (const auto role : mp.roles) roles.push_back(to_string(role));
    p["roles"] = roles;
    p["u"] = space_json(mp.patch.space_u());
    p["v"] = space_json(mp.patch.space_v());
    p["net"] = points_json(mp.patch.net());
    patches.push_back(p);
  }
  j["patches"] = patches;
  Json ifs = Json::array();
  for (const auto& f : m.interfaces) {
    Json i;
    i["a"] = Json::array({f.patchA, f.edgeA});
    i["b"] = Json::array({f.patchB, f.edgeB});
    i["reversed"] = f.reversed;
    ifs.push_back(i);
  }
  j["interfaces"] = ifs;
  return j;
}

MultiCellDomain read_cells(const Json& j, const std::string& path) {
  Reader r(j, path);
  MultiCellDomain d;
  d.hc = get_double(r.required("hc"), r.path("hc"));
  if (const Json* v = r.optional("origin")) d.origin = get_vec2(*v, r.path("origin"));
  const auto& a = get_array(r.required("cells"), r.path("cells"));
  r.finish();
  if (!(d.hc > 0.0)) fail(r.path("hc"), "cell size must be positive");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto c = get_ints(a[i], index(r.path("cells"), i));
    if (c.size() != 2) fail(index(r.path("cells"), i), "expected [i, j]");
    const CellIndex ci{c[0], c[1]};
    if (!d.cells.empty() && !(d.cells.back() < ci))
      fail(index(r.path("cells"), i), "cells must be sorted lexicographically without duplicates");
    d.cells.push_back(ci);
  }
  return d;
}

Json cells_json(const MultiCellDomain& d) {
  Json j;
  j["hc"] = d.hc;
  j["origin"] = vec2_json(d.origin);
  Json a = Json::array();
  for (const auto& c : d.cells) a.push_back(Json::array({c[0], c[1]}));
  j["cells"] = a;
  return j;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// --- bitwise comparison ---

bool same(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }
bool same(const Vec2& a, const Vec2& b) { return same(a.x(), b.x()) && same(a.y(), b.y()); }
template <class T>
bool same(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(a[i], b[i])) return false;
  return true;
}
bool same(const SplineSpace& a, const SplineSpace& b) {
  return a.degree() == b.degree() && a.is_periodic() == b.is_periodic() && same(a.defining_knots(), b.defining_knots());
}
template <class C>
bool same(const SplineFunction<C>& a, const SplineFunction<C>& b) {
  return same(a.space(), b.space()) && same(a.coefs(), b.coefs());
}

}  // namespace

GeometryFile parse_geometry(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::ostringstream os;
    os << "syntax error at line " << line << ", column " << col;
    const std::string what = e.what();
    const auto pos = what.find("syntax error");
    if (pos != std::string::npos) os << ": " << what.substr(pos);
    throw Error(ErrorCode::Format, os.str());
  }
  GeometryFile g;
  Reader r(doc, "");
  if (const Json* v = r.optional("format"))
    if (get_string(*v, "format") != kFormatTag) fail("format", std::string("expected \"") + kFormatTag + "\"");
  g.version = get_int(r.required("version"), "version");
  if (g.version != kGeometryVersion) fail("version", "unsupported version " + std::to_string(g.version));
  if (const Json* v = r.optional("name")) g.name = get_string(*v, "name");
  g.boundary = read_curve(r.required("boundary"), "boundary");
  if (!g.boundary.space().is_periodic()) fail("boundary.space.periodic", "the boundary must be a closed periodic curve");
  if (const Json* v = r.optional("corners")) {
    g.corners = get_doubles(*v, "corners");
    for (std::size_t i = 0; i < g.corners.size(); ++i) {
      if (g.corners[i] < 0.0 || g.corners[i] >= 1.0) fail(index("corners", i), "corner parameters must lie in [0, 1)");
      if (i > 0 && g.corners[i] <= g.corners[i - 1]) fail(index("corners", i), "corner parameters must increase");
    }
  }
  if (const Json* v = r.optional("quasi_normal")) read_quasi_normal(*v, "quasi_normal", g);
  if (const Json* v = r.optional("offset")) read_offset(*v, "offset", g.offset);
  if (const Json* v = r.optional("cover")) read_cover(*v, "cover", g.cover);
  if (const Json* v = r.optional("solve")) read_solve(*v, "solve", g.solve);
  if (const Json* v = r.optional("ring")) g.ring = read_ring(*v, "ring");
  if (const Json* v = r.optional("cells")) g.cells = read_cells(*v, "cells");
  r.finish();
  return g;
}

std::string serialize_geometry(const GeometryFile& g) {
  Json j;
  j["format"] = kFormatTag;
  j["version"] = g.version;
  if (!g.name.empty()) j["name"] = g.name;
  j["boundary"] = curve_json(g.boundary);
  if (!g.corners.empty()) j["corners"] = g.corners;
  Json q;
  q["kind"] = to_string(g.quasiNormal);
  q["center"] = vec2_json(g.quasiNormalOptions.center);
  q["smoothing_weight"] = g.quasiNormalOptions.smoothingWeight;
  q["smoothing_spans"] = g.quasiNormalOptions.smoothingSpans;
  q["max_retries"] = g.quasiNormalOptions.maxRetries;
  q["samples_per_span"] = g.quasiNormalOptions.samplesPerSpan;
  j["quasi_normal"] = q;
  Json o;
  o["c"] = g.offset.c;
  o["d"] = g.offset.d;
  o["alpha"] = g.offset.alpha;
  o["beta"] = g.offset.beta;
  o["lambda"] = g.offset.lambda;
  o["max_iterations"] = g.offset.maxIterations;
  o["mu_space"] = space_json(g.offset.muSpace);
  if (g.offset.dProfile) o["d_profile"] = scalar_json(*g.offset.dProfile);
  j["offset"] = o;
  Json c;
  c["cell_size"] = g.cover.cellSize;
  c["overlap_fraction"] = g.cover.overlapFraction;
  c["max_halvings"] = g.cover.maxHalvings;
  if (g.cover.anchor) c["anchor"] = vec2_json(*g.cover.anchor);
  j["cover"] = c;
  Json s;
  s["exact_solution"] = g.solve.exactSolution;
  s["degree"] = g.solve.degree;
  s["level"] = g.solve.level;
  s["degrees"] = g.solve.degrees;
  s["levels"] = g.solve.levels;
  s["along_base"] = g.solve.alongBase;
  s["radial_base"] = g.solve.radialBase;
  s["cell_base"] = g.solve.cellBase;
  j["solve"] = s;
  if (g.ring) j["ring"] = ring_json(*g.ring);
  if (g.cells) j["cells"] = cells_json(*g.cells);
  return j.dump(1) + "\n";
}

GeometryFile read_geometry_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_geometry(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  }
}

GeometryFile geometry_from_preset(const std::string& name) {
  const Preset p = make_preset(name);
  GeometryFile g;
  g.name = p.name;
  g.boundary = p.boundary;
  if (p.hasCorners)
    for (const auto& c : detect_corners(p.boundary).corners) g.corners.push_back(c.t);
  g.quasiNormal = p.quasiNormal;
  g.quasiNormalOptions = p.quasiNormalOptions;
  g.offset = p.offset;
  g.cover.cellSize = p.cellSize;
  g.solve.exactSolution = p.exactSolution;
  g.solve.alongBase = p.alongBase;
  g.solve.radialBase = p.radialBase;
  g.solve.cellBase = p.cellBase;
  g.solve.degrees = p.degrees;
  g.solve.levels = p.levels;
  g.solve.degree = p.degrees.front();
  return g;
}

bool same_geometry(const GeometryFile& a, const GeometryFile& b) {
  if (a.version != b.version || a.name != b.name || !same(a.boundary, b.boundary) || !same(a.corners, b.corners))
    return false;
  const auto &qa = a.quasiNormalOptions, &qb = b.quasiNormalOptions;
  if (a.quasiNormal != b.quasiNormal || !same(qa.center, qb.center) || !same(qa.smoothingWeight, qb.smoothingWeight) ||
      qa.smoothingSpans != qb.smoothingSpans || qa.maxRetries != qb.maxRetries || qa.samplesPerSpan != qb.samplesPerSpan)
    return false;
  const auto &oa = a.offset, &ob = b.offset;
  if (!same(oa.c, ob.c) || !same(oa.d, ob.d) || !same(oa.alpha, ob.alpha) || !same(oa.beta, ob.beta) ||
      !same(oa.lambda, ob.lambda) || oa.maxIterations != ob.maxIterations || !same(oa.muSpace, ob.muSpace) ||
      oa.dProfile.has_value() != ob.dProfile.has_value() || (oa.dProfile && !same(*oa.dProfile, *ob.dProfile)))
    return false;
  const auto &ca = a.cover, &cb = b.cover;
  if (!same(ca.cellSize, cb.cellSize) || !same(ca.overlapFraction, cb.overlapFraction) ||
      ca.maxHalvings != cb.maxHalvings || ca.anchor.has_value() != cb.anchor.has_value() ||
      (ca.anchor && !same(*ca.anchor, *cb.anchor)))
    return false;
  const auto &sa = a.solve, &sb = b.solve;
  if (sa.exactSolution != sb.exactSolution || sa.degree != sb.degree || sa.level != sb.level ||
      sa.degrees != sb.degrees || sa.levels != sb.levels || sa.alongBase != sb.alongBase ||
      sa.radialBase != sb.radialBase || sa.cellBase != sb.cellBase)
    return false;
  if (a.ring.has_value() != b.ring.has_value() || a.cells.has_value() != b.cells.has_value()) return false;
  if (a.ring) {
    const auto &ra = *a.ring, &rb = *b.ring;
    if (ra.patches.size() != rb.patches.size() || ra.interfaces.size() != rb.interfaces.size()) return false;
    for (std::size_t i = 0; i < ra.patches.size(); ++i) {
      const auto &pa = ra.patches[i], &pb = rb.patches[i];
      if (pa.kind != pb.kind || pa.roles != pb.roles || !same(pa.patch.space_u(), pb.patch.space_u()) ||
          !same(pa.patch.space_v(), pb.patch.space_v()) || !same(pa.patch.net(), pb.patch.net()))
        return false;
    }
    for (std::size_t i = 0; i < ra.interfaces.size(); ++i) {
      const auto &fa = ra.interfaces[i], &fb = rb.interfaces[i];
      if (fa.patchA != fb.patchA || fa.edgeA != fb.edgeA || fa.patchB != fb.patchB || fa.edgeB != fb.edgeB ||
          fa.reversed != fb.reversed)
        return false;
    }
  }
  if (a.cells) {
    const auto &da = *a.cells, &db = *b.cells;
    if (!same(da.hc, db.hc) || !same(da.origin, db.origin) || da.cells != db.cells) return false;
  }
  return true;
}

// --- field sampling and rendering ---

std::vector<FieldSample> sample_field(const CoupledSolution& solution, const OmpProblem& problem, int n) {
  std::vector<FieldSample> out;
  if (n < 2) return out;
  const auto box = bounding_box(problem.omega);
  const PolygonLocator omega(problem.omega);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec2 x(box.lo.x() + (box.hi.x() - box.lo.x()) * i / (n - 1),
                   box.lo.y() + (box.hi.y() - box.lo.y()) * j / (n - 1));
      if (omega.contains(x) != Containment::Inside) continue;
      if (const auto u = solution.eval_ring(x)) {
        out.push_back({x, *u, "ring"});
      } else if (problem.cells.covers(x)) {
        out.push_back({x, solution.eval_cells(x), "cells"});
      }
    }
  return out;
}

void RenderSpec::validate() const {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidInput, "canvas size must be positive");
  if (isolinesAlong < 0 || isolinesAcross < 0 || curveSamples < 3)
    throw Error(ErrorCode::InvalidInput, "isoline and sample counts must be non-negative");
}

namespace {

class Canvas {
 public:
  Canvas(const BoundingBox& box, const RenderSpec& spec) : spec_(spec) {
    const double margin = 0.05 * std::max(spec.width, spec.height);
    const Vec2 ext = (box.hi - box.lo).cwiseMax(Vec2::Constant(1e-12));
    scale_ = std::min((spec.width - 2 * margin) / ext.x(), (spec.height - 2 * margin) / ext.y());
    offset_ = Vec2(0.5 * (spec.width - scale_ * ext.x()), 0.5 * (spec.height - scale_ * ext.y()));
    lo_ = box.lo;
    hiY_ = box.hi.y();
  }
  Vec2 map(const Vec2& p) const {
    return Vec2(offset_.x() + scale_ * (p.x() - lo_.x()), offset_.y() + scale_ * (hiY_ - p.y()));
  }
  double scale() const { return scale_; }

  static std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", std::abs(x) < 5e-3 ? 0.0 : x);
    return buf;
  }
  /// Polyline points; non-finite points are dropped.
  std::string points(const std::vector<Vec2>& pts) const {
    std::string s;
    for (const auto& p : pts) {
      const Vec2 q = map(p);
      if (!std::isfinite(q.x()) || !std::isfinite(q.y())) continue;
      if (!s.empty()) s += ' ';
      s += num(q.x()) + "," + num(q.y());
    }
    return s;
  }

 private:
  const RenderSpec& spec_;
  double scale_ = 1.0;
  Vec2 offset_, lo_;
  double hiY_ = 0.0;
};

std::string heat_color(double t) {
  t = std::clamp(std::isfinite(t) ? t : 0.5, 0.0, 1.0);
  // blue -> white -> red
  const double r = t < 0.5 ? 2 * t : 1.0, b = t < 0.5 ? 1.0 : 2 * (1 - t), g = 1.0 - std::abs(2 * t - 1);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(255 * r)),
                static_cast<int>(std::lround(255 * g)), static_cast<int>(std::lround(255 * b)));
  return buf;
}

}  // namespace

std::string render_svg(const SplineCurve& boundary, const RingManifold* ring, const MultiCellDomain* cells,
                       const std::vector<FieldSample>* field, const RenderSpec& spec) {
  spec.validate();
  std::vector<Vec2> outer;
  for (int k = 0; k < spec.curveSamples; ++k) {
    const double t = boundary.space().begin() + (boundary.space().end() - boundary.space().begin()) * k / spec.curveSamples;
    outer.push_back(boundary.eval(t));
  }
  BoundingBox box;
  for (const auto& p : outer)
    if (std::isfinite(p.x()) && std::isfinite(p.y())) box.add(p);
  if (cells)
    for (const auto& c : cells->cells) {
      box.add(cells->cell_lo(c));
      box.add(cells->cell_hi(c));
    }
  const Canvas cv(box, spec);
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << spec.width << "\" height=\""
     << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n"
     << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height
     << "\" fill=\"#ffffff\"/>\n";

  if (field && !field->empty()) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : *field)
      if (std::isfinite(s.value)) {
        lo = std::min(lo, s.value);
        hi = std::max(hi, s.value);
      }
    const double range = hi > lo ? hi - lo : 1.0;
    os << "<g class=\"field\">\n";
    for (const auto& s : *field) {
      const Vec2 q = cv.map(s.x);
      if (!std::isfinite(q.x()) || !std::isfinite(q.y()) || !std::isfinite(s.value)) continue;
      os << "<circle class=\"sample\" cx=\"" << Canvas::num(q.x()) << "\" cy=\"" << Canvas::num(q.y())
         << "\" r=\"2.00\" fill=\"" << heat_color((s.value - lo) / range) << "\"/>\n";
    }
    os << "</g>\n";
  }

  if (cells) {
    os << "<g class=\"cells\" fill=\"" << spec.cellColor << "\" fill-opacity=\"0.12\" stroke=\"" << spec.cellColor
       << "\" stroke-width=\"1\">\n";
    for (const auto& c : cells->cells) {
      const Vec2 a = cv.map(Vec2(cells->cell_lo(c).x(), cells->cell_hi(c).y()));
      const double w = cells->hc * cv.scale();
      os << "<rect class=\"cell\" x=\"" << Canvas::num(a.x()) << "\" y=\"" << Canvas::num(a.y()) << "\" width=\""
         << Canvas::num(w) << "\" height=\"" << Canvas::num(w) << "\"/>\n";
    }
    os << "</g>\n";
  }

  if (ring) {
    os << "<g class=\"ring\" fill=\"none\" stroke=\"" << spec.ringColor << "\" stroke-width=\"0.8\">\n";
    constexpr int kIsoSamples = 48;
    for (const auto& mp : ring->patches) {
      const auto& P = mp.patch;
      const double u0 = P.space_u().begin(), u1 = P.space_u().end();
      const double v0 = P.space_v().begin(), v1 = P.space_v().end();
      for (int k = 0; k <= spec.isolinesAcross; ++k) {
        const double v = v0 + (v1 - v0) * k / std::max(1, spec.isolinesAcross);
        std::vector<Vec2> pts;
        for (int s = 0; s <= kIsoSamples; ++s) pts.push_back(P.eval(u0 + (u1 - u0) * s / kIsoSamples, v));
        os << "<polyline class=\"isoline\" points=\"" << cv.points(pts) << "\"/>\n";
      }
      for (int k = 0; k <= spec.isolinesAlong; ++k) {
        const double u = u0 + (u1 - u0) * k / std::max(1, spec.isolinesAlong);
        std::vector<Vec2> pts;
        for (int s = 0; s <= kIsoSamples; ++s) pts.push_back(P.eval(u, v0 + (v1 - v0) * s / kIsoSamples));
        os << "<polyline class=\"isoline\" points=\"" << cv.points(pts) << "\"/>\n";
      }
    }
    os << "</g>\n";
    const auto inner = ring->inner_boundary(64);
    os << "<polygon class=\"inner\" fill=\"none\" stroke=\"" << spec.ringColor << "\" stroke-width=\"2\" points=\""
       << cv.points(inner.vertices) << "\"/>\n";
  }

  os << "<polygon class=\"boundary\" fill=\"none\" stroke=\"" << spec.boundaryColor
     << "\" stroke-width=\"2\" points=\"" << cv.points(outer) << "\"/>\n";
  os << "</svg>\n";
  return os.str();
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "degree,level,h,dofs,l2,h1,overlap,ok\n";
  for (const auto& r : report.rows)
    os << r.degree << ',' << r.level << ',' << format_double(r.h) << ',' << r.dofs << ',' << format_double(r.l2) << ','
       << format_double(r.h1) << ',' << format_double(r.overlap) << ',' << (r.ok ? 1 : 0) << '\n';
  return os.str();
}

std::string slopes_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "degree,l2_slope,h1_slope\n";
  for (const auto& [p, s] : report.slopes) os << p << ',' << format_double(s.first) << ',' << format_double(s.second) << '\n';
  return os.str();
}

std::string field_csv(const std::vector<FieldSample>& samples) {
  std::ostringstream os;
  os << "x,y,value,subdomain\n";
  for (const auto& s : samples)
    os << format_double(s.x.x()) << ',' << format_double(s.x.y()) << ',' << format_double(s.value) << ','
       << s.subdomain << '\n';
  return os.str();
}

std::string offset_log_json(const std::vector<OffsetIteration>& log) {
  Json a = Json::array();
  for (const auto& it : log) {
    Json j;
    j["iteration"] = it.iteration;
    j["d"] = it.d;
    j["alpha"] = it.alpha;
    j["beta"] = it.beta;
    j["valid"] = it.report.valid();
    j["regular"] = it.report.regular;
    j["simple"] = it.report.simple;
    j["inside"] = it.report.inside;
    j["ccw"] = it.report.ccw;
    j["failed_gates"] = it.report.failed_gates();
    if (!it.report.regular) j["first_irregular_param"] = it.report.firstIrregularParam;
    if (std::isfinite(it.report.minMargin)) j["min_margin"] = it.report.minMargin;
    if (it.report.crossing) j["crossing"] = vec2_json(it.report.crossing->point);
    a.push_back(j);
  }
  return a.dump(1) + "\n";
}

}  // namespace oodp
