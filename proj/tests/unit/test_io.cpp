// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/io.hpp"
#include "oodp/pipeline.hpp"
#include "oodp/presets.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <regex>

namespace oodp {
namespace {

const char* kCircle = R"({
  "format": "oodp-geometry",
  "version": 1,
  "boundary": {
    "space": {"degree": 2, "periodic": true, "knots": [0, 0.25, 0.5, 0.75]},
    "control_points": [[1, -1], [1, 1], [-1, 1], [-1, -1]]
  }
})";

std::string format_error(const std::string& text) {
  try {
    parse_geometry(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Format);
    return e.what();
  }
  ADD_FAILURE() << "no error for: " << text;
  return {};
}

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

TEST(GeometryFormat, MinimalFileGetsDefaults) {
  const GeometryFile g = parse_geometry(kCircle);
  EXPECT_EQ(g.version, kGeometryVersion);
  EXPECT_EQ(g.boundary.space().degree(), 2);
  EXPECT_EQ(g.boundary.coefs().size(), 4u);
  EXPECT_TRUE(g.corners.empty());
  EXPECT_EQ(g.quasiNormal, QuasiNormalKind::CurveNormal);
  EXPECT_EQ(g.offset.c, OffsetParams{}.c);
  EXPECT_EQ(g.offset.d, OffsetParams{}.d);
  EXPECT_EQ(g.solve.degrees, SolveParams{}.degrees);
  EXPECT_FALSE(g.ring);
  EXPECT_FALSE(g.cells);
}

TEST(GeometryFormat, DecreasingKnotNamesItsIndex) {
  std::string text = kCircle;
  text.replace(text.find("0.5, 0.75"), 9, "0.8, 0.75");
  const std::string msg = format_error(text);
  EXPECT_NE(msg.find("boundary.space.knots[3]"), std::string::npos) << msg;
  EXPECT_NE(msg.find("knot 3"), std::string::npos) << msg;
}

TEST(GeometryFormat, SyntaxErrorReportsLineAndColumn) {
  std::string text = kCircle;
  text.replace(text.find("\"version\": 1,"), 13, "\"version\": 1,,");
  const std::string msg = format_error(text);
  EXPECT_NE(msg.find("line 3, column"), std::string::npos) << msg;
}

TEST(GeometryFormat, SemanticErrors) {
  auto with = [](const std::string& from, const std::string& to) {
    std::string t = kCircle;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_NE(format_error(with("\"version\": 1", "\"version\": 7")).find("version"), std::string::npos);
  EXPECT_NE(format_error(with("[-1, -1]]", "[-1, -1], [0, 0]]")).find("control_points"), std::string::npos);
  EXPECT_NE(format_error(with("\"version\": 1,", "\"version\": 1, \"extra\": 0,")).find("extra"),
            std::string::npos);
  EXPECT_NE(format_error(with("[1, -1]", "[1, \"nan\"]")).find("control_points"), std::string::npos);
  EXPECT_NE(format_error(with("\"periodic\": true", "\"periodic\": 1")).find("periodic"), std::string::npos);
}

TEST(GeometryFormat, HexFloatStringsAreNumbers) {
  std::string text = kCircle;
  text.replace(text.find("[1, -1]"), 7, "[\"0x1p+0\", \"-0x1p+0\"]");
  const GeometryFile g = parse_geometry(text);
  EXPECT_EQ(g.boundary.coefs()[0], Vec2(1, -1));
}

TEST(GeometryFormat, PeanutRingRoundTripIsExact) {
  GeometryFile g = geometry_from_preset("peanut");
  g.ring = parameterize(g).manifold;
  const std::string text = serialize_geometry(g);
  const GeometryFile back = parse_geometry(text);
  EXPECT_TRUE(same_geometry(g, back));
  EXPECT_EQ(serialize_geometry(back), text);
}

TEST(GeometryFormat, CornerPresetWithCellsRoundTrips) {
  GeometryFile g = geometry_from_preset("square");
  const OmpProblem problem = build_problem(g);
  g.ring = problem.ring;
  g.cells = problem.cells;
  const GeometryFile back = parse_geometry(serialize_geometry(g));
  EXPECT_TRUE(same_geometry(g, back));
  EXPECT_EQ(back.corners, g.corners);
}

TEST(GeometryFormat, RandomFilesRoundTrip) {
  std::mt19937_64 rng(20261019);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const RingManifold peanutRing = parameterize(geometry_from_preset("peanut")).manifold;
  for (int trial = 0; trial < 50; ++trial) {
    GeometryFile g;
    g.name = "random-" + std::to_string(trial);
    const int p = 1 + static_cast<int>(rng() % 5);
    const int n = p + 2 + static_cast<int>(rng() % 20);
    std::vector<double> knots{0.0};
    for (int i = 1; i < n; ++i) knots.push_back((i + 0.8 * (unit(rng) - 0.5)) / n);
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
      const double a = 2 * M_PI * i / n, r = 1.0 + 0.3 * unit(rng);
      pts.emplace_back(r * std::cos(a), r * std::sin(a) * std::exp(10 * unit(rng) - 5));
    }
    g.boundary = SplineCurve(SplineSpace::periodic(p, knots), pts);
    if (trial % 3 == 0) g.corners = {0.0, 0.5 * unit(rng) + 0.25};
    g.quasiNormal = static_cast<QuasiNormalKind>(rng() % 4);
    g.quasiNormalOptions.center = Vec2(unit(rng), -unit(rng));
    g.quasiNormalOptions.smoothingWeight = unit(rng) + 1e-300;
    g.offset.c = 0.01 + 0.98 * unit(rng);
    g.offset.d = std::ldexp(unit(rng) + 0.1, static_cast<int>(rng() % 20) - 10);
    g.offset.alpha = unit(rng) * 1e-3;
    g.offset.beta = unit(rng) / 3.0;
    g.offset.lambda = 0.1 + 0.8 * unit(rng);
    g.offset.maxIterations = 1 + static_cast<int>(rng() % 40);
    g.offset.muSpace = SplineSpace::uniform_periodic(1 + static_cast<int>(rng() % 4), 8 + static_cast<int>(rng() % 60));
    if (trial % 4 == 1) {
      std::vector<double> c(g.offset.muSpace.dim());
      for (auto& x : c) x = 0.5 + unit(rng);
      g.offset.dProfile = ScalarSplineFunction(g.offset.muSpace, c);
    }
    g.cover.cellSize = unit(rng) / 7.0;
    g.cover.overlapFraction = 0.5 * unit(rng);
    if (trial % 2 == 0) g.cover.anchor = Vec2(unit(rng), unit(rng));
    g.solve.exactSolution = trial % 2 ? "sin" : "linear";
    g.solve.degree = 1 + static_cast<int>(rng() % 4);
    g.solve.levels = {0, 1 + static_cast<int>(rng() % 3)};
    if (trial % 5 == 0) g.ring = peanutRing;
    if (trial % 5 < 2) {
      MultiCellDomain cells;
      cells.hc = unit(rng);
      cells.origin = Vec2(unit(rng) - 0.5, unit(rng) - 0.5);
      for (int i = -2; i < 3; ++i)
        for (int j = -2; j < 3; ++j)
          if (rng() % 2) cells.cells.push_back({i, j});
      g.cells = cells;
    }
    const std::string text = serialize_geometry(g);
    const GeometryFile back = parse_geometry(text);
    EXPECT_TRUE(same_geometry(g, back)) << "trial " << trial;
    EXPECT_EQ(serialize_geometry(back), text) << "trial " << trial;
  }
}

TEST(GeometryFormat, ShortestDoubleRoundTrips) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    double x;
    const std::uint64_t bits = rng();
    std::memcpy(&x, &bits, sizeof x);
    if (!std::isfinite(x)) continue;
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(GeometryFormat, PresetsProduceValidFiles) {
  for (const auto& name : preset_names()) {
    const GeometryFile g = geometry_from_preset(name);
    EXPECT_EQ(g.name, name);
    EXPECT_TRUE(same_geometry(g, parse_geometry(serialize_geometry(g)))) << name;
  }
  EXPECT_THROW(geometry_from_preset("nope"), Error);
}

class SvgTest : public ::testing::Test {
 protected:
  void SetUp() override {
    g_ = geometry_from_preset("circle");
    ring_ = parameterize(g_).manifold;
    cells_.hc = 0.2;
    cells_.origin = Vec2(-0.3, -0.3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cells_.cells.push_back({i, j});
  }
  GeometryFile g_;
  RingManifold ring_;
  MultiCellDomain cells_;
};

TEST_F(SvgTest, ElementCountsByClass) {
  RenderSpec spec;
  const std::string svg = render_svg(g_.boundary, &ring_, &cells_, nullptr, spec);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_EQ(count(svg, "class=\"boundary\""), 1);
  EXPECT_EQ(count(svg, "class=\"inner\""), 1);
  EXPECT_EQ(count(svg, "class=\"cell\""), 9);
  const int patches = static_cast<int>(ring_.patches.size());
  EXPECT_EQ(count(svg, "class=\"isoline\""), patches * (spec.isolinesAlong + spec.isolinesAcross + 2));
  EXPECT_EQ(count(svg, "class=\"sample\""), 0);
}

TEST_F(SvgTest, RingOnlyWithoutCells) {
  const MultiCellDomain empty;
  const std::string a = render_svg(g_.boundary, &ring_, nullptr, nullptr);
  const std::string b = render_svg(g_.boundary, &ring_, &empty, nullptr);
  EXPECT_EQ(count(a, "class=\"cell\""), 0);
  EXPECT_EQ(count(b, "class=\"cell\""), 0);
  EXPECT_EQ(count(a, "class=\"inner\""), 1);
  const std::string bare = render_svg(g_.boundary, nullptr, nullptr, nullptr);
  EXPECT_EQ(count(bare, "class=\"isoline\""), 0);
  EXPECT_EQ(count(bare, "class=\"boundary\""), 1);
}

TEST_F(SvgTest, DeterministicAndFinite) {
  const std::string a = render_svg(g_.boundary, &ring_, &cells_, nullptr);
  EXPECT_EQ(a, render_svg(g_.boundary, &ring_, &cells_, nullptr));
  const std::regex number(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|nan|inf)", std::regex::icase);
  for (auto it = std::sregex_iterator(a.begin(), a.end(), number); it != std::sregex_iterator(); ++it) {
    const std::string s = it->str();
    ASSERT_NE(s, "nan");
    ASSERT_NE(s, "inf");
  }
  EXPECT_EQ(a.find("nan"), std::string::npos);
  EXPECT_EQ(a.find("inf\""), std::string::npos);
}

TEST_F(SvgTest, FieldSamplesAreDrawn) {
  std::vector<FieldSample> field{{Vec2(0, 0), 1.0, "cells"}, {Vec2(0.9, 0), -1.0, "ring"}};
  const std::string svg = render_svg(g_.boundary, &ring_, &cells_, &field);
  EXPECT_EQ(count(svg, "class=\"sample\""), 2);
}

TEST(RenderSpecTest, Validate) {
  RenderSpec spec;
  EXPECT_NO_THROW(spec.validate());
  spec.width = 0;
  EXPECT_THROW(spec.validate(), Error);
  spec = RenderSpec{};
  spec.isolinesAlong = -1;
  EXPECT_THROW(spec.validate(), Error);
}

TEST(Csv, Formats) {
  ConvergenceReport report;
  report.rows.push_back({2, 0, 0.5, 100, 1e-3, 2e-2, 3e-4, true, ""});
  report.rows.push_back({2, 1, 0.25, 300, 1.25e-4, 5e-3, 1e-5, true, ""});
  report.slopes[2] = {3.0, 2.0};
  const std::string conv = convergence_csv(report);
  EXPECT_EQ(conv.substr(0, conv.find('\n')), "degree,level,h,dofs,l2,h1,overlap,ok");
  EXPECT_EQ(count(conv, "\n"), 3);
  EXPECT_NE(conv.find("2,1,0.25,300,0.000125,0.005,1e-05,1"), std::string::npos) << conv;
  const std::string slopes = slopes_csv(report);
  EXPECT_EQ(slopes, "degree,l2_slope,h1_slope\n2,3,2\n");
  const std::string field = field_csv({{Vec2(0.5, -1), 2.0, "ring"}});
  EXPECT_EQ(field, "x,y,value,subdomain\n0.5,-1,2,ring\n");
}

TEST(OffsetLog, OneObjectPerIteration) {
  const auto ring = parameterize(geometry_from_preset("b612"));
  const auto log = offset_log(ring);
  ASSERT_GE(log.size(), 2u);
  const std::string json = offset_log_json(log);
  EXPECT_EQ(json.front(), '[');
  EXPECT_EQ(count(json, "\"iteration\""), static_cast<int>(log.size()));
}

}  // namespace
}  // namespace oodp
