// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

#include "oodp/io.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace oodp {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int status = -1;
  std::string out;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("oodp_cli_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  CliRun run(const std::string& args) const {
    const std::string log = (root_ / "log.txt").string();
    const std::string cmd = std::string(OODP_CLI) + " " + args + " > " + log + " 2>&1";
    const int raw = std::system(cmd.c_str());
    CliRun r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = read(log);
    return r;
  }
  std::string dir(const std::string& name) const { return (root_ / name).string(); }
  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }
  static std::vector<std::string> listing(const fs::path& d) {
    std::vector<std::string> names;
    if (!fs::exists(d)) return names;
    for (const auto& e : fs::directory_iterator(d)) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
  }

  fs::path root_;
};

TEST_F(CliTest, CircleEndToEnd) {
  const std::string p = dir("p"), c = dir("c"), s = dir("s"), r = dir("r");
  CliRun a = run("parameterize --preset circle --output " + p);
  ASSERT_EQ(a.status, 0) << a.out;
  EXPECT_EQ(listing(p), (std::vector<std::string>{"geometry.json", "geometry.svg", "offset_log.json"}));
  a = run("cover --input " + p + "/geometry.json --output " + c);
  ASSERT_EQ(a.status, 0) << a.out;
  EXPECT_EQ(listing(c), (std::vector<std::string>{"cover_report.json", "geometry.json", "geometry.svg"}));
  a = run("solve --input " + c + "/geometry.json --degree 2 --level 0 --samples 16 --output " + s);
  ASSERT_EQ(a.status, 0) << a.out;
  EXPECT_EQ(listing(s), (std::vector<std::string>{"field.csv", "solution.svg", "solve_report.json"}));
  const std::string field = read(fs::path(s) / "field.csv");
  const auto lines = std::count(field.begin(), field.end(), '\n');
  EXPECT_GT(lines, 100);
  EXPECT_LE(lines, 1 + 16 * 16);
  a = run("render --input " + c + "/geometry.json --output " + r);
  ASSERT_EQ(a.status, 0) << a.out;
  EXPECT_EQ(read(fs::path(r) / "geometry.svg"), read(fs::path(c) / "geometry.svg"));
  a = run("validate --input " + c + "/geometry.json");
  EXPECT_EQ(a.status, 0) << a.out;
  EXPECT_EQ(a.out.find("FAIL"), std::string::npos) << a.out;
}

TEST_F(CliTest, StoredGeometryIsReused) {
  const std::string c = dir("c"), c2 = dir("c2");
  ASSERT_EQ(run("cover --preset peanut --output " + c).status, 0);
  ASSERT_EQ(run("cover --input " + c + "/geometry.json --output " + c2).status, 0);
  EXPECT_EQ(read(fs::path(c) / "geometry.json"), read(fs::path(c2) / "geometry.json"));
}

TEST_F(CliTest, HugeDistanceShrinks) {
  const std::string p = dir("p");
  const CliRun a = run("parameterize --preset ellipse --d 50 --output " + p);
  ASSERT_EQ(a.status, 0) << a.out;
  const std::string log = read(fs::path(p) / "offset_log.json");
  int entries = 0;
  for (auto pos = log.find("\"iteration\""); pos != std::string::npos; pos = log.find("\"iteration\"", pos + 1))
    ++entries;
  EXPECT_GE(entries, 2) << log;
  EXPECT_NE(log.find("\"valid\": true"), std::string::npos);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  const std::string a = dir("a"), b = dir("b");
  ASSERT_EQ(run("solve --preset drop --level 0 --samples 12 --output " + a).status, 0);
  ASSERT_EQ(run("solve --preset drop --level 0 --samples 12 --output " + b).status, 0);
  for (const auto& name : listing(a)) EXPECT_EQ(read(fs::path(a) / name), read(fs::path(b) / name)) << name;
  EXPECT_EQ(listing(a), listing(b));
}

TEST_F(CliTest, ThreadCountDoesNotChangeResults) {
  const std::string a = dir("a"), b = dir("b");
  ASSERT_EQ(run("solve --preset heart --level 0 --samples 8 --output " + a).status, 0);
  ASSERT_EQ(std::system(("OODP_THREADS=3 " + std::string(OODP_CLI) + " solve --preset heart --level 0 --samples 8 "
                         "--output " + b + " > /dev/null 2>&1").c_str()),
            0);
  EXPECT_EQ(read(fs::path(a) / "solve_report.json"), read(fs::path(b) / "solve_report.json"));
  EXPECT_EQ(read(fs::path(a) / "field.csv"), read(fs::path(b) / "field.csv"));
}

TEST_F(CliTest, UsageErrorsExitWithInvalidInput) {
  const std::string out = dir("out");
  EXPECT_EQ(run("parameterize --preset nope --output " + out).status, 2);
  EXPECT_EQ(run("parameterize --output " + out).status, 2);
  EXPECT_EQ(run("parameterize --preset circle --input x.json --output " + out).status, 2);
  EXPECT_EQ(run("solve --preset circle").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("solve --preset circle --degree 0 --output " + out).status, 2);
  EXPECT_EQ(run("solve --preset circle --exact cosh --output " + out).status, 2);
  EXPECT_EQ(run("parameterize --preset circle --c 1.5 --output " + out).status, 2);
  EXPECT_TRUE(listing(out).empty());
}

TEST_F(CliTest, FormatErrorsWriteNothing) {
  const std::string bad = dir("bad.json"), out = dir("out");
  {
    std::ofstream f(bad);
    f << "{\"format\": \"oodp-geometry\", \"version\": 1,\n \"boundary\": [}";
  }
  const CliRun a = run("parameterize --input " + bad + " --output " + out);
  EXPECT_EQ(a.status, 11) << a.out;
  EXPECT_NE(a.out.find("line 2"), std::string::npos) << a.out;
  EXPECT_NE(a.out.find("format error"), std::string::npos) << a.out;
  EXPECT_TRUE(listing(out).empty());
}

TEST_F(CliTest, CornerMismatchIsCornerError) {
  const std::string p = dir("p"), out = dir("out");
  ASSERT_EQ(run("render --preset square --output " + p).status, 0);
  GeometryFile g = geometry_from_preset("square");
  g.corners = {0.0, 0.3};
  write_text_file(dir("g.json"), serialize_geometry(g));
  const CliRun a = run("parameterize --input " + dir("g.json") + " --output " + out);
  EXPECT_EQ(a.status, static_cast<int>(ErrorCode::Corner)) << a.out;
  EXPECT_TRUE(listing(out).empty());
}

TEST_F(CliTest, ValidateReportsFirstFailingGate) {
  const std::string c = dir("c"), v = dir("v");
  ASSERT_EQ(run("cover --preset star --output " + c).status, 0);
  GeometryFile g = read_geometry_file(c + "/geometry.json");
  ASSERT_TRUE(g.cells);
  g.cells->cells.erase(g.cells->cells.begin() + static_cast<long>(g.cells->cells.size() / 2));
  write_text_file(dir("holey.json"), serialize_geometry(g));
  const CliRun a = run("validate --input " + dir("holey.json") + " --output " + v);
  EXPECT_EQ(a.status, static_cast<int>(ErrorCode::Cover)) << a.out;
  EXPECT_NE(a.out.find("FAIL cells_"), std::string::npos) << a.out;
  EXPECT_NE(a.out.find("PASS ring_jacobian"), std::string::npos) << a.out;
  EXPECT_EQ(listing(v), std::vector<std::string>{"validate.json"});
}

TEST_F(CliTest, ConvergenceWritesTables) {
  const std::string out = dir("conv");
  const CliRun a = run("convergence --preset circle --degrees 2 --levels 0,1 --output " + out);
  ASSERT_EQ(a.status, 0) << a.out;
  EXPECT_EQ(listing(out), (std::vector<std::string>{"convergence.csv", "slopes.csv"}));
  const std::string rows = read(fs::path(out) / "convergence.csv");
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 3);
  EXPECT_EQ(run("convergence --preset circle --levels 1 --output " + dir("one")).status, 2);
}

TEST_F(CliTest, HelpListsPresets) {
  const CliRun a = run("--help");
  EXPECT_EQ(a.status, 0);
  EXPECT_NE(a.out.find("peanut"), std::string::npos);
  EXPECT_NE(a.out.find("OODP_THREADS"), std::string::npos);
}

}  // namespace
}  // namespace oodp
