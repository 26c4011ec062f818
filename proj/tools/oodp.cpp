// Copyright 2026 The OODP Authors
// SPDX-License-Identifier: Apache-2.0

// oodp: parameterize -> cover -> solve -> convergence -> render, plus validate.
//
// Every command reads a preset (--preset) or a geometry file (--input) and
// writes its artifacts into --output only after all of them are computed.
// The exit status is 0 on success and the error category otherwise.

#include "oodp/pipeline.hpp"
#include "oodp/presets.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace oodp;

struct Overrides {
  std::optional<double> c, d, alpha, beta, hc;
  std::optional<int> degree, level;
  std::vector<int> degrees, levels;
  std::optional<std::string> quasiNormal, exact;
};

struct Args {
  std::string preset, input, output;
  Overrides over;
  int samples = 64;
  int width = 800, height = 800;
};

void add_common(CLI::App* cmd, Args& a, bool needsOutput) {
  auto* preset = cmd->add_option("--preset", a.preset, "built-in geometry")
                     ->check(CLI::IsMember(preset_names()));
  auto* input = cmd->add_option("--input", a.input, "geometry file")->check(CLI::ExistingFile);
  preset->excludes(input);
  input->excludes(preset);
  auto* out = cmd->add_option("--output", a.output, "output directory");
  if (needsOutput) out->required();
  auto& o = a.over;
  cmd->add_option("--c", o.c, "offset fraction of mu_max");
  cmd->add_option("--d", o.d, "offset distance bound");
  cmd->add_option("--alpha", o.alpha, "first-derivative regularization");
  cmd->add_option("--beta", o.beta, "second-derivative regularization");
  cmd->add_option("--quasi-normal", o.quasiNormal, "curveNormal | radialToPoint | smoothedNormal | perSegment");
  cmd->add_option("--hc", o.hc, "cell size h_c");
  cmd->add_option("--degree", o.degree, "spline degree of a single solve")->check(CLI::Range(1, 8));
  cmd->add_option("--level", o.level, "refinement level of a single solve")->check(CLI::Range(0, 8));
  cmd->add_option("--degrees", o.degrees, "degrees of the convergence study")->delimiter(',')
      ->check(CLI::Range(1, 8));
  cmd->add_option("--levels", o.levels, "levels of the convergence study")->delimiter(',')
      ->check(CLI::Range(0, 8));
  cmd->add_option("--exact", o.exact, "manufactured solution: sin | sinpi | linear");
}

GeometryFile load(const Args& a) {
  if (a.preset.empty() == a.input.empty()) throw Error(ErrorCode::InvalidInput, "give exactly one of --preset, --input");
  GeometryFile g = a.preset.empty() ? read_geometry_file(a.input) : geometry_from_preset(a.preset);
  const auto& o = a.over;
  bool ringChanged = false;
  if (o.c) g.offset.c = *o.c, ringChanged = true;
  if (o.d) g.offset.d = *o.d, ringChanged = true;
  if (o.alpha) g.offset.alpha = *o.alpha, ringChanged = true;
  if (o.beta) g.offset.beta = *o.beta, ringChanged = true;
  if (o.quasiNormal) g.quasiNormal = quasi_normal_kind_from_string(*o.quasiNormal), ringChanged = true;
  g.offset.validate();
  if (ringChanged) g.ring.reset();
  if (ringChanged || o.hc) g.cells.reset();
  if (o.hc) {
    if (!(*o.hc > 0.0)) throw Error(ErrorCode::InvalidInput, "--hc must be positive");
    g.cover.cellSize = *o.hc;
  }
  if (o.degree) g.solve.degree = *o.degree;
  if (o.level) g.solve.level = *o.level;
  if (!o.degrees.empty()) g.solve.degrees = o.degrees;
  if (!o.levels.empty()) g.solve.levels = o.levels;
  if (o.exact) {
    make_exact_solution(*o.exact);
    g.solve.exactSolution = *o.exact;
  }
  return g;
}

/// Writes every artifact to a temporary name first, then renames them all.
void write_artifacts(const std::string& dir, const std::map<std::string, std::string>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::InvalidInput, "cannot create " + dir + ": " + ec.message());
  std::vector<std::pair<fs::path, fs::path>> staged;
  auto discard = [&] {
    for (const auto& [tmp, _] : staged) fs::remove(tmp, ec);
  };
  try {
    for (const auto& [name, text] : files) {
      const fs::path final = fs::path(dir) / name;
      const fs::path tmp = fs::path(dir) / ("." + name + ".tmp");
      write_text_file(tmp.string(), text);
      staged.emplace_back(tmp, final);
    }
  } catch (...) {
    discard();
    throw;
  }
  for (const auto& [tmp, final] : staged) {
    fs::rename(tmp, final, ec);
    if (ec) {
      discard();
      throw Error(ErrorCode::InvalidInput, "cannot write " + final.string() + ": " + ec.message());
    }
  }
}

RenderSpec render_spec(const Args& a) {
  RenderSpec spec;
  spec.width = a.width;
  spec.height = a.height;
  spec.validate();
  return spec;
}

int run_parameterize(const Args& a) {
  GeometryFile g = load(a);
  const CornerRing ring = parameterize(g);
  g.ring = ring.manifold;
  g.cells.reset();
  const auto log = offset_log(ring);
  std::cout << "parameterize: " << ring.manifold.patches.size() << " patches, " << ring.corners.size()
            << " corners, " << log.size() << " offset iterations\n";
  write_artifacts(a.output, {{"geometry.json", serialize_geometry(g)},
                             {"geometry.svg", render_svg(g.boundary, &*g.ring, nullptr, nullptr, render_spec(a))},
                             {"offset_log.json", offset_log_json(log)}});
  return 0;
}

int run_cover(const Args& a) {
  GeometryFile g = load(a);
  CoverReport report;
  const OmpProblem problem = build_problem(g, &report);
  g.ring = problem.ring;
  g.cells = problem.cells;
  std::cout << "cover: " << problem.cells.cells.size() << " cells, h_c " << format_double(problem.cells.hc) << ", "
            << report.halvings << " halvings\n";
  write_artifacts(a.output, {{"geometry.json", serialize_geometry(g)},
                             {"geometry.svg", render_svg(g.boundary, &*g.ring, &*g.cells, nullptr, render_spec(a))},
                             {"cover_report.json", cover_report_json(report, problem.cells)}});
  return 0;
}

int run_solve(const Args& a) {
  const GeometryFile g = load(a);
  if (a.samples < 2) throw Error(ErrorCode::InvalidInput, "--samples must be at least 2");
  const OmpProblem problem = build_problem(g);
  const SolveOptions options = resolve_bases(problem, solve_options(g));
  const auto [solution, report] = solve_coupled(problem, make_exact_solution(g.solve.exactSolution), options);
  const auto field = sample_field(solution, problem, a.samples);
  std::cout << "solve: p " << options.degree << ", level " << options.level << ", " << report.dofTotal
            << " dofs, L2 " << format_double(report.l2) << ", H1 " << format_double(report.h1) << ", "
            << report.wallSeconds << " s\n";
  write_artifacts(a.output,
                  {{"solve_report.json", solve_report_json(report, options, g.solve.exactSolution)},
                   {"field.csv", field_csv(field)},
                   {"solution.svg", render_svg(g.boundary, &problem.ring, &problem.cells, &field, render_spec(a))}});
  return 0;
}

int run_convergence(const Args& a) {
  const GeometryFile g = load(a);
  if (g.solve.levels.size() < 2) throw Error(ErrorCode::InvalidInput, "a convergence study needs at least 2 levels");
  const OmpProblem problem = build_problem(g);
  const auto report = convergence_study(problem, make_exact_solution(g.solve.exactSolution), g.solve.degrees,
                                        g.solve.levels, solve_options(g));
  std::string failure;
  for (const auto& row : report.rows) {
    std::cout << "p " << row.degree << " level " << row.level << ": ";
    if (row.ok) {
      std::cout << row.dofs << " dofs, L2 " << format_double(row.l2) << ", H1 " << format_double(row.h1) << "\n";
    } else {
      std::cout << "failed: " << row.error << "\n";
      if (failure.empty()) failure = row.error;
    }
  }
  if (!failure.empty()) throw Error(ErrorCode::Solve, failure);
  for (const auto& [p, s] : report.slopes)
    std::cout << "p " << p << " slopes: L2 " << s.first << ", H1 " << s.second << "\n";
  write_artifacts(a.output, {{"convergence.csv", convergence_csv(report)}, {"slopes.csv", slopes_csv(report)}});
  return 0;
}

int run_render(const Args& a) {
  const GeometryFile g = load(a);
  const RingManifold* ring = g.ring ? &*g.ring : nullptr;
  const MultiCellDomain* cells = g.cells ? &*g.cells : nullptr;
  write_artifacts(a.output, {{"geometry.svg", render_svg(g.boundary, ring, cells, nullptr, render_spec(a))}});
  return 0;
}

int run_validate(const Args& a) {
  const GeometryFile g = load(a);
  const auto gates = validate_geometry(g);
  int status = 0;
  for (const auto& gate : gates) {
    std::cout << (gate.pass ? "PASS " : "FAIL ") << gate.name;
    if (!gate.detail.empty()) std::cout << ": " << gate.detail;
    std::cout << "\n";
    if (!gate.pass && status == 0) status = static_cast<int>(gate.code);
  }
  if (!a.output.empty()) write_artifacts(a.output, {{"validate.json", gates_json(gates)}});
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  std::ostringstream presets;
  for (const auto& n : preset_names()) presets << " " << n;
  CLI::App app{"Offset-based ring plus multi-cell domain parameterization and coupled Poisson solves.\n"
               "Presets:" + presets.str() + "\nThreads: OODP_THREADS (default: hardware concurrency)."};
  app.require_subcommand(1);
  Args args;
  struct Command {
    const char* name;
    const char* help;
    bool needsOutput;
    int (*run)(const Args&);
  };
  const Command commands[] = {
      {"parameterize", "offset the boundary and build the ring", true, run_parameterize},
      {"cover", "add the multi-cell domain", true, run_cover},
      {"solve", "one coupled Poisson solve", true, run_solve},
      {"convergence", "refinement study with least-squares slopes", true, run_convergence},
      {"render", "draw the stored geometry", true, run_render},
      {"validate", "check every geometry invariant", false, run_validate},
  };
  std::map<CLI::App*, const Command*> lookup;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    add_common(sub, args, c.needsOutput);
    if (std::string(c.name) == "solve")
      sub->add_option("--samples", args.samples, "field samples per axis")->check(CLI::Range(2, 4096));
    if (std::string(c.name) != "validate") {
      sub->add_option("--width", args.width, "SVG width")->check(CLI::PositiveNumber);
      sub->add_option("--height", args.height, "SVG height")->check(CLI::PositiveNumber);
    }
    lookup[sub] = &c;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : static_cast<int>(ErrorCode::InvalidInput);
  }
  const Command* command = lookup.at(app.get_subcommands().front());
  try {
    return command->run(args);
  } catch (const Error& e) {
    std::cerr << "oodp " << command->name << ": " << to_string(e.code()) << " error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "oodp " << command->name << ": internal error: " << e.what() << "\n";
    return 1;
  }
}
