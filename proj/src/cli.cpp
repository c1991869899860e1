#include "plate/cli.hpp"

#include "plate/disk_bench.hpp"
#include "plate/io.hpp"
#include "plate/mesh.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <regex>
#include <vector>

namespace plate::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : Error {
  using Error::Error;
};

struct RunConfig {
  std::string method;
  std::string bc = "nodal";
  double sigma = 0.0;
  double gamma0 = 10.0;
  double gamma1 = 10.0;
  int ell = 2;
  double epsilon = 0.0;
  double epsilon_power = 3.0;
  int level = -1;
  std::string levels = "1..5";
  std::string check;
  std::string target = "exact";
  std::string out_dir = ".";
  std::string output;
  bool deterministic = false;
  bool vtu = false;
  int volume_degree = kDefaultTriangleDegree;
  int edge_degree = kDefaultEdgeDegree;
};

std::pair<int, int> parse_levels(const std::string& text) {
  static const std::regex pattern(R"(^\s*(\d+)\s*(?:\.\.\s*(\d+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) {
    throw UsageError(fmt::format("level range '{}' is not of the form A..B", text));
  }
  const int a = std::stoi(m[1]);
  const int b = m[2].matched ? std::stoi(m[2]) : a;
  if (b < a) throw UsageError(fmt::format("level range '{}' is decreasing", text));
  return {a, b};
}

bench::PlateProblem make_problem(const RunConfig& c, const CLI::App& app) {
  bench::PlateProblem p;
  if (c.method.empty()) throw UsageError("--method is required");
  try {
    p.method = bench::parse_method(c.method);
    p.bc = bench::parse_bc(c.bc);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  const auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
  if (p.method != bench::Method::Argyris && given("--bc")) {
    throw UsageError("--bc applies to the argyris method only");
  }
  if (p.method != bench::Method::Dg &&
      (given("--gamma0") || given("--gamma1") || given("--ell"))) {
    throw UsageError("--gamma0, --gamma1 and --ell apply to the dg method only");
  }
  if (p.method == bench::Method::Dg && c.sigma != 0.0) {
    throw UsageError("the dg method requires --sigma 0");
  }
  if (p.method == bench::Method::Splitting && given("--sigma")) {
    throw UsageError("--sigma does not apply to the splitting method");
  }
  const bool eps_fixed = given("--epsilon");
  const bool eps_power = given("--epsilon-power");
  if (eps_fixed && eps_power) throw UsageError("--epsilon and --epsilon-power are exclusive");
  const bool penalty = p.method == bench::Method::Argyris &&
                       (p.bc == argyris::BcMode::Kind::Penalty ||
                        p.bc == argyris::BcMode::Kind::PenaltyVertexQuadrature);
  if ((eps_fixed || eps_power) && !penalty) {
    throw UsageError("--epsilon and --epsilon-power need --bc penalty or penalty-vertex");
  }
  p.epsilon = eps_fixed ? bench::EpsilonRule::fixed(c.epsilon)
                        : bench::EpsilonRule::h_power(c.epsilon_power);
  p.sigma = c.sigma;
  p.dg_params = {c.gamma0, c.gamma1, c.ell};
  if (c.target == "exact") {
    p.target = bench::Target::Exact;
  } else if (c.target == "incorrect") {
    p.target = bench::Target::Incorrect;
  } else {
    throw UsageError(fmt::format("unknown target '{}'", c.target));
  }
  p.volume_degree = c.volume_degree;
  p.edge_degree = c.edge_degree;
  try {
    p.validate();
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  return p;
}

std::string run_tag(const bench::PlateProblem& p) {
  std::string tag = bench::method_name(p.method);
  if (p.method == bench::Method::Argyris) tag += "-" + argyris::BcMode{p.bc, 0.0}.name();
  return tag;
}

void require_level(const RunConfig& c) {
  if (c.level < 0) throw UsageError("--level is required");
  if (c.level > kMaxDiskLevel) {
    throw UsageError(fmt::format("level {} exceeds the maximum {}", c.level, kMaxDiskLevel));
  }
}

Eigen::VectorXd exact_at_vertices(const Triangulation& mesh, double sigma) {
  const bench::ExactDiskSolution exact(sigma);
  Eigen::VectorXd v(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    Point2 x = mesh.vertices()[i];
    if (x.norm() > 1.0) x /= x.norm();
    v[static_cast<Eigen::Index>(i)] = exact.u(x).value;
  }
  return v;
}

int cmd_mesh(const RunConfig& c, std::ostream& out) {
  require_level(c);
  const Triangulation mesh = build_disk_mesh(c.level);
  const fs::path dir(c.out_dir);
  const fs::path text = dir / fmt::format("mesh_L{}.txt", c.level);
  const fs::path vtu = dir / fmt::format("mesh_L{}.vtu", c.level);
  Eigen::VectorXd flags(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    flags[static_cast<Eigen::Index>(i)] = mesh.boundary_vertex_flags()[i] ? 1.0 : 0.0;
  }
  io::write_file_atomic(text, mesh_to_text(mesh));
  io::write_file_atomic(vtu, io::vtu_string(mesh, {{"boundary", flags},
                                                    {"exact_u", exact_at_vertices(mesh, 0.0)}}));
  const MeshStats s = mesh.stats();
  out << fmt::format("level {} vertices {} triangles {} sides {} h_max {:.6g}\n", c.level,
                     mesh.num_vertices(), mesh.num_triangles(), mesh.num_sides(), s.h_max);
  out << fmt::format("wrote {}\nwrote {}\n", text.string(), vtu.string());
  return kExitOk;
}

int cmd_solve(const RunConfig& c, const CLI::App& app, std::ostream& out, std::ostream& err) {
  require_level(c);
  const bench::PlateProblem p = make_problem(c, app);
  const MeshPtr mesh = make_disk_mesh(c.level);
  const bench::LevelResult r = bench::solve_level(p, mesh);
  bench::ConvergenceRow row;
  row.level = r.level;
  row.h = r.h;
  row.ndof = static_cast<long long>(r.ndof);
  row.midpoint = r.midpoint;
  row.delta_mp = r.delta_mp;
  row.delta_h2 = r.delta_h2;
  row.energy = r.energy;
  row.rate_mp = row.rate_h2 = std::numeric_limits<double>::quiet_NaN();
  const std::string stem = fmt::format("solve_{}_L{}", run_tag(p), c.level);
  const fs::path dir(c.out_dir);
  const fs::path csv = c.output.empty() ? dir / (stem + ".csv") : fs::path(c.output);
  const fs::path vtu = dir / (stem + ".vtu");
  const std::string text = bench::study_csv({row});
  io::write_file_atomic(csv, text);
  io::write_file_atomic(vtu, io::vtu_string(*mesh, {{"u_h", r.vertex_values},
                                                     {"exact_u", exact_at_vertices(*mesh, p.sigma)}}));
  if (!r.report.residual_ok) {
    err << fmt::format("warning: relative residual {:.3g} (condition ~{:.3g})\n",
                       r.report.relative_residual, r.report.condition_estimate);
  }
  out << text;
  out << fmt::format("solver {} residual {:.3g} condition {:.3g}\n", r.report.method_name(),
                     r.report.relative_residual, r.report.condition_estimate);
  out << fmt::format("wrote {}\nwrote {}\n", csv.string(), vtu.string());
  return kExitOk;
}

int cmd_study(const RunConfig& c, const CLI::App& app, std::ostream& out, std::ostream& err) {
  const bench::PlateProblem p = make_problem(c, app);
  const auto [first, last] = parse_levels(c.levels);
  if (last > kMaxDiskLevel) {
    throw UsageError(fmt::format("level {} exceeds the maximum {}", last, kMaxDiskLevel));
  }
  const fs::path dir(c.out_dir);
  const std::string stem = fmt::format("study_{}_L{}-{}", run_tag(p), first, last);
  const bench::LevelCallback on_level = [&](const bench::LevelResult& r,
                                            const Triangulation& mesh) {
    if (!r.report.residual_ok) {
      err << fmt::format("warning: level {} relative residual {:.3g} (condition ~{:.3g})\n",
                         r.level, r.report.relative_residual, r.report.condition_estimate);
    }
    if (c.vtu) {
      io::write_file_atomic(dir / fmt::format("{}_level{}.vtu", stem, r.level),
                            io::vtu_string(mesh, {{"u_h", r.vertex_values}}));
    }
  };
  const auto rows = bench::convergence_study(p, first, last, on_level);
  const fs::path csv = c.output.empty() ? dir / (stem + ".csv") : fs::path(c.output);
  const std::string text = bench::study_csv(rows);
  io::write_file_atomic(csv, text);
  out << text;
  bool failed = false;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      err << fmt::format("level {} failed: {}\n", r.level, r.error);
      failed = true;
    }
  }
  out << fmt::format("wrote {}\n", csv.string());
  return failed ? kExitFailure : kExitOk;
}

int cmd_diag(const RunConfig& c, std::ostream& out) {
  const int level = c.level < 0 ? 3 : c.level;
  if (level > kMaxDiskLevel) {
    throw UsageError(fmt::format("level {} exceeds the maximum {}", level, kMaxDiskLevel));
  }
  bench::DiagReport rep;
  if (c.check == "curvature") {
    rep = bench::diag_curvature(level);
  } else if (c.check == "energy-identity") {
    rep = bench::diag_energy_identity(level, c.sigma);
  } else if (c.check == "det-zero") {
    rep = bench::diag_det_zero(level);
  } else {
    throw UsageError(fmt::format("unknown check '{}'", c.check));
  }
  const std::string text = rep.to_text();
  const fs::path path = c.output.empty()
                            ? fs::path(c.out_dir) / fmt::format("diag_{}_L{}.txt", c.check, level)
                            : fs::path(c.output);
  io::write_file_atomic(path, text);
  out << text << fmt::format("wrote {}\n", path.string());
  return rep.pass ? kExitOk : kExitFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kirchhoff plate finite element lab on polygonal disks"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "key=value configuration file; flags override it");
  RunConfig c;
  app.add_option("--method", c.method, "argyris | dkt | dg | splitting");
  app.add_option("--bc", c.bc, "argyris boundary mode: full | nodal | penalty | penalty-vertex");
  app.add_option("--sigma", c.sigma, "Poisson ratio in [0, 1)");
  app.add_option("--gamma0", c.gamma0, "dg value penalty");
  app.add_option("--gamma1", c.gamma1, "dg gradient penalty");
  app.add_option("--ell", c.ell, "dg polynomial degree (>= 2)");
  app.add_option("--epsilon", c.epsilon, "fixed penalty parameter")->check(CLI::PositiveNumber);
  app.add_option("--epsilon-power", c.epsilon_power, "penalty parameter h^p (default p = 3)");
  app.add_option("--level", c.level, "refinement level")->check(CLI::NonNegativeNumber);
  app.add_option("--levels", c.levels, "level range A..B (default 1..5)");
  app.add_option("--check", c.check, "curvature | energy-identity | det-zero");
  app.add_option("--target", c.target, "midpoint reference: exact | incorrect");
  app.add_option("--out-dir", c.out_dir, "output directory");
  app.add_option("--output", c.output, "explicit output file");
  app.add_option("--volume-degree", c.volume_degree, "triangle quadrature degree")
      ->check(CLI::Range(1, kMaxTriangleDegree));
  app.add_option("--edge-degree", c.edge_degree, "edge quadrature degree")
      ->check(CLI::Range(1, kMaxEdgeDegree));
  app.add_flag("--deterministic", c.deterministic, "single-threaded reproducible run");
  app.add_flag("--vtu", c.vtu, "study: write one VTU per level");

  CLI::App* mesh = app.add_subcommand("mesh", "write the level-L disk mesh (text and VTU)");
  CLI::App* solve = app.add_subcommand("solve", "solve at one level, write VTU and a CSV row");
  CLI::App* study = app.add_subcommand("study", "convergence study over a level range");
  CLI::App* diag = app.add_subcommand("diag", "run a diagnostic check");
  for (CLI::App* s : {mesh, solve, study, diag}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  set_deterministic(c.deterministic);
  try {
    if (!c.check.empty() && !diag->parsed()) throw UsageError("--check applies to diag only");
    if (mesh->parsed()) return cmd_mesh(c, out);
    if (solve->parsed()) return cmd_solve(c, app, out, err);
    if (study->parsed()) return cmd_study(c, app, out, err);
    if (c.check.empty()) throw UsageError("diag needs --check");
    return cmd_diag(c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace plate::cli
