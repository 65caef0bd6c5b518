#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "polyopt/driver.hpp"
#include "polyopt/instance_io.hpp"
#include "polyopt/oracle.hpp"

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write to " + path);
  out << text << "\n";
}

int run_solve(const std::string& instance_path, const polyopt::DriverConfig& cfg,
              bool full_strategy_single_level, int level, const std::string& out_path,
              const std::string& trace_path) {
  const polyopt::PopInstance inst = polyopt::load_instance(instance_path);

  std::ofstream trace_file;
  polyopt::TraceSink sink;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file) throw std::runtime_error("cannot write to " + trace_path);
    trace_file << polyopt::trace_csv_header() << "\n";
    sink = [&trace_file](const polyopt::TraceRow& row) {
      trace_file << polyopt::trace_csv_row(row) << "\n";
    };
  }

  const polyopt::SolveReport report =
      full_strategy_single_level ? polyopt::run_full_level(inst, level, cfg, sink)
                                 : polyopt::solve(inst, cfg, sink);
  write_text(out_path, polyopt::report_to_json(report));
  return report.succeeded() ? 0 : 1;
}

int run_oracle(const std::string& instance_path, int resolution,
               const std::string& out_path) {
  const polyopt::PopInstance inst = polyopt::load_instance(instance_path);
  const auto box = polyopt::bounding_box(inst);
  if (!box)
    throw std::runtime_error("instance has neither a box nor a ball constraint");
  const polyopt::OracleResult result = polyopt::grid_multistart(inst, *box, resolution);
  write_text(out_path, polyopt::oracle_to_json(result));
  return 0;
}

int run_inspect(const std::string& instance_path, int level) {
  const polyopt::PopInstance inst = polyopt::load_instance(instance_path);
  const auto [D, d] = polyopt::hierarchy_degrees(inst);
  const int w = level > 0 ? level : d;
  if (w < d) throw std::runtime_error("level below the minimal order d");

  const auto idx = polyopt::MomentIndex::up_to_degree(inst.n, 2 * w);
  const auto reg = polyopt::enumerate_blocks(inst, w, idx);

  std::cout << "variables: " << inst.n << ", constraints: " << inst.num_constraints()
            << "\n";
  std::cout << "max degree D = " << D << ", minimal level d = " << d << "\n";
  std::cout << "level " << w << " blocks (" << reg.pending.size() << "):\n";
  for (const auto& spec : reg.pending) {
    std::cout << "  id " << spec.id << "  "
              << (spec.kind == polyopt::BlockKind::kMoment ? "moment    " : "localizing")
              << "  order " << spec.order << "  dim " << spec.block.dim;
    if (spec.kind == polyopt::BlockKind::kLocalizing) {
      std::cout << "  constraint " << spec.constraint;
      const auto& name = inst.constraints[static_cast<size_t>(spec.constraint)].name;
      if (!name.empty()) std::cout << " (" << name << ")";
    }
    std::cout << "\n";
  }
  std::cout << "constraint variables:\n";
  for (int k = 0; k < inst.num_constraints(); ++k) {
    std::cout << "  " << k << ":";
    for (int v : reg.constraint_vars[static_cast<size_t>(k)]) std::cout << " x" << v;
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moment-relaxation solver for polynomial optimization"};
  app.require_subcommand(1);

  std::string instance_path;
  std::string out_path;
  std::string trace_path;
  std::string strategy = "fine";
  std::string coord_mode = "gs";
  std::string z_update = "scaled";
  std::uint64_t seed = 1;
  int level = 0;
  int resolution = 201;
  polyopt::DriverConfig cfg;

  auto* solve_cmd = app.add_subcommand("solve", "run the adaptive hierarchy");
  solve_cmd->add_option("instance", instance_path, "instance JSON file")->required();
  solve_cmd->add_option("--mu", cfg.solver.mu, "augmented-Lagrangian penalty");
  solve_cmd->add_option("--tol-coord", cfg.solver.tol_coord, "coordinate sweep tolerance");
  solve_cmd->add_option("--tol-admm", cfg.solver.tol_admm, "outer iteration tolerance");
  solve_cmd->add_option("--max-inner", cfg.solver.max_inner, "sweep pass cap");
  solve_cmd->add_option("--max-outer", cfg.solver.max_outer, "outer iteration cap");
  solve_cmd->add_option("--eps-feas", cfg.eps_feas, "violation threshold");
  solve_cmd->add_option("--eps-obj", cfg.eps_obj, "objective-gap threshold");
  solve_cmd->add_option("--rank-tau", cfg.rank_tau, "numerical-rank tolerance");
  solve_cmd->add_option("--w-max", cfg.w_max, "level cap");
  solve_cmd->add_option("--level", level, "solve one full level only (implies --strategy full)");
  solve_cmd->add_option("--strategy", strategy, "fine | full")
      ->check(CLI::IsMember({"fine", "full"}));
  solve_cmd->add_option("--coord-mode", coord_mode, "gs | jacobi")
      ->check(CLI::IsMember({"gs", "jacobi"}));
  solve_cmd->add_option("--z-update", z_update, "scaled | unscaled")
      ->check(CLI::IsMember({"scaled", "unscaled"}));
  solve_cmd->add_option("--seed", seed, "seed for the block-map cross-check");
  solve_cmd->add_flag("--parallel", cfg.solver.parallel, "parallel block updates");
  solve_cmd->add_option("--out", out_path, "report file (stdout when omitted)");
  solve_cmd->add_option("--trace", trace_path, "per-iteration CSV file");

  auto* oracle_cmd = app.add_subcommand("oracle", "grid + descent reference optimum");
  oracle_cmd->add_option("instance", instance_path, "instance JSON file")->required();
  oracle_cmd->add_option("--resolution", resolution, "grid points per dimension");
  oracle_cmd->add_option("--out", out_path, "result file (stdout when omitted)");

  auto* inspect_cmd = app.add_subcommand("inspect", "print the block structure");
  inspect_cmd->add_option("instance", instance_path, "instance JSON file")->required();
  inspect_cmd->add_option("--level", level, "relaxation level (default: minimal)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (solve_cmd->parsed()) {
      cfg.strategy = strategy == "full" ? polyopt::Strategy::kFullLevel
                                        : polyopt::Strategy::kFineGrained;
      cfg.solver.coord_mode = coord_mode == "jacobi" ? polyopt::CoordMode::kJacobi
                                                     : polyopt::CoordMode::kGaussSeidel;
      cfg.solver.z_update = z_update == "unscaled" ? polyopt::ZUpdateMode::kUnscaled
                                                : polyopt::ZUpdateMode::kScaled;
      cfg.probe_seed = seed;
      return run_solve(instance_path, cfg, level > 0, level, out_path, trace_path);
    }
    if (oracle_cmd->parsed()) return run_oracle(instance_path, resolution, out_path);
    return run_inspect(instance_path, level);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
