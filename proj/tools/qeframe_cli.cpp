// qeframe: verify, vary, classify and search for quasi-Einstein metrics on
// frame-presented Lie groups. See README.md for the problem-file schema.

#include <CLI11.hpp>

#include <iostream>

#include "qeframe/qeframe.hpp"

using namespace qeframe;

namespace {

void add_common(CLI::App* cmd, CommandOptions& opt) {
  cmd->add_option("--m", opt.m, "quasi-Einstein constant m (overrides the file)");
  cmd->add_option("--tol", opt.tol, "tolerance overriding the numeric policy");
  cmd->add_option("--json", opt.json_path, "write the JSON report to this path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-Einstein metrics on frame-presented Lie groups"};
  app.require_subcommand(1);
  CommandOptions opt;
  std::string file;

  auto* verify = app.add_subcommand("verify", "check a triple (g, X, m, lambda)");
  verify->add_option("file", file, "problem JSON")->required();
  verify->add_option("--lambda", opt.lambda, "lambda (overrides the file; default: least-squares fit)");
  add_common(verify, opt);

  auto* variation = app.add_subcommand("variation", "scan the canonical variation of a circle fibration");
  variation->add_option("file", file, "problem JSON with a vertical index")->required();
  variation->add_option("--t-grid", opt.t_grid, "start:step:stop")->capture_default_str();
  variation->add_option("--csv", opt.csv_path, "write the CSV table to this path (default stdout)");
  add_common(variation, opt);

  auto* classify = app.add_subcommand("classify", "Thurston bucket of a 3D solution");
  classify->add_option("file", file, "problem JSON")->required();
  classify->add_option("--lambda", opt.lambda, "lambda (overrides the file)");
  add_common(classify, opt);

  auto* solve = app.add_subcommand("solve", "multistart search for solutions on the file's frame");
  solve->add_option("file", file, "problem JSON (metric is ignored)")->required();
  solve->add_option("--starts", opt.starts, "number of starts")->capture_default_str()->check(CLI::PositiveNumber);
  solve->add_option("--seed", opt.seed, "seed for the start sequence")->capture_default_str();
  std::string param = "diagonal";
  solve->add_option("--parameterization", param, "diagonal | full_spd")
      ->capture_default_str()
      ->check(CLI::IsMember({"diagonal", "full_spd"}));
  add_common(solve, opt);

  auto* catalog = app.add_subcommand("catalog", "export built-in examples as problem files");
  catalog->add_option("--name", opt.name, "single entry to export");
  catalog->add_option("--json", opt.json_path, "write to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }
  opt.parameterization = param == "full_spd" ? MetricParameterization::FullSpd : MetricParameterization::Diagonal;

  return guarded(
      [&]() -> int {
        if (catalog->parsed()) return cmd_catalog(opt, std::cout);
        const Problem p = load_problem(file);
        if (verify->parsed()) return cmd_verify(p, opt, std::cout, std::cerr);
        if (variation->parsed()) return cmd_variation(p, opt, std::cout, std::cerr);
        if (classify->parsed()) return cmd_classify(p, opt, std::cout, std::cerr);
        return cmd_solve(p, opt, std::cout, std::cerr);
      },
      std::cerr);
}
