// uac: decide, construct, verify and simulate uniform avoidance couplings.
//
//   uac decide    (--graph FILE | --builder NAME [PARAMS...]) [--out REPORT]
//   uac construct NAME [PARAMS...] [--graph FILE | --builder ...] [--start X Y] [--phi P...] --out KERNEL
//   uac verify    --kernel FILE [--require-uniform] [--filter] [--monte-carlo --seed S ...] [--out REPORT]
//   uac simulate  --kernel FILE --seed S [--steps N] --out TRAJECTORY [--report REPORT]
//
// Exit codes: 0 success / admits / all checks pass, 1 negative verdict or
// failed check, 2 usage or input error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "uac/commands.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniform avoidance couplings of simple random walks"};
  app.set_version_flag("--version", std::string("uac ") + uac::kVersion);
  app.require_subcommand(1);

  uac::RunConfig cfg;
  std::vector<uac::VertexId> start;
  std::string out_path;
  std::string report_path;

  auto graph_options = [&](CLI::App* sub) {
    auto* g = sub->add_option("--graph", cfg.graph_file, "graph file (p/e edge-list format)");
    auto* b = sub->add_option("--builder", cfg.builder, "built-in graph: NAME [PARAMS...]")
                  ->expected(1, 4);
    g->excludes(b);
  };
  auto mc_options = [&](CLI::App* sub) {
    sub->add_option("--steps", cfg.steps, "Monte Carlo steps")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "generator seed (required for sampling)");
  };

  auto* decide = app.add_subcommand("decide", "decide whether a graph admits a uniform avoidance coupling");
  graph_options(decide);
  decide->add_option("--workers", cfg.workers, "threads for pair tests")->check(CLI::PositiveNumber);
  decide->add_option("--out", out_path, "report file (default stdout)");

  auto* construct = app.add_subcommand("construct", "write the kernel of a named coupling");
  construct->add_option("construction", cfg.construction, "NAME [PARAMS...]")->required()->expected(1, 3);
  graph_options(construct);
  construct->add_option("--start", start, "start state X Y")->expected(2);
  construct->add_option("--phi", cfg.phi, "automorphism as the image list of 0..n-1");
  construct->add_option("--out", out_path, "kernel file (default stdout)");
  construct->add_option("--report", report_path, "report file (default stderr)");

  auto* verify = app.add_subcommand("verify", "check a kernel exactly and, optionally, statistically");
  verify->add_option("--kernel", cfg.kernel_file, "kernel file")->required();
  graph_options(verify);
  verify->add_flag("--require-uniform", cfg.require_uniform, "fail when a token marginal differs from the walk");
  verify->add_flag("--filter", cfg.filter, "run the belief-filter faithfulness check for both tokens");
  verify->add_option("--belief-cap", cfg.belief_cap, "distinct beliefs before the filter gives up");
  verify->add_flag("--monte-carlo", cfg.monte_carlo, "simulate and run frequency tests");
  mc_options(verify);
  verify->add_option("--window", cfg.window, "history length h")->check(CLI::PositiveNumber);
  verify->add_option("--alpha", cfg.alpha, "family-wise significance level")->check(CLI::Range(0.0, 1.0));
  verify->add_option("--min-count", cfg.min_count, "smallest history bucket that is tested");
  verify->add_option("--out", out_path, "report file (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "sample a trajectory of a kernel");
  simulate->add_option("--kernel", cfg.kernel_file, "kernel file")->required();
  graph_options(simulate);
  mc_options(simulate);
  simulate->add_option("--out", out_path, "trajectory file, one 'x y' per line")->required();
  simulate->add_option("--report", report_path, "summary file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (start.size() == 2) cfg.start = uac::StatePair{start[0], start[1]};

  const auto result = uac::run_command(cfg);
  if (result.exit_code == 2) {
    std::cerr << result.report;
    return 2;
  }

  const bool has_artifact = cfg.command == "construct" || cfg.command == "simulate";
  if (has_artifact) {
    if (out_path.empty()) {
      std::cout << result.artifact;
    } else if (!write_file(out_path, result.artifact)) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return 2;
    }
    if (!report_path.empty()) {
      if (!write_file(report_path, result.report)) {
        std::cerr << "error: cannot write '" << report_path << "'\n";
        return 2;
      }
    } else {
      (out_path.empty() ? std::cerr : std::cout) << result.report;
    }
  } else if (!out_path.empty()) {
    if (!write_file(out_path, result.report)) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return 2;
    }
  } else {
    std::cout << result.report;
  }
  return result.exit_code;
}
