#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "orbitflow/scenario.hpp"

namespace {

using orbitflow::cli::CommandResult;
using orbitflow::cli::GlobalOptions;

int finish(const CommandResult& result, const std::string& out_path,
           std::chrono::steady_clock::time_point started) {
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  std::cout << orbitflow::cli::render_text(result);
  std::cout << "elapsed: " << elapsed << " ms\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 2;
    }
    out << result.report.dump(2) << "\n";
  }
  return result.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moment maps, gradient flows, and distinguished-orbit detection"};
  app.require_subcommand(1);
  app.fallthrough();  // let global flags appear after the subcommand

  GlobalOptions opts;
  std::string out_path;
  app.add_option("--tol", opts.tol, "check tolerance")->capture_default_str();
  app.add_option("--seed", opts.seed, "random seed for sampled checks")->capture_default_str();
  app.add_option("--max-steps", opts.max_steps, "flow iteration budget")->capture_default_str();
  app.add_option("--out", out_path, "write the structured report to this path");

  std::string scenario_path;
  auto* soliton = app.add_subcommand("soliton", "nilsoliton verdict via the gradient flow");
  soliton->add_option("file", scenario_path, "scenario file")->required();

  auto* detect = app.add_subcommand("detect", "derivation/split detection checks");
  detect->add_option("file", scenario_path, "scenario file")->required();
  detect->add_flag("--flow-compare", opts.flow_compare,
                   "also compare restricted and unrestricted flows");

  auto* flow = app.add_subcommand("flow", "raw gradient flow with trajectory dump");
  flow->add_option("file", scenario_path, "scenario file")->required();
  flow->add_option("--sample-every", opts.sample_every, "trajectory sampling stride");

  auto* adjoint = app.add_subcommand("adjoint", "adjoint representation of sl(n)");
  adjoint->require_subcommand(1);
  std::string partition_spec, matrix_path, basis_path;
  int partitions_n = 0;
  auto* rep = adjoint->add_subcommand("rep", "distinguished Jordan representative");
  rep->add_option("partition", partition_spec, "partition, e.g. 3,1 (or just n)")->required();
  auto* classify = adjoint->add_subcommand("classify", "partition of a nilpotent matrix");
  classify->add_option("file", matrix_path, "matrix file")->required();
  auto* verify = adjoint->add_subcommand("verify", "critical-constant check");
  verify->add_option("file", matrix_path, "matrix file")->required();
  auto* partitions = adjoint->add_subcommand("partitions", "enumerate partitions of n");
  partitions->add_option("n", partitions_n, "positive integer")->required();
  auto* adetect = adjoint->add_subcommand("detect", "moment in a matrix subalgebra");
  adetect->add_option("file", matrix_path, "matrix file")->required();
  adetect->add_option("basis", basis_path, "subalgebra basis file")->required();

  CLI11_PARSE(app, argc, argv);
  const auto started = std::chrono::steady_clock::now();

  try {
    if (soliton->parsed()) return finish(cmd_soliton(scenario_path, opts), out_path, started);
    if (detect->parsed()) return finish(cmd_detect(scenario_path, opts), out_path, started);
    if (flow->parsed()) return finish(cmd_flow(scenario_path, opts), out_path, started);
    if (adjoint->parsed()) {
      if (rep->parsed()) return finish(cmd_adjoint_rep(partition_spec, opts), out_path, started);
      if (classify->parsed())
        return finish(cmd_adjoint_classify(matrix_path, opts), out_path, started);
      if (verify->parsed())
        return finish(cmd_adjoint_verify(matrix_path, opts), out_path, started);
      if (partitions->parsed())
        return finish(cmd_adjoint_partitions(partitions_n, opts), out_path, started);
      if (adetect->parsed())
        return finish(cmd_adjoint_detect(matrix_path, basis_path, opts), out_path, started);
    }
  } catch (const orbitflow::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
