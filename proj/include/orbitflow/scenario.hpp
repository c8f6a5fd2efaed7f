#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "orbitflow/detection.hpp"
#include "orbitflow/flow.hpp"

namespace orbitflow::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Parsed scenario file: structure constants plus optional derivations,
/// split, and flow overrides.
struct Scenario {
  BracketTensor bracket{1};
  std::vector<Matrix> derivations;
  std::optional<SumSplit> split;
  FlowConfig flow;
  Json echo;  // canonical echo of the parsed inputs for reports
};

Scenario load_scenario(const std::string& path);
Matrix load_matrix(const std::string& path);
std::vector<Matrix> load_matrix_list(const std::string& path);

Json bracket_to_json(const BracketTensor& mu);
Json matrix_to_json(const Matrix& m);

struct GlobalOptions {
  double tol = 1e-9;
  std::uint64_t seed = 0;
  long max_steps = 200000;
  long sample_every = 0;    // flow trajectory sampling; 0 disables
  bool flow_compare = false;  // detect: restricted-vs-full flow comparison
};

struct CommandResult {
  Json report;
  bool pass = false;
};

CommandResult cmd_soliton(const std::string& path, const GlobalOptions& opts);
CommandResult cmd_detect(const std::string& path, const GlobalOptions& opts);
CommandResult cmd_flow(const std::string& path, const GlobalOptions& opts);
CommandResult cmd_adjoint_rep(const std::string& partition_spec, const GlobalOptions& opts);
CommandResult cmd_adjoint_classify(const std::string& path, const GlobalOptions& opts);
CommandResult cmd_adjoint_verify(const std::string& path, const GlobalOptions& opts);
CommandResult cmd_adjoint_partitions(int n, const GlobalOptions& opts);
CommandResult cmd_adjoint_detect(const std::string& matrix_path, const std::string& basis_path,
                                 const GlobalOptions& opts);

/// Human-readable one-line-per-check rendering of a report.
std::string render_text(const CommandResult& result);

}  // namespace orbitflow::cli
