#pragma once

#include <optional>

#include "orbitflow/moment.hpp"

namespace orbitflow {

/// Projected gradient descent parameters.  Backtracking line search with
/// Armijo sufficient decrease; initial_step is also the step-size cap.
struct FlowConfig {
  long max_steps = 200000;
  double grad_tol = 1e-9;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  int renormalize_every = 1;
  /// Record (step, ||m||^2, ||grad||) every sample_every steps; 0 disables.
  long sample_every = 0;
};

enum class FlowVerdict {
  DistinguishedMinimal,     // critical with c ~ 0: closed-orbit candidate
  DistinguishedNonminimal,  // critical with c != 0: null-cone critical point
  NotConverged,
};

struct TrajectorySample {
  long step;
  double moment_norm_sq;
  double grad_norm;
};

struct FlowReport {
  BracketTensor final_point{1};
  long steps_taken = 0;
  double final_grad_norm = 0.0;
  double final_moment_norm_sq = 0.0;
  std::optional<double> critical_constant;
  FlowVerdict verdict = FlowVerdict::NotConverged;
  std::vector<TrajectorySample> trajectory_samples;
};

const char* to_string(FlowVerdict v);

/// Negative gradient flow of ||m[.]||^2 on the unit sphere starting at
/// mu0 / ||mu0||.  ||m||^2 is non-increasing along the iterates.
FlowReport run_flow(const BracketTensor& mu0, const FlowConfig& config = {});

/// Same flow but with the descent direction restricted to the action of
/// span(generators); generators are trace-orthonormalized internally.
FlowReport run_flow_restricted(const BracketTensor& mu0, std::vector<Matrix> generators,
                               const FlowConfig& config = {});

enum class SolitonKind { EinsteinNilradical, NotEinsteinNilradical, Undetermined };

struct SolitonResult {
  SolitonKind kind = SolitonKind::Undetermined;
  std::optional<double> critical_constant;
  std::optional<BracketTensor> soliton_point;
  FlowReport flow;
};

const char* to_string(SolitonKind k);

/// Flow-based nilsoliton verdict for a nilpotent Lie bracket.  Requires the
/// Jacobi identity and nilpotency; flow failure maps to Undetermined, never
/// to a negative.
SolitonResult soliton_verdict(const BracketTensor& mu, const FlowConfig& config = {});

}  // namespace orbitflow
