#include "orbitflow/flow.hpp"

#include <cmath>

namespace orbitflow {

const char* to_string(FlowVerdict v) {
  switch (v) {
    case FlowVerdict::DistinguishedMinimal: return "DistinguishedMinimal";
    case FlowVerdict::DistinguishedNonminimal: return "DistinguishedNonminimal";
    case FlowVerdict::NotConverged: return "NotConverged";
  }
  return "?";
}

const char* to_string(SolitonKind k) {
  switch (k) {
    case SolitonKind::EinsteinNilradical: return "EinsteinNilradical";
    case SolitonKind::NotEinsteinNilradical: return "NotEinsteinNilradical";
    case SolitonKind::Undetermined: return "Undetermined";
  }
  return "?";
}

namespace {

double norm_sq_moment(const BracketTensor& mu) {
  Matrix m = moment_projective(mu);
  return (m * m.transpose()).trace();
}

// Trace-orthonormalize a family of linear maps (drops near-dependent ones).
std::vector<Matrix> orthonormalize(std::vector<Matrix> gens) {
  std::vector<Matrix> out;
  for (Matrix& G : gens) {
    for (const Matrix& E : out) G -= (G * E.transpose()).trace() * E;
    const double n = std::sqrt((G * G.transpose()).trace());
    if (n > 1e-12) out.push_back(G / n);
  }
  return out;
}

// Shared descent loop; `direction` maps a unit tensor to the descent
// direction (the relevant gradient, tangent to the sphere).
FlowReport descend(const BracketTensor& mu0, const FlowConfig& config,
                   const std::function<BracketTensor(const BracketTensor&)>& gradient) {
  if (mu0.norm() == 0.0) throw ZeroVector("flow started at the zero bracket");
  BracketTensor mu = mu0.normalized();
  double f = norm_sq_moment(mu);
  double step = config.initial_step;

  FlowReport report;
  long k = 0;
  double grad_norm = 0.0;
  for (; k < config.max_steps; ++k) {
    BracketTensor g = gradient(mu);
    grad_norm = g.norm();
    if (config.sample_every > 0 && k % config.sample_every == 0)
      report.trajectory_samples.push_back({k, f, grad_norm});
    if (grad_norm <= config.grad_tol) break;

    double s = step;
    BracketTensor cand = mu;
    double fc = f;
    while (true) {
      cand = mu;
      BracketTensor delta = g;
      delta *= s;
      cand -= delta;
      if (config.renormalize_every <= 1 || (k + 1) % config.renormalize_every == 0)
        cand = cand.normalized();
      fc = norm_sq_moment(cand);
      if (fc <= f - config.armijo * s * grad_norm * grad_norm || s < 1e-20) break;
      s *= config.shrink;
    }
    if (fc > f) break;  // line search stalled at rounding level
    mu = cand;
    f = fc;
    step = std::min(s / config.shrink, config.initial_step);
  }

  report.final_point = mu;
  report.steps_taken = k;
  report.final_grad_norm = grad_norm;
  report.final_moment_norm_sq = f;
  if (grad_norm <= config.grad_tol) {
    report.critical_constant = is_distinguished(mu, std::max(1e-8, config.grad_tol));
    if (report.critical_constant) {
      report.verdict = std::abs(*report.critical_constant) <= 10.0 * config.grad_tol
                           ? FlowVerdict::DistinguishedMinimal
                           : FlowVerdict::DistinguishedNonminimal;
    } else {
      report.verdict = FlowVerdict::NotConverged;
    }
  } else {
    report.verdict = FlowVerdict::NotConverged;
  }
  return report;
}

}  // namespace

FlowReport run_flow(const BracketTensor& mu0, const FlowConfig& config) {
  return descend(mu0, config, [](const BracketTensor& mu) { return grad_norm_sq(mu); });
}

FlowReport run_flow_restricted(const BracketTensor& mu0, std::vector<Matrix> generators,
                               const FlowConfig& config) {
  const int n = mu0.dim();
  for (const Matrix& G : generators)
    if (G.rows() != n || G.cols() != n)
      throw DimensionMismatch("generator dimension mismatch");
  std::vector<Matrix> basis = orthonormalize(std::move(generators));
  auto gradient = [&basis](const BracketTensor& mu) {
    Matrix m = moment_bracket(mu);  // unit norm: m[mu] = m(mu)
    Matrix proj = Matrix::Zero(m.rows(), m.cols());
    for (const Matrix& E : basis) proj += (m * E.transpose()).trace() * E;
    BracketTensor g = gl_infinitesimal_act(proj, mu);
    g *= 8.0;
    BracketTensor radial = mu;
    radial *= g.dot(mu);
    g -= radial;
    return g;
  };
  return descend(mu0, config, gradient);
}

SolitonResult soliton_verdict(const BracketTensor& mu, const FlowConfig& config) {
  std::optional<int> cls = nilpotency_class(mu);  // throws JacobiViolation
  if (!cls) throw NotNilpotent("bracket is not nilpotent");

  SolitonResult result;
  if (mu.norm() == 0.0) {
    // Abelian: m = 0 is the absolute minimum, trivially a soliton.
    result.kind = SolitonKind::EinsteinNilradical;
    result.critical_constant = 0.0;
    result.soliton_point = mu;
    result.flow.final_point = mu;
    result.flow.verdict = FlowVerdict::DistinguishedMinimal;
    return result;
  }

  result.flow = run_flow(mu, config);
  if (result.flow.verdict == FlowVerdict::NotConverged) {
    result.kind = SolitonKind::Undetermined;
  } else {
    result.kind = SolitonKind::EinsteinNilradical;
    result.critical_constant = result.flow.critical_constant;
    result.soliton_point = result.flow.final_point;
  }
  return result;
}

}  // namespace orbitflow
