#pragma once

#include <Eigen/Dense>
#include <complex>

#include "arisim/cell.hpp"

// Assembly of the N-element reflection vector under phase-amplitude
// coupling, in the diagonal-quadratic form gamma = a.*phi^2 + b.*phi + c
// consumed by the rate optimizer and its gradients.
namespace arisim::reflect {

struct RISConfig {
  Eigen::VectorXd phases;     // radians, interpreted modulo 2*pi
  Eigen::VectorXd alpha_bar;  // normalized amplitude controls in [0,1]

  Eigen::Index size() const { return phases.size(); }
  // Throws ConfigError on size mismatch, non-finite entries, or controls
  // outside [0,1] beyond 1e-9.
  void validate() const;
};

// Per-element envelope parameters. All elements of one physical panel share
// the same values; the vector form exists so active and passive elements can
// be mixed in a single assembled reflection.
struct EnvelopeVectors {
  Eigen::VectorXd delta_min;
  Eigen::VectorXd delta_max;
  Eigen::VectorXd beta_min;
  Eigen::VectorXd beta_max;
  Eigen::VectorXd theta;

  Eigen::Index size() const { return delta_min.size(); }
  // Upper-minus-lower spread difference x = (beta_max - beta_min) -
  // (delta_max - delta_min); zero for passive elements, whose amplitude
  // cannot be amplified.
  Eigen::VectorXd x() const { return beta_max - beta_min - y(); }
  Eigen::VectorXd y() const { return delta_max - delta_min; }

  static EnvelopeVectors broadcast(const cell::AmplitudeEnvelope& env,
                                   Eigen::Index n);
  // active_mask[i] selects which envelope row i uses.
  static EnvelopeVectors hybrid(const cell::AmplitudeEnvelope& active,
                                const cell::AmplitudeEnvelope& passive,
                                const std::vector<bool>& active_mask);
};

// gamma_n = a_n*e^{2j phi_n} + b_n*e^{j phi_n} + c_n. The selector-tensor
// contraction collapses to the elementwise square of the unit-phase vector,
// so the quadratic term never materializes an N^2 x N operator.
struct QuadraticForm {
  Eigen::VectorXcd a;
  Eigen::VectorXcd b;
  Eigen::VectorXcd c;
};

QuadraticForm quadratic_form(const RISConfig& config,
                             const EnvelopeVectors& env);

// Reflection vector on the cosine-fit envelopes.
Eigen::VectorXcd assemble_gamma(const RISConfig& config,
                                const EnvelopeVectors& env);
Eigen::VectorXcd assemble_gamma(const RISConfig& config,
                                const cell::AmplitudeEnvelope& env);

// d gamma_n / d alpha_bar_n at fixed phases (the form is affine in each
// control).
Eigen::VectorXcd dgamma_dalpha(const RISConfig& config,
                               const EnvelopeVectors& env);

// Reflection vector on the exact circuit model:
// gamma_n = [alpha_min(phi_n) + abar_n*(alpha_max - alpha_min)] e^{j phi_n}
// with envelopes evaluated through the termination sweep. Throws SolverError
// naming the first element whose phase the circuit cannot realize.
Eigen::VectorXcd exact_gamma(const RISConfig& config,
                             const cell::CircuitParams& circuit);

}  // namespace arisim::reflect
