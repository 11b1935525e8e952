#include "arisim/reflect.hpp"

#include <cmath>
#include <string>

#include "arisim/errors.hpp"

namespace arisim::reflect {

namespace {
using Cplx = std::complex<double>;

void check_envelope_sizes(const EnvelopeVectors& env, Eigen::Index n) {
  if (env.delta_min.size() != n || env.delta_max.size() != n ||
      env.beta_min.size() != n || env.beta_max.size() != n ||
      env.theta.size() != n) {
    throw ConfigError("EnvelopeVectors: size mismatch with configuration");
  }
}
}  // namespace

void RISConfig::validate() const {
  if (phases.size() != alpha_bar.size()) {
    throw ConfigError("RISConfig: phases and alpha_bar lengths differ");
  }
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    if (!std::isfinite(phases[i]) || !std::isfinite(alpha_bar[i])) {
      throw ConfigError("RISConfig: non-finite entry at element " +
                        std::to_string(i));
    }
    if (alpha_bar[i] < -1e-9 || alpha_bar[i] > 1.0 + 1e-9) {
      throw ConfigError("RISConfig: alpha_bar[" + std::to_string(i) +
                        "] = " + std::to_string(alpha_bar[i]) +
                        " outside [0,1]");
    }
  }
}

EnvelopeVectors EnvelopeVectors::broadcast(const cell::AmplitudeEnvelope& env,
                                           Eigen::Index n) {
  EnvelopeVectors v;
  v.delta_min = Eigen::VectorXd::Constant(n, env.delta_min);
  v.delta_max = Eigen::VectorXd::Constant(n, env.delta_max);
  v.beta_min = Eigen::VectorXd::Constant(n, env.beta_min);
  v.beta_max = Eigen::VectorXd::Constant(n, env.beta_max);
  v.theta = Eigen::VectorXd::Constant(n, env.theta);
  return v;
}

EnvelopeVectors EnvelopeVectors::hybrid(const cell::AmplitudeEnvelope& active,
                                        const cell::AmplitudeEnvelope& passive,
                                        const std::vector<bool>& active_mask) {
  Eigen::Index n = static_cast<Eigen::Index>(active_mask.size());
  EnvelopeVectors v;
  v.delta_min.resize(n);
  v.delta_max.resize(n);
  v.beta_min.resize(n);
  v.beta_max.resize(n);
  v.theta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const cell::AmplitudeEnvelope& e = active_mask[i] ? active : passive;
    v.delta_min[i] = e.delta_min;
    v.delta_max[i] = e.delta_max;
    v.beta_min[i] = e.beta_min;
    v.beta_max[i] = e.beta_max;
    v.theta[i] = e.theta;
  }
  return v;
}

QuadraticForm quadratic_form(const RISConfig& config,
                             const EnvelopeVectors& env) {
  config.validate();
  Eigen::Index n = config.size();
  check_envelope_sizes(env, n);

  QuadraticForm q;
  q.a.resize(n);
  q.b.resize(n);
  q.c.resize(n);
  Eigen::VectorXd x = env.x();
  Eigen::VectorXd y = env.y();
  for (Eigen::Index i = 0; i < n; ++i) {
    double t = std::clamp(config.alpha_bar[i], 0.0, 1.0);
    double spread = y[i] + x[i] * t;
    Cplx fwd = std::polar(0.25 * spread, env.theta[i]);
    q.a[i] = fwd;
    q.b[i] = 0.5 * y[i] + env.delta_min[i] +
             (0.5 * x[i] + env.beta_min[i] - env.delta_min[i]) * t;
    q.c[i] = std::conj(fwd);
  }
  return q;
}

Eigen::VectorXcd assemble_gamma(const RISConfig& config,
                                const EnvelopeVectors& env) {
  QuadraticForm q = quadratic_form(config, env);
  Eigen::Index n = config.size();
  Eigen::VectorXcd gamma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Cplx phi = std::polar(1.0, config.phases[i]);
    gamma[i] = q.a[i] * phi * phi + q.b[i] * phi + q.c[i];
  }
  return gamma;
}

Eigen::VectorXcd assemble_gamma(const RISConfig& config,
                                const cell::AmplitudeEnvelope& env) {
  return assemble_gamma(config, EnvelopeVectors::broadcast(env, config.size()));
}

Eigen::VectorXcd dgamma_dalpha(const RISConfig& config,
                               const EnvelopeVectors& env) {
  config.validate();
  Eigen::Index n = config.size();
  check_envelope_sizes(env, n);
  Eigen::VectorXd x = env.x();
  Eigen::VectorXcd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Cplx phi = std::polar(1.0, config.phases[i]);
    Cplx fwd = std::polar(0.25 * x[i], env.theta[i]);
    d[i] = fwd * phi * phi +
           (0.5 * x[i] + env.beta_min[i] - env.delta_min[i]) * phi +
           std::conj(fwd);
  }
  return d;
}

Eigen::VectorXcd exact_gamma(const RISConfig& config,
                             const cell::CircuitParams& circuit) {
  config.validate();
  Eigen::Index n = config.size();
  Eigen::VectorXcd gamma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto bounds = cell::amplitude_bounds_exact(config.phases[i], circuit);
    if (!bounds) {
      throw SolverError("exact_gamma: element " + std::to_string(i) +
                        " phase " + std::to_string(config.phases[i]) +
                        " rad not realizable by the circuit");
    }
    double t = std::clamp(config.alpha_bar[i], 0.0, 1.0);
    double alpha = bounds->alpha_min + t * (bounds->alpha_max - bounds->alpha_min);
    gamma[i] = std::polar(alpha, config.phases[i]);
  }
  return gamma;
}

}  // namespace arisim::reflect
