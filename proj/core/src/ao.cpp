#include "arisim/ao.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "arisim/errors.hpp"

namespace arisim::ao {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Cplx = std::complex<double>;

void bump(long* evals) {
  if (evals) ++*evals;
}

MatrixXcd lifted_solve(MatrixXcd cov, const MatrixXcd& rhs) {
  Eigen::Index m = cov.rows();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(cov, Eigen::EigenvaluesOnly);
  double lam_max = es.eigenvalues().maxCoeff();
  double lam_min = es.eigenvalues().minCoeff();
  if (!(lam_min > 0.0) || lam_max > 1e12 * lam_min) {
    double shift = 1e-12 * cov.real().trace() / static_cast<double>(m);
    cov += shift * MatrixXcd::Identity(m, m);
  }
  return cov.ldlt().solve(rhs);
}

// Water-filling power allocation over channel-mode gains.
VectorXd waterfill(const VectorXd& gains, double p_total) {
  Eigen::Index k = gains.size();
  VectorXd p = VectorXd::Zero(k);
  std::vector<int> idx;
  for (int i = 0; i < k; ++i) {
    if (gains[i] > 1e-300) idx.push_back(i);
  }
  if (idx.empty() || !(p_total > 0.0)) return p;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return gains[a] > gains[b]; });
  int m = static_cast<int>(idx.size());
  double mu = 0.0;
  double inv_sum = 0.0;
  int used = 0;
  for (int j = 0; j < m; ++j) {
    inv_sum += 1.0 / gains[idx[j]];
    double cand = (p_total + inv_sum) / (j + 1);
    if (cand >= 1.0 / gains[idx[j]]) {
      mu = cand;
      used = j + 1;
    }
  }
  for (int j = 0; j < used; ++j) {
    p[idx[j]] = std::max(0.0, mu - 1.0 / gains[idx[j]]);
  }
  return p;
}

MatrixXcd closed_form_precoder(const VectorXcd& gamma,
                               const mimo::MimoChannels& ch,
                               const mimo::MimoScenario& sc) {
  MatrixXcd ht = mimo::effective_channel(ch, gamma);
  MatrixXcd g = ch.h2 * gamma.asDiagonal();
  Eigen::Index m_r = ht.rows();
  MatrixXcd s = sc.sigma2_w * sc.f_s * (g * g.adjoint()) +
                sc.sigma2_w * sc.f_r * MatrixXcd::Identity(m_r, m_r);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(s);
  MatrixXcd s_isqrt = es.operatorInverseSqrt();
  MatrixXcd m = s_isqrt * ht;
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::Index k = std::min<Eigen::Index>(sc.d, svd.singularValues().size());
  VectorXd gains(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double sv = svd.singularValues()[i];
    gains[i] = sv * sv;
  }
  VectorXd p = waterfill(gains, sc.p_t_w);
  MatrixXcd v = MatrixXcd::Zero(sc.m_t, sc.d);
  for (Eigen::Index i = 0; i < k; ++i) {
    v.col(i) = svd.matrixV().col(i) * std::sqrt(p[i]);
  }
  return v;
}

// Hardware-fit payload cached per circuit/diode combination.
struct HardwareFit {
  cell::AmplitudeEnvelope active_env;
  cell::AmplitudeEnvelope passive_env;
  double p_min = 0.0;
  double p_max = 0.0;
  std::vector<double> pai_alpha;
  std::vector<double> pai_power;
};

std::string fit_key(const cell::CircuitParams& cp, double passive_r,
                    const cell::DiodeParams& diode) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|"
                "%.17g|%.17g",
                cp.l1_h, cp.l2_h, cp.z0_ohm, cp.omega_rad_s, cp.r_min_ohm,
                cp.r_max_ohm, cp.c_min_f, cp.c_max_f, passive_r, diode.r0_ohm,
                diode.v0_volt, diode.m);
  return buf;
}

std::shared_ptr<const HardwareFit> hardware_fit(
    const cell::CircuitParams& active, double passive_r,
    const cell::DiodeParams& diode) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const HardwareFit>> cache;
  std::string key = fit_key(active, passive_r, diode);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  auto fit = std::make_shared<HardwareFit>();
  fit->active_env = cell::fit_envelope(active);
  cell::CircuitParams passive = active;
  passive.r_min_ohm = passive_r;
  passive.r_max_ohm = passive_r;
  fit->passive_env = cell::fit_envelope(passive);
  fit->p_min = cell::power_for_resistance(active.r_max_ohm, diode);
  fit->p_max = cell::power_for_resistance(active.r_min_ohm, diode);

  // Min-over-phase power required to realize each physical amplitude:
  // any value on the lower envelope costs the weak-termination floor; the
  // amplified range is scanned across the feasible window.
  constexpr int kAmpGrid = 65;
  constexpr int kPhaseGrid = 65;
  const cell::AmplitudeEnvelope& env = fit->active_env;
  fit->pai_alpha.resize(kAmpGrid);
  fit->pai_power.assign(kAmpGrid, std::numeric_limits<double>::infinity());
  for (int i = 0; i < kAmpGrid; ++i) {
    fit->pai_alpha[i] = env.delta_min + (env.beta_max - env.delta_min) * i /
                                            (kAmpGrid - 1);
    if (fit->pai_alpha[i] <= env.delta_max) fit->pai_power[i] = fit->p_min;
  }
  cell::PhaseSweep strong(active.r_min_ohm, active);
  cell::PhaseSweep weak(active.r_max_ohm, active);
  for (int j = 0; j < kPhaseGrid; ++j) {
    double phase = env.window_lo +
                   env.window_width * (0.005 + 0.99 * j / (kPhaseGrid - 1));
    phase = cell::wrap_angle(phase);
    auto b = cell::amplitude_bounds_from_sweeps(strong, weak, phase);
    if (!b) continue;
    for (int i = 0; i < kAmpGrid; ++i) {
      double a = fit->pai_alpha[i];
      if (a < b->alpha_min || a > b->alpha_max) continue;
      if (fit->pai_power[i] <= fit->p_min) continue;  // already at the floor
      double r = cell::resistance_for_amplitude(phase, a, active, *b);
      double p = cell::power_for_resistance(r, diode);
      fit->pai_power[i] = std::min(fit->pai_power[i], p);
    }
  }
  // Fill unreachable grid cells from the neighbor below, then enforce
  // monotonicity and apply a small optimism margin so the decoupled model's
  // feasible set contains the coupled one.
  for (int i = 0; i < kAmpGrid; ++i) {
    if (!std::isfinite(fit->pai_power[i])) {
      fit->pai_power[i] = (i > 0) ? fit->pai_power[i - 1] : fit->p_min;
    }
    if (i > 0) {
      fit->pai_power[i] = std::max(fit->pai_power[i], fit->pai_power[i - 1]);
    }
  }
  for (double& p : fit->pai_power) p *= 0.999;

  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(key, std::move(fit));
  (void)inserted;
  return it->second;
}

// Reusable endpoint sweeps of the active circuit for the power chain.
struct ActiveSweeps {
  cell::PhaseSweep strong;
  cell::PhaseSweep weak;
  explicit ActiveSweeps(const cell::CircuitParams& cp)
      : strong(cp.r_min_ohm, cp), weak(cp.r_max_ohm, cp) {}
};

double element_power_chain(double phase, double alpha_bar,
                           const RISModel& model, const ActiveSweeps& sw) {
  auto b = cell::amplitude_bounds_from_sweeps(sw.strong, sw.weak, phase);
  if (!b) {
    throw SolverError("ris_power: phase " + std::to_string(phase) +
                      " rad not realizable by the active circuit");
  }
  double t = std::clamp(alpha_bar, 0.0, 1.0);
  if (t <= 1e-12) return model.p_elem_min_w;
  if (t >= 1.0 - 1e-12) return model.p_elem_max_w;
  double alpha = b->alpha_min + t * (b->alpha_max - b->alpha_min);
  double r =
      cell::resistance_for_amplitude(phase, alpha, model.active_circuit, *b);
  return cell::power_for_resistance(r, model.diode);
}

double active_power(const VectorXd& alpha_bar, const VectorXd& phases,
                    const RISModel& model, const ActiveSweeps& sw) {
  double p = 0.0;
  for (int n = 0; n < model.n_act; ++n) {
    p += element_power_chain(phases[n], alpha_bar[n], model, sw);
  }
  return p;
}

void require_budget_floor(const mimo::MimoScenario& sc, const RISModel& model) {
  double floor = model.n_act * model.p_elem_min_w;
  if (sc.p_ris_w < floor * (1.0 - 1e-12)) {
    throw SolverError(
        "RIS budget " + std::to_string(sc.p_ris_w) +
        " W infeasible: " + std::to_string(model.n_act) +
        " active elements require at least " + std::to_string(floor) + " W");
  }
}

void require_model_match(const mimo::MimoScenario& sc, const RISModel& model) {
  if (model.n_total != sc.n || model.n_act != sc.n_act) {
    throw ConfigError("RIS model element split does not match the scenario");
  }
}

// Projection onto {0 <= x <= 1 (or a box), slope . x <= budget} with pinned
// tail entries; the dual step is a bisection over the halfspace multiplier.
VectorXd project_box_halfspace(const VectorXd& y, const VectorXd& lo,
                               const VectorXd& hi, const VectorXd& slope,
                               double budget, int n_free) {
  VectorXd x = y;
  for (int n = 0; n < y.size(); ++n) {
    x[n] = std::clamp(y[n], lo[n], hi[n]);
  }
  auto value = [&](double lam) {
    VectorXd z = x;
    for (int n = 0; n < n_free; ++n) {
      z[n] = std::clamp(y[n] - lam * slope[n], lo[n], hi[n]);
    }
    return z;
  };
  auto dot_free = [&](const VectorXd& z) {
    double s = 0.0;
    for (int n = 0; n < n_free; ++n) s += slope[n] * z[n];
    return s;
  };
  double base = dot_free(x);
  if (base <= budget) return x;
  double lam_hi = 1.0;
  for (int it = 0; it < 80 && dot_free(value(lam_hi)) > budget; ++it) {
    lam_hi *= 2.0;
  }
  VectorXd best = value(lam_hi);
  if (dot_free(best) > budget) return best;  // slope degenerate; caller guards
  double lam_lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lam_lo + lam_hi);
    VectorXd z = value(mid);
    if (dot_free(z) <= budget) {
      lam_hi = mid;
      best = z;
    } else {
      lam_lo = mid;
    }
  }
  return best;
}

double pai_total_power(const VectorXd& amplitudes, const RISModel& model) {
  double p = 0.0;
  for (int n = 0; n < model.n_act; ++n) {
    p += model.pai_element_power(amplitudes[n]);
  }
  return p;
}

double rate_of_gamma(const MatrixXcd& v, const VectorXcd& gamma,
                     const mimo::MimoChannels& ch,
                     const mimo::MimoScenario& sc) {
  return mimo::rate_lmmse(v, gamma, ch, sc.sigma2_w, sc.f_r, sc.f_s);
}

}  // namespace

reflect::EnvelopeVectors RISModel::envelope_vectors() const {
  std::vector<bool> mask(n_total);
  for (int i = 0; i < n_total; ++i) mask[i] = is_active(i);
  return reflect::EnvelopeVectors::hybrid(active_env, passive_env, mask);
}

double RISModel::pai_element_power(double alpha) const {
  if (pai_alpha_grid.empty()) return 0.0;
  if (alpha <= pai_alpha_grid.front()) return pai_power_w.front();
  if (alpha >= pai_alpha_grid.back()) return pai_power_w.back();
  auto it =
      std::upper_bound(pai_alpha_grid.begin(), pai_alpha_grid.end(), alpha);
  size_t k = static_cast<size_t>(it - pai_alpha_grid.begin());
  double a0 = pai_alpha_grid[k - 1], a1 = pai_alpha_grid[k];
  double t = (alpha - a0) / (a1 - a0);
  return pai_power_w[k - 1] + t * (pai_power_w[k] - pai_power_w[k - 1]);
}

RISModel make_ris_model(int n_total, int n_act, double passive_r_ohm,
                        const cell::CircuitParams& active_circuit,
                        const cell::DiodeParams& diode) {
  if (n_total < 1 || n_act < 0 || n_act > n_total) {
    throw ConfigError("make_ris_model: need 0 <= N_act <= N with N >= 1");
  }
  auto fit = hardware_fit(active_circuit, passive_r_ohm, diode);
  RISModel m;
  m.active_circuit = active_circuit;
  m.passive_circuit = active_circuit;
  m.passive_circuit.r_min_ohm = passive_r_ohm;
  m.passive_circuit.r_max_ohm = passive_r_ohm;
  m.active_env = fit->active_env;
  m.passive_env = fit->passive_env;
  m.diode = diode;
  m.n_total = n_total;
  m.n_act = n_act;
  m.p_elem_min_w = fit->p_min;
  m.p_elem_max_w = fit->p_max;
  m.pai_alpha_grid = fit->pai_alpha;
  m.pai_power_w = fit->pai_power;
  return m;
}

double ris_power(const VectorXd& alpha_bar, const VectorXd& phases,
                 const RISModel& model) {
  if (alpha_bar.size() != model.n_total || phases.size() != model.n_total) {
    throw ConfigError("ris_power: vector lengths do not match the model");
  }
  if (model.n_act == 0) return 0.0;
  ActiveSweeps sw(model.active_circuit);
  return active_power(alpha_bar, phases, model, sw);
}

Eigen::VectorXcd exact_gamma_mixed(const reflect::RISConfig& config,
                                   const RISModel& model) {
  config.validate();
  if (config.size() != model.n_total) {
    throw ConfigError("exact_gamma_mixed: configuration size mismatch");
  }
  std::unique_ptr<ActiveSweeps> act;
  std::unique_ptr<ActiveSweeps> pas;
  if (model.n_act > 0) act = std::make_unique<ActiveSweeps>(model.active_circuit);
  if (model.n_act < model.n_total) {
    pas = std::make_unique<ActiveSweeps>(model.passive_circuit);
  }
  VectorXcd gamma(model.n_total);
  for (int n = 0; n < model.n_total; ++n) {
    const ActiveSweeps& sw = model.is_active(n) ? *act : *pas;
    auto b = cell::amplitude_bounds_from_sweeps(sw.strong, sw.weak,
                                                config.phases[n]);
    if (!b) {
      throw SolverError("exact_gamma_mixed: element " + std::to_string(n) +
                        " phase " + std::to_string(config.phases[n]) +
                        " rad not realizable");
    }
    double t = std::clamp(config.alpha_bar[n], 0.0, 1.0);
    double alpha = b->alpha_min + t * (b->alpha_max - b->alpha_min);
    gamma[n] = std::polar(alpha, config.phases[n]);
  }
  return gamma;
}

double surrogate_rate(const MatrixXcd& v, const reflect::RISConfig& config,
                      const RISModel& model, const mimo::MimoChannels& ch,
                      const mimo::MimoScenario& sc) {
  VectorXcd gamma = reflect::assemble_gamma(config, model.envelope_vectors());
  return rate_of_gamma(v, gamma, ch, sc);
}

Eigen::VectorXcd rate_gamma_gradient(const MatrixXcd& v, const VectorXcd& gamma,
                                     const mimo::MimoChannels& ch,
                                     const mimo::MimoScenario& sc) {
  MatrixXcd ht = mimo::effective_channel(ch, gamma);
  MatrixXcd a = ht * v;                         // M_R x d
  MatrixXcd g2g = ch.h2 * gamma.asDiagonal();   // M_R x N
  Eigen::Index m_r = ht.rows();
  Eigen::Index n = gamma.size();
  Eigen::Index d = v.cols();
  MatrixXcd s = sc.sigma2_w * sc.f_s * (g2g * g2g.adjoint()) +
                sc.sigma2_w * sc.f_r * MatrixXcd::Identity(m_r, m_r);
  MatrixXcd full = a * a.adjoint() + s;
  MatrixXcd hv = ch.h1 * v;  // N x d: per-stream RIS excitation

  VectorXcd grad = VectorXcd::Zero(n);
  const double ln2 = std::log(2.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    MatrixXcd b_cov = full - a.col(i) * a.col(i).adjoint();
    VectorXcd b = lifted_solve(std::move(b_cov), a.col(i));
    double s_i = std::max(0.0, std::real(a.col(i).dot(b)));
    VectorXcd c = ch.h2.adjoint() * b;  // N
    VectorXcd u = hv.col(i).conjugate().cwiseProduct(c);
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == i) continue;
      Cplx t_ij = a.col(j).dot(b);  // a_j^H b
      u -= std::conj(t_ij) * hv.col(j).conjugate().cwiseProduct(c);
    }
    u -= sc.sigma2_w * sc.f_s *
         gamma.cwiseProduct(c.cwiseAbs2().cast<Cplx>());
    grad += u / ((1.0 + s_i) * ln2);
  }
  return grad;
}

Eigen::VectorXd phase_gradient(const MatrixXcd& v,
                               const reflect::RISConfig& config,
                               const RISModel& model,
                               const mimo::MimoChannels& ch,
                               const mimo::MimoScenario& sc) {
  reflect::EnvelopeVectors env = model.envelope_vectors();
  reflect::QuadraticForm q = reflect::quadratic_form(config, env);
  Eigen::Index n = config.size();
  VectorXcd gamma(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Cplx phi = std::polar(1.0, config.phases[k]);
    gamma[k] = q.a[k] * phi * phi + q.b[k] * phi + q.c[k];
  }
  VectorXcd g = rate_gamma_gradient(v, gamma, ch, sc);
  VectorXd grad(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Cplx phi = std::polar(1.0, config.phases[k]);
    Cplx dgam = Cplx(0.0, 1.0) * (2.0 * q.a[k] * phi * phi + q.b[k] * phi);
    grad[k] = 2.0 * std::real(std::conj(g[k]) * dgam);
  }
  return grad;
}

Eigen::VectorXd amplitude_gradient(const MatrixXcd& v,
                                   const reflect::RISConfig& config,
                                   const RISModel& model,
                                   const mimo::MimoChannels& ch,
                                   const mimo::MimoScenario& sc) {
  reflect::EnvelopeVectors env = model.envelope_vectors();
  VectorXcd gamma = reflect::assemble_gamma(config, env);
  VectorXcd g = rate_gamma_gradient(v, gamma, ch, sc);
  VectorXcd d = reflect::dgamma_dalpha(config, env);
  Eigen::Index n = config.size();
  VectorXd grad(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    grad[k] = 2.0 * std::real(std::conj(g[k]) * d[k]);
  }
  return grad;
}

MatrixXcd optimize_precoder(const VectorXcd& gamma,
                            const mimo::MimoChannels& ch,
                            const mimo::MimoScenario& sc,
                            const MatrixXcd& v_incumbent, long* evals) {
  MatrixXcd v = closed_form_precoder(gamma, ch, sc);
  double r_new = rate_of_gamma(v, gamma, ch, sc);
  bump(evals);
  if (v_incumbent.size() > 0 && v_incumbent.squaredNorm() > 0.0) {
    double r_old = rate_of_gamma(v_incumbent, gamma, ch, sc);
    bump(evals);
    if (r_old > r_new + 1e-12) return v_incumbent;
  }
  return v;
}

Eigen::VectorXd optimize_phases(const MatrixXcd& v,
                                const reflect::RISConfig& config,
                                const RISModel& model,
                                const mimo::MimoChannels& ch,
                                const mimo::MimoScenario& sc, int max_iters,
                                long* evals, bool* stalled) {
  reflect::RISConfig cfg = config;
  double obj = surrogate_rate(v, cfg, model, ch, sc);
  bump(evals);
  // The exact supply power at fixed normalized controls varies with the
  // phases, so a pure rate ascent could hand the amplitude block an
  // over-budget point and force it to back off (a rate drop). Accepted
  // steps must keep the current amplitudes affordable.
  std::optional<ActiveSweeps> sw;
  if (model.n_act > 0) sw.emplace(model.active_circuit);
  auto affordable = [&](const reflect::RISConfig& c) {
    return !sw ||
           active_power(c.alpha_bar, c.phases, model, *sw) <=
               sc.p_ris_w * (1.0 + 1e-12);
  };
  double step = 0.25;
  bool st = false;
  for (int it = 0; it < max_iters; ++it) {
    VectorXd grad = phase_gradient(v, cfg, model, ch, sc);
    bump(evals);
    if (grad.norm() < 1e-12 * std::max(1.0, std::abs(obj))) break;
    bool improved = false;
    for (int bt = 0; bt < 24; ++bt) {
      reflect::RISConfig trial = cfg;
      for (Eigen::Index n = 0; n < cfg.size(); ++n) {
        trial.phases[n] = cell::clamp_phase_to_window(
            model.env_of(static_cast<int>(n)),
            cfg.phases[n] + step * grad[n]);
      }
      double to = surrogate_rate(v, trial, model, ch, sc);
      bump(evals);
      if (to > obj + 1e-14 && affordable(trial)) {
        cfg = trial;
        obj = to;
        step = std::min(step * 1.6, 2.0);
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      st = it == 0;
      break;
    }
  }
  if (stalled) *stalled = st;
  return cfg.phases;
}

Eigen::VectorXd optimize_amplitudes(const MatrixXcd& v,
                                    const reflect::RISConfig& config,
                                    const RISModel& model,
                                    const mimo::MimoChannels& ch,
                                    const mimo::MimoScenario& sc,
                                    int sca_iters, int pgd_steps, long* evals) {
  reflect::RISConfig cfg = config;
  if (model.n_act == 0) return cfg.alpha_bar;
  require_budget_floor(sc, model);
  ActiveSweeps sw(model.active_circuit);

  auto power_of = [&](const VectorXd& ab) {
    return active_power(ab, cfg.phases, model, sw);
  };
  double p_now = power_of(cfg.alpha_bar);
  for (int k = 0; k < 80 && p_now > sc.p_ris_w * (1.0 + 1e-12); ++k) {
    cfg.alpha_bar.head(model.n_act) *= 0.5;
    if (cfg.alpha_bar.head(model.n_act).maxCoeff() < 1e-14) {
      cfg.alpha_bar.head(model.n_act).setZero();
    }
    p_now = power_of(cfg.alpha_bar);
  }
  double obj = surrogate_rate(v, cfg, model, ch, sc);
  bump(evals);

  Eigen::Index n = cfg.size();
  VectorXd lo = VectorXd::Zero(n), hi = VectorXd::Ones(n);
  for (Eigen::Index k = model.n_act; k < n; ++k) {
    lo[k] = hi[k] = cfg.alpha_bar[k];  // passive entries pinned
  }

  for (int t = 0; t < sca_iters; ++t) {
    // Separable exact chain: one-sided finite-difference slope per element.
    VectorXd slope = VectorXd::Zero(n);
    const double h = 1e-4;
    for (int k = 0; k < model.n_act; ++k) {
      double ab = cfg.alpha_bar[k];
      double base = element_power_chain(cfg.phases[k], ab, model, sw);
      double fd;
      if (ab + h <= 1.0) {
        fd = (element_power_chain(cfg.phases[k], ab + h, model, sw) - base) / h;
      } else {
        fd = (base - element_power_chain(cfg.phases[k], ab - h, model, sw)) / h;
      }
      slope[k] = std::max(fd, 0.0);
    }
    double budget = sc.p_ris_w - p_now + slope.dot(cfg.alpha_bar);

    VectorXd x = cfg.alpha_bar;
    double inner_obj = obj;
    double pstep = 0.2;
    bool any = false;
    for (int k = 0; k < pgd_steps; ++k) {
      reflect::RISConfig probe = cfg;
      probe.alpha_bar = x;
      VectorXd grad = amplitude_gradient(v, probe, model, ch, sc);
      bump(evals);
      bool improved = false;
      for (int bt = 0; bt < 18; ++bt) {
        VectorXd trial = project_box_halfspace(x + pstep * grad, lo, hi, slope,
                                               budget, model.n_act);
        reflect::RISConfig tcfg = cfg;
        tcfg.alpha_bar = trial;
        double to = surrogate_rate(v, tcfg, model, ch, sc);
        bump(evals);
        if (to > inner_obj + 1e-14) {
          x = trial;
          inner_obj = to;
          pstep = std::min(pstep * 1.6, 1.0);
          improved = true;
          any = true;
          break;
        }
        pstep *= 0.5;
      }
      if (!improved) break;
    }
    if (!any) break;

    // Accept only exact-chain-feasible points; fall back toward the
    // incumbent when the linearization overshoots.
    double p_x = power_of(x);
    int guard = 0;
    while (p_x > sc.p_ris_w * (1.0 + 1e-12) && guard++ < 60) {
      x = cfg.alpha_bar + 0.5 * (x - cfg.alpha_bar);
      p_x = power_of(x);
    }
    if (p_x > sc.p_ris_w * (1.0 + 1e-12)) break;
    reflect::RISConfig xcfg = cfg;
    xcfg.alpha_bar = x;
    double ox = surrogate_rate(v, xcfg, model, ch, sc);
    bump(evals);
    if (ox > obj + 1e-14) {
      cfg.alpha_bar = x;
      obj = ox;
      p_now = p_x;
    } else {
      break;
    }
  }
  return cfg.alpha_bar;
}

AOState ao_solve(const mimo::MimoScenario& sc, const mimo::MimoChannels& ch,
                 const RISModel& model, const AOOptions& opt) {
  sc.validate();
  require_model_match(sc, model);
  if (opt.j_alt < 1) throw ConfigError("ao_solve: j_alt must be >= 1");
  if (model.n_act > 0) require_budget_floor(sc, model);

  AOState st;
  int n = sc.n;
  st.config.phases.resize(n);
  for (int k = 0; k < n; ++k) {
    const cell::AmplitudeEnvelope& e = model.env_of(k);
    st.config.phases[k] = cell::clamp_phase_to_window(e, -e.theta);
  }
  st.config.alpha_bar = VectorXd::Zero(n);
  st.v = MatrixXcd::Zero(sc.m_t, sc.d);
  st.rate_trace.push_back(0.0);

  long evals = 0;
  double r_outer_prev = 0.0;
  double r = 0.0;
  for (int j = 1; j <= opt.j_alt; ++j) {
    VectorXcd gamma =
        reflect::assemble_gamma(st.config, model.envelope_vectors());
    st.v = optimize_precoder(gamma, ch, sc, st.v, &evals);
    r = surrogate_rate(st.v, st.config, model, ch, sc);
    ++evals;
    st.rate_trace.push_back(r);

    if (opt.optimize_ris) {
      bool stall = false;
      st.config.phases = optimize_phases(st.v, st.config, model, ch, sc,
                                         opt.phase_iters, &evals, &stall);
      r = surrogate_rate(st.v, st.config, model, ch, sc);
      ++evals;
      st.rate_trace.push_back(r);

      st.config.alpha_bar =
          optimize_amplitudes(st.v, st.config, model, ch, sc, opt.sca_iters,
                              opt.pgd_steps, &evals);
      r = surrogate_rate(st.v, st.config, model, ch, sc);
      ++evals;
      st.rate_trace.push_back(r);
      st.stalled = st.stalled || stall;
    }
    st.iterations = j;
    if (j >= 2 &&
        std::abs(r - r_outer_prev) <=
            opt.epsilon * std::max(std::abs(r_outer_prev), 1e-12)) {
      break;
    }
    r_outer_prev = r;
  }
  st.surrogate_rate = st.rate_trace.back();
  VectorXcd gamma_fin =
      reflect::assemble_gamma(st.config, model.envelope_vectors());
  st.w = mimo::lmmse_combiner(st.v, gamma_fin, ch, sc.sigma2_w, sc.f_r, sc.f_s);
  st.objective_evaluations = evals;

  VectorXcd gamma_ex = exact_gamma_mixed(st.config, model);
  MatrixXcd v_ex = optimize_precoder(gamma_ex, ch, sc, st.v, nullptr);
  st.achieved_rate_exact = rate_of_gamma(v_ex, gamma_ex, ch, sc);
  return st;
}

namespace {

// Decoupled-model inner loop shared by pai_solve overloads.
AOState pai_solve_impl(const mimo::MimoScenario& sc,
                       const mimo::MimoChannels& ch, const RISModel& model,
                       const AOOptions& opt, VectorXd ang, VectorXd amp) {
  sc.validate();
  require_model_match(sc, model);
  if (model.n_act > 0) require_budget_floor(sc, model);
  int n = sc.n;

  VectorXd lo(n), hi(n);
  for (int k = 0; k < n; ++k) {
    const cell::AmplitudeEnvelope& e = model.env_of(k);
    lo[k] = e.delta_min;
    hi[k] = e.beta_max;
    amp[k] = std::clamp(amp[k], lo[k], hi[k]);
  }
  // Pull the start into the decoupled budget if needed.
  {
    double p = pai_total_power(amp, model);
    for (int it = 0; it < 80 && p > sc.p_ris_w * (1.0 + 1e-12); ++it) {
      for (int k = 0; k < model.n_act; ++k) {
        amp[k] = lo[k] + 0.5 * (amp[k] - lo[k]);
      }
      p = pai_total_power(amp, model);
    }
  }

  auto gamma_of = [&](const VectorXd& a, const VectorXd& th) {
    VectorXcd g(n);
    for (int k = 0; k < n; ++k) g[k] = std::polar(a[k], th[k]);
    return g;
  };

  AOState st;
  st.v = MatrixXcd::Zero(sc.m_t, sc.d);
  st.rate_trace.push_back(0.0);
  long evals = 0;
  double r = 0.0, r_outer_prev = 0.0;

  for (int j = 1; j <= opt.j_alt; ++j) {
    VectorXcd gamma = gamma_of(amp, ang);
    st.v = optimize_precoder(gamma, ch, sc, st.v, &evals);
    r = rate_of_gamma(st.v, gamma, ch, sc);
    ++evals;
    st.rate_trace.push_back(r);

    // Phase ascent, unconstrained (angles wrap).
    {
      double obj = r;
      double step = 0.25;
      for (int it = 0; it < opt.phase_iters; ++it) {
        VectorXcd g = rate_gamma_gradient(st.v, gamma_of(amp, ang), ch, sc);
        ++evals;
        VectorXd grad(n);
        for (int k = 0; k < n; ++k) {
          Cplx gam = std::polar(amp[k], ang[k]);
          grad[k] = 2.0 * std::real(std::conj(g[k]) * Cplx(0.0, 1.0) * gam);
        }
        if (grad.norm() < 1e-12 * std::max(1.0, std::abs(obj))) break;
        bool improved = false;
        for (int bt = 0; bt < 24; ++bt) {
          VectorXd trial = ang + step * grad;
          for (int k = 0; k < n; ++k) trial[k] = cell::wrap_angle(trial[k]);
          double to = rate_of_gamma(st.v, gamma_of(amp, trial), ch, sc);
          ++evals;
          if (to > obj + 1e-14) {
            ang = trial;
            obj = to;
            step = std::min(step * 1.6, 2.0);
            improved = true;
            break;
          }
          step *= 0.5;
        }
        if (!improved) break;
      }
      r = obj;
      st.rate_trace.push_back(r);
    }

    // Amplitude ascent under the tabulated decoupled power curve.
    {
      double obj = r;
      double p_now = pai_total_power(amp, model);
      for (int t = 0; t < opt.sca_iters; ++t) {
        VectorXd slope = VectorXd::Zero(n);
        const double h = 1e-4;
        for (int k = 0; k < model.n_act; ++k) {
          double a0 = amp[k];
          double a1 = std::min(a0 + h * (hi[k] - lo[k]), hi[k]);
          if (a1 <= a0) a1 = a0, a0 = a0 - h * (hi[k] - lo[k]);
          slope[k] = std::max(
              (model.pai_element_power(a1) - model.pai_element_power(a0)) /
                  (a1 - a0),
              0.0);
        }
        double budget = sc.p_ris_w - p_now + slope.dot(amp);
        VectorXd x = amp;
        double inner_obj = obj;
        double pstep = 0.2;
        bool any = false;
        for (int k = 0; k < opt.pgd_steps; ++k) {
          VectorXcd g = rate_gamma_gradient(st.v, gamma_of(x, ang), ch, sc);
          ++evals;
          VectorXd grad(n);
          for (int q = 0; q < n; ++q) {
            grad[q] = 2.0 * std::real(std::conj(g[q]) *
                                      std::polar(1.0, ang[q]));
          }
          bool improved = false;
          for (int bt = 0; bt < 18; ++bt) {
            VectorXd trial = project_box_halfspace(x + pstep * grad, lo, hi,
                                                   slope, budget, model.n_act);
            double to = rate_of_gamma(st.v, gamma_of(trial, ang), ch, sc);
            ++evals;
            if (to > inner_obj + 1e-14) {
              x = trial;
              inner_obj = to;
              pstep = std::min(pstep * 1.6, 1.0);
              improved = true;
              any = true;
              break;
            }
            pstep *= 0.5;
          }
          if (!improved) break;
        }
        if (!any) break;
        double p_x = pai_total_power(x, model);
        int guard = 0;
        while (p_x > sc.p_ris_w * (1.0 + 1e-12) && guard++ < 60) {
          x = amp + 0.5 * (x - amp);
          p_x = pai_total_power(x, model);
        }
        if (p_x > sc.p_ris_w * (1.0 + 1e-12)) break;
        double ox = rate_of_gamma(st.v, gamma_of(x, ang), ch, sc);
        ++evals;
        if (ox > obj + 1e-14) {
          amp = x;
          obj = ox;
          p_now = p_x;
        } else {
          break;
        }
      }
      r = obj;
      st.rate_trace.push_back(r);
    }

    st.iterations = j;
    if (j >= 2 &&
        std::abs(r - r_outer_prev) <=
            opt.epsilon * std::max(std::abs(r_outer_prev), 1e-12)) {
      break;
    }
    r_outer_prev = r;
  }
  st.surrogate_rate = st.rate_trace.back();
  st.objective_evaluations = evals;

  // Projection back onto the coupled model: window clamp, exact-bounds
  // clamp, then a uniform control scale-down if the exact power overruns.
  std::unique_ptr<ActiveSweeps> act;
  std::unique_ptr<ActiveSweeps> pas;
  if (model.n_act > 0) act = std::make_unique<ActiveSweeps>(model.active_circuit);
  if (model.n_act < model.n_total) {
    pas = std::make_unique<ActiveSweeps>(model.passive_circuit);
  }
  st.config.phases.resize(n);
  st.config.alpha_bar.resize(n);
  for (int k = 0; k < n; ++k) {
    const cell::AmplitudeEnvelope& e = model.env_of(k);
    double ph = cell::clamp_phase_to_window(e, ang[k]);
    const ActiveSweeps& sw = model.is_active(k) ? *act : *pas;
    auto b = cell::amplitude_bounds_from_sweeps(sw.strong, sw.weak, ph);
    for (int nudge = 0; !b && nudge < 8; ++nudge) {
      // Window edges can be marginal under the exact sweep; pull inward.
      ph = cell::wrap_angle(ph + 0.02 * (cell::wrap_angle(-e.theta) - ph));
      b = cell::amplitude_bounds_from_sweeps(sw.strong, sw.weak, ph);
    }
    if (!b) {
      throw SolverError("pai_solve: projected phase for element " +
                        std::to_string(k) + " is not realizable");
    }
    st.config.phases[k] = ph;
    double span = b->alpha_max - b->alpha_min;
    double ac = std::clamp(amp[k], b->alpha_min, b->alpha_max);
    st.config.alpha_bar[k] = span > 1e-15 ? (ac - b->alpha_min) / span : 0.0;
  }
  if (model.n_act > 0) {
    double p_ex = active_power(st.config.alpha_bar, st.config.phases, model,
                               *act);
    if (p_ex > sc.p_ris_w * (1.0 + 1e-12)) {
      double s_lo = 0.0, s_hi = 1.0;
      VectorXd base = st.config.alpha_bar;
      for (int it = 0; it < 50; ++it) {
        double mid = 0.5 * (s_lo + s_hi);
        VectorXd trial = base;
        trial.head(model.n_act) *= mid;
        if (active_power(trial, st.config.phases, model, *act) <=
            sc.p_ris_w * (1.0 + 1e-12)) {
          s_lo = mid;
        } else {
          s_hi = mid;
        }
      }
      st.config.alpha_bar.head(model.n_act) *= s_lo;
    }
  }

  VectorXcd gamma_ex = exact_gamma_mixed(st.config, model);
  MatrixXcd v_ex = optimize_precoder(gamma_ex, ch, sc, st.v, nullptr);
  st.v = v_ex;
  st.w = mimo::lmmse_combiner(v_ex, gamma_ex, ch, sc.sigma2_w, sc.f_r, sc.f_s);
  st.achieved_rate_exact = rate_of_gamma(v_ex, gamma_ex, ch, sc);
  return st;
}

}  // namespace

AOState pai_solve(const mimo::MimoScenario& sc, const mimo::MimoChannels& ch,
                  const RISModel& model, const AOOptions& opt) {
  int n = sc.n;
  VectorXd ang(n), amp(n);
  for (int k = 0; k < n; ++k) {
    const cell::AmplitudeEnvelope& e = model.env_of(k);
    ang[k] = cell::wrap_angle(-e.theta);
    amp[k] = e.delta_min;
  }
  return pai_solve_impl(sc, ch, model, opt, std::move(ang), std::move(amp));
}

AOState pai_solve(const mimo::MimoScenario& sc, const mimo::MimoChannels& ch,
                  const RISModel& model, const AOOptions& opt,
                  const Eigen::VectorXd& init_angles,
                  const Eigen::VectorXd& init_amplitudes) {
  if (init_angles.size() != sc.n || init_amplitudes.size() != sc.n) {
    throw ConfigError("pai_solve: warm-start vectors must have length N");
  }
  return pai_solve_impl(sc, ch, model, opt, init_angles, init_amplitudes);
}

FeasibilityReport check_feasibility(const AOState& state,
                                    const mimo::MimoScenario& sc,
                                    const RISModel& model) {
  FeasibilityReport rep;
  rep.trace_w = state.v.squaredNorm();
  const reflect::RISConfig& cfg = state.config;
  for (Eigen::Index k = 0; k < cfg.size(); ++k) {
    rep.max_alpha_bar_violation =
        std::max({rep.max_alpha_bar_violation, -cfg.alpha_bar[k],
                  cfg.alpha_bar[k] - 1.0});
    const cell::AmplitudeEnvelope& e = model.env_of(static_cast<int>(k));
    if (!cell::phase_in_window(e, cfg.phases[k])) {
      double edge = std::min(
          std::abs(cell::wrap_angle(cfg.phases[k] - e.window_lo)),
          std::abs(cell::wrap_angle(cfg.phases[k] -
                                    (e.window_lo + e.window_width))));
      rep.max_phase_window_violation =
          std::max(rep.max_phase_window_violation, edge);
    }
  }
  rep.ris_power_w =
      model.n_act > 0
          ? ris_power(cfg.alpha_bar, cfg.phases, model)
          : 0.0;

  VectorXcd gamma_sur = reflect::assemble_gamma(cfg, model.envelope_vectors());
  std::unique_ptr<ActiveSweeps> act;
  std::unique_ptr<ActiveSweeps> pas;
  if (model.n_act > 0) act = std::make_unique<ActiveSweeps>(model.active_circuit);
  if (model.n_act < model.n_total) {
    pas = std::make_unique<ActiveSweeps>(model.passive_circuit);
  }
  for (Eigen::Index k = 0; k < cfg.size(); ++k) {
    const ActiveSweeps& sw =
        model.is_active(static_cast<int>(k)) ? *act : *pas;
    const cell::AmplitudeEnvelope& e = model.env_of(static_cast<int>(k));
    auto b = cell::amplitude_bounds_from_sweeps(sw.strong, sw.weak,
                                                cfg.phases[k]);
    if (!b) {
      rep.max_envelope_violation =
          std::max(rep.max_envelope_violation, 1.0);
      continue;
    }
    double a = std::abs(gamma_sur[k]);
    double viol = std::max(b->alpha_min - e.err_min - a,
                           a - (b->alpha_max + e.err_max));
    rep.max_envelope_violation = std::max(rep.max_envelope_violation, viol);
  }

  // err_min/err_max are grid maxima of the fit deviation, so between grid
  // points the true corridor can be wider by O(step^2 * curvature) ~ 1e-5;
  // the envelope slack must absorb that measurement truncation.
  rep.ok = rep.trace_w <= sc.p_t_w * (1.0 + 1e-9) &&
           rep.ris_power_w <= sc.p_ris_w * (1.0 + 1e-9) &&
           rep.max_alpha_bar_violation <= 1e-9 &&
           rep.max_phase_window_violation <= 1e-9 &&
           rep.max_envelope_violation <= 1e-4;
  return rep;
}

}  // namespace arisim::ao
