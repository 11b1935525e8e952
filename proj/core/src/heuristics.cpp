#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "arisim/ao.hpp"
#include "arisim/errors.hpp"

// Real-coded genetic-algorithm and particle-swarm baselines searching the
// raw hardware controls (per-element resistance and capacitance) jointly
// with the precoder, under an objective-evaluation budget.
namespace arisim::ao {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct GenomeSpec {
  int n = 0;
  int n_act = 0;
  int m_t = 0;
  int d = 0;
  double r_lo = 0.0, r_hi = 0.0;
  double c_lo = 0.0, c_hi = 0.0;
  double v_amp = 0.0;  // per-entry precoder coordinate range

  // Layout: [R of active elements][C of all elements][Re V][Im V].
  int dim() const { return n_act + n + 2 * m_t * d; }
  double lo(int k) const {
    if (k < n_act) return r_lo;
    if (k < n_act + n) return c_lo;
    return -v_amp;
  }
  double hi(int k) const {
    if (k < n_act) return r_hi;
    if (k < n_act + n) return c_hi;
    return v_amp;
  }
};

GenomeSpec make_spec(const mimo::MimoScenario& sc, const RISModel& model) {
  GenomeSpec s;
  s.n = sc.n;
  s.n_act = sc.n_act;
  s.m_t = sc.m_t;
  s.d = sc.d;
  s.r_lo = model.active_circuit.r_min_ohm;
  s.r_hi = model.active_circuit.r_max_ohm;
  s.c_lo = model.active_circuit.c_min_f;
  s.c_hi = model.active_circuit.c_max_f;
  s.v_amp = std::sqrt(sc.p_t_w);
  return s;
}

struct Decoded {
  VectorXcd gamma;
  MatrixXcd v;
  double power = 0.0;
  bool valid = false;
};

Decoded decode(const VectorXd& g, const GenomeSpec& sp,
               const mimo::MimoScenario& sc, const RISModel& model) {
  Decoded d;
  d.gamma.resize(sp.n);
  d.power = 0.0;
  try {
    for (int i = 0; i < sp.n; ++i) {
      double c = g[sp.n_act + i];
      if (model.is_active(i)) {
        double r = g[i];
        d.gamma[i] =
            cell::reflection_coefficient(c, r, model.active_circuit);
        d.power += cell::power_for_resistance(r, model.diode);
      } else {
        d.gamma[i] = cell::reflection_coefficient(
            c, model.passive_circuit.r_min_ohm, model.passive_circuit);
      }
    }
  } catch (const SolverError&) {
    return d;  // unstable circuit point: invalid
  }
  d.v.resize(sp.m_t, sp.d);
  int base = sp.n_act + sp.n;
  int nv = sp.m_t * sp.d;
  for (int k = 0; k < nv; ++k) {
    d.v(k % sp.m_t, k / sp.m_t) = {g[base + k], g[base + nv + k]};
  }
  double tr = d.v.squaredNorm();
  if (tr > sc.p_t_w && tr > 0.0) d.v *= std::sqrt(sc.p_t_w / tr);
  d.valid = true;
  return d;
}

double fitness(const Decoded& d, const mimo::MimoChannels& ch,
               const mimo::MimoScenario& sc) {
  if (!d.valid) return -1e6;
  double rate = mimo::rate_lmmse(d.v, d.gamma, ch, sc.sigma2_w, sc.f_r,
                                 sc.f_s);
  return rate - 1e3 * std::max(0.0, d.power - sc.p_ris_w);
}

// Blend active resistances toward the weak endpoint until the diode power
// fits the budget, then rebuild the reflections from the repaired genome.
void repair_power(VectorXd& g, const GenomeSpec& sp,
                  const mimo::MimoScenario& sc, const RISModel& model) {
  if (sp.n_act == 0) return;
  auto power_at = [&](double blend) {
    double p = 0.0;
    for (int i = 0; i < sp.n_act; ++i) {
      double r = g[i] + blend * (sp.r_hi - g[i]);
      p += cell::power_for_resistance(r, model.diode);
    }
    return p;
  };
  if (power_at(0.0) <= sc.p_ris_w * (1.0 + 1e-12)) return;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 50; ++it) {
    double mid = 0.5 * (lo + hi);
    if (power_at(mid) <= sc.p_ris_w * (1.0 + 1e-12)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  for (int i = 0; i < sp.n_act; ++i) {
    g[i] += hi * (sp.r_hi - g[i]);
  }
}

// Map the winning genome into the common solver-state shape: phases are the
// reflection arguments, normalized amplitudes come from each element's
// exact feasible range at that phase (clamped into its window when the raw
// phase falls outside it).
AOState finalize(const VectorXd& genome_in, const GenomeSpec& sp,
                 const mimo::MimoScenario& sc, const mimo::MimoChannels& ch,
                 const RISModel& model, std::vector<double> trace,
                 long evals) {
  VectorXd genome = genome_in;
  repair_power(genome, sp, sc, model);
  Decoded best = decode(genome, sp, sc, model);
  if (!best.valid) {
    // Degenerate final point; retreat to the all-weak configuration.
    for (int i = 0; i < sp.n_act; ++i) genome[i] = sp.r_hi;
    for (int i = 0; i < sp.n; ++i) {
      genome[sp.n_act + i] = 0.5 * (sp.c_lo + sp.c_hi);
    }
    best = decode(genome, sp, sc, model);
  }

  AOState st;
  st.rate_trace = std::move(trace);
  st.objective_evaluations = evals;
  st.v = best.v;
  st.w = mimo::lmmse_combiner(best.v, best.gamma, ch, sc.sigma2_w, sc.f_r,
                              sc.f_s);
  st.achieved_rate_exact =
      mimo::rate_lmmse(best.v, best.gamma, ch, sc.sigma2_w, sc.f_r, sc.f_s);
  st.surrogate_rate = st.achieved_rate_exact;
  st.iterations = static_cast<int>(st.rate_trace.size());

  std::unique_ptr<cell::PhaseSweep> act_s, act_w, pas_s, pas_w;
  if (sp.n_act > 0) {
    act_s = std::make_unique<cell::PhaseSweep>(model.active_circuit.r_min_ohm,
                                               model.active_circuit);
    act_w = std::make_unique<cell::PhaseSweep>(model.active_circuit.r_max_ohm,
                                               model.active_circuit);
  }
  if (sp.n_act < sp.n) {
    pas_s = std::make_unique<cell::PhaseSweep>(model.passive_circuit.r_min_ohm,
                                               model.passive_circuit);
    pas_w = std::make_unique<cell::PhaseSweep>(model.passive_circuit.r_max_ohm,
                                               model.passive_circuit);
  }
  st.config.phases.resize(sp.n);
  st.config.alpha_bar.resize(sp.n);
  for (int i = 0; i < sp.n; ++i) {
    bool active = model.is_active(i);
    const cell::PhaseSweep& sweep_s = active ? *act_s : *pas_s;
    const cell::PhaseSweep& sweep_w = active ? *act_w : *pas_w;
    const cell::AmplitudeEnvelope& e = model.env_of(i);
    // The raw circuit phase can sit marginally outside the fitted window
    // (the window is grid-refined), so clamp before the bounds lookup.
    double ph = cell::clamp_phase_to_window(e, std::arg(best.gamma[i]));
    auto b = cell::amplitude_bounds_from_sweeps(sweep_s, sweep_w, ph);
    for (int nudge = 0; !b && nudge < 8; ++nudge) {
      ph = cell::wrap_angle(ph + 0.02 * (cell::wrap_angle(-e.theta) - ph));
      b = cell::amplitude_bounds_from_sweeps(sweep_s, sweep_w, ph);
    }
    st.config.phases[i] = ph;
    if (!b) {
      st.config.alpha_bar[i] = 0.0;
      continue;
    }
    double span = b->alpha_max - b->alpha_min;
    double a = std::clamp(std::abs(best.gamma[i]), b->alpha_min, b->alpha_max);
    st.config.alpha_bar[i] = span > 1e-15 ? (a - b->alpha_min) / span : 0.0;
  }
  // The canonical-coordinate projection can land at a marginally different
  // chain power than the raw genome; rescale the controls if it overruns.
  if (sp.n_act > 0) {
    double p = ris_power(st.config.alpha_bar, st.config.phases, model);
    if (p > sc.p_ris_w * (1.0 + 1e-12)) {
      double lo_s = 0.0, hi_s = 1.0;
      VectorXd base = st.config.alpha_bar;
      for (int it = 0; it < 50; ++it) {
        double mid = 0.5 * (lo_s + hi_s);
        VectorXd trial = base;
        trial.head(sp.n_act) *= mid;
        if (ris_power(trial, st.config.phases, model) <=
            sc.p_ris_w * (1.0 + 1e-12)) {
          lo_s = mid;
        } else {
          hi_s = mid;
        }
      }
      st.config.alpha_bar.head(sp.n_act) *= lo_s;
    }
  }
  return st;
}

VectorXd random_genome(const GenomeSpec& sp, RngStream& rng) {
  VectorXd g(sp.dim());
  for (int k = 0; k < sp.dim(); ++k) g[k] = rng.uniform(sp.lo(k), sp.hi(k));
  return g;
}

void check_heuristic_inputs(const mimo::MimoScenario& sc,
                            const RISModel& model, long eval_budget) {
  sc.validate();
  if (model.n_total != sc.n || model.n_act != sc.n_act) {
    throw ConfigError("heuristic solver: RIS model does not match scenario");
  }
  if (eval_budget < 1) {
    throw ConfigError("heuristic solver: evaluation budget must be >= 1");
  }
}

}  // namespace

AOState ga_solve(const mimo::MimoScenario& sc, const mimo::MimoChannels& ch,
                 const RISModel& model, long eval_budget, RngStream& rng) {
  check_heuristic_inputs(sc, model, eval_budget);
  GenomeSpec sp = make_spec(sc, model);
  const int pop = 24;
  const int elite = 2;
  const double p_cross = 0.9;
  const double blx = 0.5;
  const double p_mut = 1.0 / sp.dim();

  std::vector<VectorXd> genomes(pop);
  std::vector<double> fit(pop);
  long evals = 0;
  for (int i = 0; i < pop; ++i) genomes[i] = random_genome(sp, rng);
  for (int i = 0; i < pop; ++i) {
    fit[i] = fitness(decode(genomes[i], sp, sc, model), ch, sc);
    ++evals;
  }
  auto best_index = [&]() {
    return static_cast<int>(std::max_element(fit.begin(), fit.end()) -
                            fit.begin());
  };
  VectorXd best_genome = genomes[best_index()];
  double best_fit = fit[best_index()];
  std::vector<double> trace{best_fit};

  auto tournament = [&]() -> int {
    int a = static_cast<int>(rng.integer(pop));
    int b = static_cast<int>(rng.integer(pop));
    return fit[a] >= fit[b] ? a : b;
  };

  while (evals + (pop - elite) <= eval_budget) {
    std::vector<int> order(pop);
    for (int i = 0; i < pop; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fit[a] > fit[b]; });
    std::vector<VectorXd> next(pop);
    std::vector<double> next_fit(pop);
    for (int e = 0; e < elite; ++e) {
      next[e] = genomes[order[e]];
      next_fit[e] = fit[order[e]];
    }
    for (int i = elite; i < pop; ++i) {
      const VectorXd& pa = genomes[tournament()];
      const VectorXd& pb = genomes[tournament()];
      VectorXd child(sp.dim());
      if (rng.uniform() < p_cross) {
        for (int k = 0; k < sp.dim(); ++k) {
          double lo = std::min(pa[k], pb[k]);
          double hi = std::max(pa[k], pb[k]);
          double span = hi - lo;
          child[k] = std::clamp(
              rng.uniform(lo - blx * span, hi + blx * span), sp.lo(k),
              sp.hi(k));
        }
      } else {
        child = pa;
      }
      for (int k = 0; k < sp.dim(); ++k) {
        if (rng.uniform() < p_mut) {
          double sigma = 0.1 * (sp.hi(k) - sp.lo(k));
          child[k] =
              std::clamp(child[k] + sigma * rng.normal(), sp.lo(k), sp.hi(k));
        }
      }
      next[i] = std::move(child);
      next_fit[i] = fitness(decode(next[i], sp, sc, model), ch, sc);
      ++evals;
    }
    genomes = std::move(next);
    fit = std::move(next_fit);
    int bi = best_index();
    if (fit[bi] > best_fit) {
      best_fit = fit[bi];
      best_genome = genomes[bi];
    }
    trace.push_back(best_fit);
  }
  return finalize(best_genome, sp, sc, ch, model, std::move(trace), evals);
}

AOState pso_solve(const mimo::MimoScenario& sc, const mimo::MimoChannels& ch,
                  const RISModel& model, long eval_budget, RngStream& rng) {
  check_heuristic_inputs(sc, model, eval_budget);
  GenomeSpec sp = make_spec(sc, model);
  const int swarm = 24;
  const double w_inertia = 0.729;
  const double c1 = 1.49445;
  const double c2 = 1.49445;

  std::vector<VectorXd> pos(swarm), vel(swarm), pbest(swarm);
  std::vector<double> fit(swarm), pbest_fit(swarm);
  long evals = 0;
  for (int i = 0; i < swarm; ++i) {
    pos[i] = random_genome(sp, rng);
    vel[i] = VectorXd::Zero(sp.dim());
  }
  for (int i = 0; i < swarm; ++i) {
    fit[i] = fitness(decode(pos[i], sp, sc, model), ch, sc);
    ++evals;
    pbest[i] = pos[i];
    pbest_fit[i] = fit[i];
  }
  int gi = static_cast<int>(
      std::max_element(pbest_fit.begin(), pbest_fit.end()) -
      pbest_fit.begin());
  VectorXd gbest = pbest[gi];
  double gbest_fit = pbest_fit[gi];
  std::vector<double> trace{gbest_fit};

  while (evals + swarm <= eval_budget) {
    for (int i = 0; i < swarm; ++i) {
      for (int k = 0; k < sp.dim(); ++k) {
        double range = sp.hi(k) - sp.lo(k);
        double v = w_inertia * vel[i][k] +
                   c1 * rng.uniform() * (pbest[i][k] - pos[i][k]) +
                   c2 * rng.uniform() * (gbest[k] - pos[i][k]);
        v = std::clamp(v, -0.2 * range, 0.2 * range);
        vel[i][k] = v;
        pos[i][k] = std::clamp(pos[i][k] + v, sp.lo(k), sp.hi(k));
      }
      fit[i] = fitness(decode(pos[i], sp, sc, model), ch, sc);
      ++evals;
      if (fit[i] > pbest_fit[i]) {
        pbest_fit[i] = fit[i];
        pbest[i] = pos[i];
        if (fit[i] > gbest_fit) {
          gbest_fit = fit[i];
          gbest = pos[i];
        }
      }
    }
    trace.push_back(gbest_fit);
  }
  return finalize(gbest, sp, sc, ch, model, std::move(trace), evals);
}

}  // namespace arisim::ao
