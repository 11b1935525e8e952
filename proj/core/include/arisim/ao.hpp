#pragma once

#include <Eigen/Dense>
#include <vector>

#include "arisim/cell.hpp"
#include "arisim/mimo.hpp"
#include "arisim/reflect.hpp"
#include "arisim/rng.hpp"

// Rate-maximization solvers for the active-RIS MIMO link: alternating
// optimization over precoder / phases / amplitudes with an LMMSE combiner,
// plus decoupled-model (PAI), genetic, and particle-swarm baselines.
namespace arisim::ao {

// RIS hardware description shared by the solvers: fitted envelopes of the
// active and passive unit cells, the diode power chain, and the tabulated
// cheapest-phase power curve used by the decoupled solver.
struct RISModel {
  cell::CircuitParams active_circuit;
  cell::CircuitParams passive_circuit;  // resistance collapsed to the Ohmic loss
  cell::AmplitudeEnvelope active_env;
  cell::AmplitudeEnvelope passive_env;
  cell::DiodeParams diode;
  int n_total = 0;
  int n_act = 0;                 // leading elements are active
  double p_elem_min_w = 0.0;     // active element power at alpha_bar = 0
  double p_elem_max_w = 0.0;     // at alpha_bar = 1
  // Monotone table of min-over-phase element power versus physical
  // reflection amplitude, for the phase-independent benchmark.
  std::vector<double> pai_alpha_grid;
  std::vector<double> pai_power_w;

  bool is_active(int i) const { return i < n_act; }
  const cell::AmplitudeEnvelope& env_of(int i) const {
    return is_active(i) ? active_env : passive_env;
  }
  const cell::CircuitParams& circuit_of(int i) const {
    return is_active(i) ? active_circuit : passive_circuit;
  }
  reflect::EnvelopeVectors envelope_vectors() const;
  // Linear interpolation of the tabulated curve, clamped at its ends.
  double pai_element_power(double alpha) const;
};

// Fits both envelopes and tabulates the power curves; results for a given
// circuit/diode combination are cached process-wide.
RISModel make_ris_model(int n_total, int n_act, double passive_r_ohm = 1.5,
                        const cell::CircuitParams& active_circuit = {},
                        const cell::DiodeParams& diode = {});

struct AOOptions {
  double epsilon = 1e-3;   // relative rate-change convergence threshold
  int j_alt = 8;           // maximum outer iterations
  int phase_iters = 25;    // gradient-ascent steps per phase block
  int sca_iters = 4;       // linearize-and-ascend rounds per amplitude block
  int pgd_steps = 6;       // projected-gradient steps per SCA round
  bool optimize_ris = true;  // false freezes gamma (precoder-only loop)
};

struct AOState {
  Eigen::MatrixXcd v;  // M_T x d precoder
  Eigen::MatrixXcd w;  // M_R x d combiner, computed once at the end
  reflect::RISConfig config;
  std::vector<double> rate_trace;  // objective after each accepted block step
  int iterations = 0;
  long objective_evaluations = 0;  // rate/gradient evaluations consumed
  double surrogate_rate = 0.0;     // final objective on the solver's model
  double achieved_rate_exact = 0.0;  // rate through the exact circuit model
  bool stalled = false;
};

// Exact-chain RIS power: per active element alpha_bar -> amplitude ->
// realizing resistance -> diode power. Throws SolverError when an element's
// phase/amplitude cannot be mapped through the circuit.
double ris_power(const Eigen::VectorXd& alpha_bar,
                 const Eigen::VectorXd& phases, const RISModel& model);

// Reflection vector through the exact envelopes with the per-element
// active/passive circuit split.
Eigen::VectorXcd exact_gamma_mixed(const reflect::RISConfig& config,
                                   const RISModel& model);

// Objective of the alternating solver: LMMSE rate of the cosine-fit
// reflection model.
double surrogate_rate(const Eigen::MatrixXcd& v,
                      const reflect::RISConfig& config, const RISModel& model,
                      const mimo::MimoChannels& ch,
                      const mimo::MimoScenario& sc);

// Wirtinger-sense gradient g of the LMMSE rate with respect to the
// reflection vector: d rate = 2*Re{g^H d gamma}.
Eigen::VectorXcd rate_gamma_gradient(const Eigen::MatrixXcd& v,
                                     const Eigen::VectorXcd& gamma,
                                     const mimo::MimoChannels& ch,
                                     const mimo::MimoScenario& sc);

// d(surrogate rate)/d(phase angles): the gamma gradient chained through the
// diagonal-quadratic reflection form.
Eigen::VectorXd phase_gradient(const Eigen::MatrixXcd& v,
                               const reflect::RISConfig& config,
                               const RISModel& model,
                               const mimo::MimoChannels& ch,
                               const mimo::MimoScenario& sc);

// d(surrogate rate)/d(alpha_bar); identically zero on passive elements.
Eigen::VectorXd amplitude_gradient(const Eigen::MatrixXcd& v,
                                   const reflect::RISConfig& config,
                                   const RISModel& model,
                                   const mimo::MimoChannels& ch,
                                   const mimo::MimoScenario& sc);

// Globally optimal precoder for fixed gamma: noise-whitened SVD with
// water-filling under the trace constraint. Never returns a precoder whose
// LMMSE rate is below the incumbent's.
Eigen::MatrixXcd optimize_precoder(const Eigen::VectorXcd& gamma,
                                   const mimo::MimoChannels& ch,
                                   const mimo::MimoScenario& sc,
                                   const Eigen::MatrixXcd& v_incumbent,
                                   long* evals = nullptr);

// Backtracking projected-gradient ascent of the surrogate over the phase
// angles, each element constrained to its feasible window. Accepted steps
// must also keep the exact supply power of the unchanged amplitude controls
// within the budget (the chain is phase-dependent), so the objective never
// decreases and feasible inputs stay feasible.
Eigen::VectorXd optimize_phases(const Eigen::MatrixXcd& v,
                                const reflect::RISConfig& config,
                                const RISModel& model,
                                const mimo::MimoChannels& ch,
                                const mimo::MimoScenario& sc, int max_iters,
                                long* evals = nullptr,
                                bool* stalled = nullptr);

// Successive linearization of the exact power chain with inner projected
// gradient ascent; every accepted iterate is feasible under the exact chain.
// Throws SolverError when P_RIS is below the N_act * P_min floor.
Eigen::VectorXd optimize_amplitudes(const Eigen::MatrixXcd& v,
                                    const reflect::RISConfig& config,
                                    const RISModel& model,
                                    const mimo::MimoChannels& ch,
                                    const mimo::MimoScenario& sc,
                                    int sca_iters, int pgd_steps,
                                    long* evals = nullptr);

// Alternating optimization: precoder, phases, amplitudes per outer
// iteration; combiner computed once at the end. achieved_rate_exact
// re-evaluates the returned RIS configuration through the exact circuit
// model with a re-optimized precoder.
AOState ao_solve(const mimo::MimoScenario& sc, const mimo::MimoChannels& ch,
                 const RISModel& model, const AOOptions& opt = {});

// Same loop with phase-amplitude coupling ignored: free phases, physical
// amplitudes in the phase-independent box, power charged on the tabulated
// cheapest-phase curve. The returned config is the projection back onto the
// coupled model (window clamp, exact-bounds clamp, uniform power repair) and
// achieved_rate_exact is evaluated there.
AOState pai_solve(const mimo::MimoScenario& sc, const mimo::MimoChannels& ch,
                  const RISModel& model, const AOOptions& opt = {});

// Warm-started variant (initial free phases and physical amplitudes supplied
// by the caller), used by feasible-set inclusion audits.
AOState pai_solve(const mimo::MimoScenario& sc, const mimo::MimoChannels& ch,
                  const RISModel& model, const AOOptions& opt,
                  const Eigen::VectorXd& init_angles,
                  const Eigen::VectorXd& init_amplitudes);

// Real-coded heuristics over (R_n, C_n, V) with LMMSE combining, budget
// penalty, and final feasibility repair. eval_budget is the objective-
// evaluation allowance (complexity parity with a measured AO run).
AOState ga_solve(const mimo::MimoScenario& sc, const mimo::MimoChannels& ch,
                 const RISModel& model, long eval_budget, RngStream& rng);
AOState pso_solve(const mimo::MimoScenario& sc, const mimo::MimoChannels& ch,
                  const RISModel& model, long eval_budget, RngStream& rng);

// Constraint audit of a solver output (used by tests and experiment
// reporting).
struct FeasibilityReport {
  bool ok = false;
  double trace_w = 0.0;
  double ris_power_w = 0.0;
  double max_envelope_violation = 0.0;  // beyond exact bounds + fit error
  double max_alpha_bar_violation = 0.0;
  double max_phase_window_violation = 0.0;
};
FeasibilityReport check_feasibility(const AOState& state,
                                    const mimo::MimoScenario& sc,
                                    const RISModel& model);

}  // namespace arisim::ao
