#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "arisim/units.hpp"

// Tunnel-diode unit cell: diode I-V model, negative-resistance operating
// point and its power draw, the terminated transmission-line circuit, and the
// phase-amplitude coupling envelopes of the reflection coefficient.
namespace arisim::cell {

struct DiodeParams {
  double r0_ohm = 1.0;   // current-scale resistance
  double v0_volt = 0.1;  // voltage scale
  double m = 1.0;        // steepness exponent
};

// Classic peak-normalized tunneling current: I_p*(V/V_p)*exp(1 - V/V_p).
double tunneling_current_peak_model(double v, double i_peak, double v_peak);

// Generalized model: (V/R0)*exp(-(V/V0)^m).
double tunneling_current(double v, const DiodeParams& d);

// Differential resistance R(V) = R0*exp((V/V0)^m) / (1 - m*(V/V0)^m);
// negative between the current peak and the valley.
double differential_resistance(double v, const DiodeParams& d);

// Bias voltage of maximum robustness, where dR/dV = 0:
// V_r = (1/m + 1)^(1/m) * V0.
double stable_voltage(const DiodeParams& d);

// Differential resistance at the robust bias: -R0/m * exp((m+1)/m).
double stable_resistance(const DiodeParams& d);

// DC power drawn when biased at the robust point: (V0^2/R0)*(1/m+1)^(2/m),
// identically V_r^2/R0.
double element_power(const DiodeParams& d);

// Inverse of stable_resistance over the steepness exponent (monotone in m);
// bisection to 1e-10 Ohm. Target must be strictly negative and within the
// resistance range spanned by m in [0.02, 256].
double m_from_resistance(double r_ohm, double r0_ohm = 1.0);

// DC power of an element whose negative resistance is r_ohm, through the
// m-inversion chain.
double power_for_resistance(double r_ohm, const DiodeParams& base = {});

struct CircuitParams {
  double l1_h = 4.5e-9;
  double l2_h = 0.7e-9;
  double z0_ohm = 377.0;
  double omega_rad_s = 2.0 * units::kPi * 2.4e9;
  // Termination resistance endpoints: the strongest and weakest stable
  // operating points (steepness exponents 1 and 3 of the default diode).
  double r_min_ohm = -7.3890560989306495;  // larger magnitude, higher gain
  double r_max_ohm = -1.2645559648943925;
  double c_min_f = 0.85e-12;
  double c_max_f = 6.25e-12;
};

// Input impedance of the shunt-L1 / series-L2-C-R network:
// Z = jwL1*(jwL2 + 1/(jwC) + R) / (jwL1 + jwL2 + 1/(jwC) + R).
// Throws when the denominator magnitude is below 1e-12 (resonance
// singularity).
std::complex<double> impedance(double c_farad, double r_ohm,
                               const CircuitParams& cp);

// (Z - Z0)/(Z + Z0). Throws when |Z + Z0| < 1e-9: the configuration sits on
// the oscillation singularity and is rejected rather than clamped.
std::complex<double> reflection_coefficient(double c_farad, double r_ohm,
                                            const CircuitParams& cp);

// Smallest capacitance in [c_min, c_max] whose reflection phase equals
// target_phase_rad (wrapped) to 1e-9 rad, at the given termination; nullopt
// when the phase is unreachable for this resistance.
std::optional<double> capacitance_for_phase(double target_phase_rad,
                                            double r_ohm,
                                            const CircuitParams& cp);

// Warm-started variant: local bracket expansion around c_hint, falling back
// to the full sweep when the local search misses. Same 1e-9 rad contract.
std::optional<double> capacitance_for_phase_near(double target_phase_rad,
                                                 double r_ohm,
                                                 const CircuitParams& cp,
                                                 double c_hint);

// Reflection of the circuit pre-sampled on the capacitance grid at one fixed
// termination; amortizes the sweep across many phase queries. Immutable
// after construction.
class PhaseSweep {
 public:
  PhaseSweep(double r_ohm, const CircuitParams& cp, int points = 4096);
  // Smallest capacitance whose reflection phase matches, to 1e-9 rad.
  std::optional<double> capacitance_for(double target_phase_rad) const;
  double r_ohm() const { return r_ohm_; }
  const CircuitParams& circuit() const { return cp_; }

 private:
  double r_ohm_;
  CircuitParams cp_;
  std::vector<double> c_;
  std::vector<double> arg_;
  std::vector<char> valid_;
};

// Sub-interval of [r_min, r_max] whose members can realize the phase;
// nullopt when none can. Feasibility shrinks as |R| grows, so the result is
// an interval.
std::optional<std::pair<double, double>> feasible_resistance_range(
    double target_phase_rad, const CircuitParams& cp);

struct AmplitudeBounds {
  double alpha_min;
  double alpha_max;
  double c_at_min_f;  // capacitance realizing the lower bound
  double c_at_max_f;
  double r_at_min_ohm;
  double r_at_max_ohm;
};

// Reflection-amplitude range achievable at a phase: |gamma| evaluated at the
// two resistance endpoints with their phase-matching capacitances, ordered
// pointwise. nullopt when either endpoint cannot realize the phase.
std::optional<AmplitudeBounds> amplitude_bounds_exact(double target_phase_rad,
                                                      const CircuitParams& cp);

// Same, reusing pre-built sweeps of the two resistance endpoints.
std::optional<AmplitudeBounds> amplitude_bounds_from_sweeps(
    const PhaseSweep& strong, const PhaseSweep& weak, double target_phase_rad);

// Cosine ("linear steepness") fit of the exact envelopes plus the feasible
// phase window and the measured approximation error.
struct AmplitudeEnvelope {
  double delta_min = 0.0;  // extrema of the exact lower envelope
  double delta_max = 0.0;
  double beta_min = 0.0;   // extrema of the exact upper envelope
  double beta_max = 0.0;
  double theta = 0.0;      // cos(phi + theta) peaks at the envelope maximum
  double window_lo = 0.0;  // feasible phase window start, in (-pi, pi]
  double window_width = 0.0;  // window = [lo, lo + width] (wrapping)
  double err_min = 0.0;    // max |approx - exact| of the lower envelope
  double err_max = 0.0;    //  ... of the upper envelope
};

// Exact envelopes on a >=1024-point phase grid with parabolic refinement of
// the extrema.
AmplitudeEnvelope fit_envelope(const CircuitParams& cp, int grid_size = 1024);

double approx_alpha_min(const AmplitudeEnvelope& env, double phase_rad);
double approx_alpha_max(const AmplitudeEnvelope& env, double phase_rad);
bool phase_in_window(const AmplitudeEnvelope& env, double phase_rad);
// Nearest point of the feasible window (arc projection).
double clamp_phase_to_window(const AmplitudeEnvelope& env, double phase_rad);

// Linear amplitude control: alpha_min + t*(alpha_max - alpha_min) on the
// approximate envelopes.
double amplitude_from_normalized(double phase_rad, double alpha_bar,
                                 const AmplitudeEnvelope& env);
// Same on the exact envelopes; throws SolverError on an infeasible phase.
double amplitude_from_normalized(double phase_rad, double alpha_bar,
                                 const CircuitParams& cp);

// Termination resistance whose reflection at this phase has amplitude
// `alpha` (inverse of the exact amplitude map at fixed phase); throws when
// the phase is infeasible or alpha is outside the exact bounds.
double resistance_for_amplitude(double phase_rad, double alpha,
                                const CircuitParams& cp);
// Same with the phase's bounds already known (skips their recomputation).
double resistance_for_amplitude(double phase_rad, double alpha,
                                const CircuitParams& cp,
                                const AmplitudeBounds& bounds);

double wrap_angle(double x);  // into (-pi, pi]

}  // namespace arisim::cell
