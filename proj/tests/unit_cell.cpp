#include <doctest.h>

#include <cmath>
#include <complex>

#include "arisim/cell.hpp"
#include "arisim/errors.hpp"
#include "arisim/units.hpp"

using namespace arisim;
using namespace arisim::cell;
using cd = std::complex<double>;

namespace {

// Frozen envelope constants of the default circuit, from a one-time
// 1024-grid run; regression anchors for the fit.
constexpr double kTheta = 0.356177660;
constexpr double kBetaMin = 1.041916255;
constexpr double kBetaMax = 4.327006446;
constexpr double kDeltaMin = 1.006965761;
constexpr double kDeltaMax = 1.239354971;
constexpr double kWindowLo = -3.135456730;
constexpr double kWindowWidth = 3.067961576;
constexpr double kErrMin = 0.010368676;
constexpr double kErrMax = 0.604476975;

}  // namespace

TEST_SUITE("cell") {

TEST_CASE("peak-normalized tunneling current") {
  CHECK(tunneling_current_peak_model(0.07, 0.005, 0.07) ==
        doctest::Approx(0.005).epsilon(1e-14));
  CHECK(tunneling_current_peak_model(0.035, 0.005, 0.07) <
        tunneling_current_peak_model(0.06, 0.005, 0.07));
  CHECK_THROWS_AS(tunneling_current_peak_model(-0.1, 0.005, 0.07),
                  ConfigError);
}

TEST_CASE("generalized tunneling current and differential resistance") {
  DiodeParams d;  // R0 = 1, V0 = 0.1, m = 1
  CHECK(tunneling_current(0.1, d) ==
        doctest::Approx(0.036787944117144233).epsilon(1e-13));
  // Independent evaluation of R(V) = R0 e^{(V/V0)^m} / (1 - m (V/V0)^m).
  double v = 0.15;
  double u = std::pow(v / d.v0_volt, d.m);
  CHECK(differential_resistance(v, d) ==
        doctest::Approx(std::exp(u) / (1.0 - u)).epsilon(1e-13));
  CHECK(differential_resistance(0.05, d) > 0.0);   // before the current peak
  CHECK(differential_resistance(0.15, d) < 0.0);   // negative branch
  CHECK_THROWS_AS(differential_resistance(0.1, d), SolverError);  // dI/dV = 0
}

TEST_CASE("robust bias point: voltage, resistance, extremum bracketing") {
  DiodeParams m1;
  DiodeParams m3;
  m3.m = 3.0;
  CHECK(stable_voltage(m1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(stable_voltage(m3) ==
        doctest::Approx(0.1100642416298209).epsilon(1e-13));
  CHECK(stable_resistance(m1) ==
        doctest::Approx(-7.3890560989306495).epsilon(1e-14));
  CHECK(stable_resistance(m3) ==
        doctest::Approx(-1.2645559648943925).epsilon(1e-14));
  // dR/dV changes sign at the robust bias (it is an extremum of R).
  for (const auto& d : {m1, m3}) {
    double vr = stable_voltage(d);
    double h = 1e-3;
    double left = differential_resistance(vr - h, d) -
                  differential_resistance(vr, d);
    double right = differential_resistance(vr + h, d) -
                   differential_resistance(vr, d);
    CHECK(left * right > 0.0);  // same side of the extremum on both flanks
  }
}

TEST_CASE("element power closed form and identity with V_r^2/R0") {
  DiodeParams m1;
  DiodeParams m3;
  m3.m = 3.0;
  CHECK(element_power(m1) == doctest::Approx(0.04).epsilon(1e-14));
  CHECK(element_power(m3) ==
        doctest::Approx(0.012114137285547597).epsilon(1e-13));
  for (double m : {0.5, 1.0, 2.0, 3.0, 5.0}) {
    DiodeParams d;
    d.m = m;
    double vr = stable_voltage(d);
    CHECK(element_power(d) ==
          doctest::Approx(vr * vr / d.r0_ohm).epsilon(1e-12));
  }
  // Strictly decreasing in the steepness exponent on [1, 3].
  double prev = 1e300;
  for (double m = 1.0; m <= 3.0 + 1e-12; m += 0.1) {
    DiodeParams d;
    d.m = m;
    double p = element_power(d);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("steepness exponent recovery from the stable resistance") {
  for (double m : {0.1, 0.5, 1.0, 1.7, 3.0, 10.0, 100.0}) {
    DiodeParams d;
    d.m = m;
    CHECK(m_from_resistance(stable_resistance(d)) ==
          doctest::Approx(m).epsilon(1e-7));
  }
  CHECK(m_from_resistance(-3.0) ==
        doctest::Approx(1.6568752531814104).epsilon(1e-9));
  CHECK_THROWS_AS(m_from_resistance(2.0), ConfigError);
  CHECK_THROWS_AS(m_from_resistance(0.0), ConfigError);
  CHECK_THROWS_AS(m_from_resistance(-0.005), ConfigError);  // above the range
  CHECK_THROWS_AS(m_from_resistance(-1e25), ConfigError);   // below the range
}

TEST_CASE("power through the resistance chain") {
  CHECK(power_for_resistance(-3.0) ==
        doctest::Approx(0.017682837374395306).epsilon(1e-9));
  CHECK(power_for_resistance(-7.3890560989306495) ==
        doctest::Approx(0.04).epsilon(1e-10));
  CHECK(power_for_resistance(-1.2645559648943925) ==
        doctest::Approx(0.012114137285547597).epsilon(1e-10));
  // Monotone: stronger negative resistance costs more.
  CHECK(power_for_resistance(-5.0) > power_for_resistance(-2.0));
}

TEST_CASE("input impedance matches an independent complex evaluation") {
  CircuitParams cp;
  for (double r : {-7.0, -3.0, 1.5, 11.0}) {
    for (double c_pf = 0.9; c_pf <= 6.2; c_pf += 0.53) {
      double c = c_pf * 1e-12;
      cd jwl1(0.0, cp.omega_rad_s * cp.l1_h);
      cd jwl2(0.0, cp.omega_rad_s * cp.l2_h);
      cd jwc_inv(0.0, -1.0 / (cp.omega_rad_s * c));
      cd series = jwl2 + jwc_inv + cd(r, 0.0);
      cd expected = jwl1 * series / (jwl1 + series);
      cd got = impedance(c, r, cp);
      CHECK(std::abs(got - expected) <= 1e-12 * std::abs(expected));
    }
  }
  CHECK_THROWS_AS(impedance(-1e-12, 1.0, cp), ConfigError);
}

TEST_CASE("reflection magnitude: matched load null and amplification") {
  CircuitParams cp;
  // Passive termination can be matched almost perfectly at one (C, R).
  CHECK(std::abs(reflection_coefficient(0.869305e-12, 11.830904, cp)) <
        1e-4);
  // Negative termination amplifies beyond unit magnitude.
  CHECK(std::abs(reflection_coefficient(0.869e-12, -7.389, cp)) > 4.0);
  // Passive Ohmic loss keeps the magnitude below one.
  CHECK(std::abs(reflection_coefficient(2.0e-12, 1.5, cp)) < 1.0);
}

TEST_CASE("amplitude bounds are 2*pi periodic and honor the endpoints") {
  CircuitParams cp;
  for (double phase : {-2.5, -1.5, -0.5}) {
    auto a = amplitude_bounds_exact(phase, cp);
    auto b = amplitude_bounds_exact(phase + 2.0 * units::kPi, cp);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(std::abs(a->alpha_min - b->alpha_min) < 1e-12);
    CHECK(std::abs(a->alpha_max - b->alpha_max) < 1e-12);
    CHECK(a->alpha_min <= a->alpha_max);
    // The reported capacitance/resistance pairs realize the bounds.
    CHECK(std::abs(reflection_coefficient(a->c_at_max_f, a->r_at_max_ohm,
                                          cp)) ==
          doctest::Approx(a->alpha_max).epsilon(1e-9));
    CHECK(std::abs(reflection_coefficient(a->c_at_min_f, a->r_at_min_ohm,
                                          cp)) ==
          doctest::Approx(a->alpha_min).epsilon(1e-9));
    CHECK(std::abs(std::arg(reflection_coefficient(a->c_at_max_f,
                                                   a->r_at_max_ohm, cp)) -
                   phase) < 1e-8);
  }
}

TEST_CASE("capacitance solves the phase equation within the window") {
  CircuitParams cp;
  for (double target : {-2.8, -2.0, -1.0, -0.2}) {
    for (double r : {cp.r_min_ohm, cp.r_max_ohm, -3.0}) {
      auto c = capacitance_for_phase(target, r, cp);
      if (!c) continue;
      CHECK(*c >= cp.c_min_f);
      CHECK(*c <= cp.c_max_f);
      double realized = std::arg(reflection_coefficient(*c, r, cp));
      CHECK(std::abs(wrap_angle(realized - target)) < 1e-8);
      // Warm-started variant agrees with the cold sweep.
      auto warm = capacitance_for_phase_near(target, r, cp, *c * 1.07);
      REQUIRE(warm.has_value());
      double realized_warm = std::arg(reflection_coefficient(*warm, r, cp));
      CHECK(std::abs(wrap_angle(realized_warm - target)) < 1e-8);
    }
  }
  // A phase outside the feasible window has no solution.
  CHECK_FALSE(capacitance_for_phase(1.5, cp.r_min_ohm, cp).has_value());
}

TEST_CASE("pre-swept phase lookup agrees with the direct solver") {
  CircuitParams cp;
  PhaseSweep sweep(-3.0, cp);
  CHECK(sweep.r_ohm() == -3.0);
  for (int i = 0; i < 40; ++i) {
    double target = -3.0 + i * 0.07;
    auto direct = capacitance_for_phase(target, -3.0, cp);
    auto cached = sweep.capacitance_for(target);
    CHECK(direct.has_value() == cached.has_value());
    if (direct && cached) {
      double pd = std::arg(reflection_coefficient(*direct, -3.0, cp));
      double pc = std::arg(reflection_coefficient(*cached, -3.0, cp));
      CHECK(std::abs(wrap_angle(pd - pc)) < 2e-8);
    }
  }
}

TEST_CASE("feasible resistance range shrinks away from the peak phase") {
  CircuitParams cp;
  auto at_peak = feasible_resistance_range(-kTheta, cp);
  REQUIRE(at_peak.has_value());
  CHECK(at_peak->first == doctest::Approx(cp.r_min_ohm).epsilon(1e-9));
  CHECK(at_peak->second == doctest::Approx(cp.r_max_ohm).epsilon(1e-9));
  CHECK_FALSE(feasible_resistance_range(1.5, cp).has_value());
  for (double phase : {-3.0, -2.0, -0.3}) {
    auto r = feasible_resistance_range(phase, cp);
    if (!r) continue;
    CHECK(r->first >= cp.r_min_ohm - 1e-9);
    CHECK(r->second <= cp.r_max_ohm + 1e-9);
    CHECK(r->first <= r->second);
  }
}

TEST_CASE("envelope fit reproduces the frozen constants") {
  CircuitParams cp;
  AmplitudeEnvelope env = fit_envelope(cp, 1024);
  CHECK(env.theta == doctest::Approx(kTheta).epsilon(1e-6));
  CHECK(env.beta_min == doctest::Approx(kBetaMin).epsilon(1e-6));
  CHECK(env.beta_max == doctest::Approx(kBetaMax).epsilon(1e-6));
  CHECK(env.delta_min == doctest::Approx(kDeltaMin).epsilon(1e-6));
  CHECK(env.delta_max == doctest::Approx(kDeltaMax).epsilon(1e-6));
  CHECK(env.window_lo == doctest::Approx(kWindowLo).epsilon(1e-6));
  CHECK(env.window_width == doctest::Approx(kWindowWidth).epsilon(1e-6));
  CHECK(env.err_min == doctest::Approx(kErrMin).epsilon(1e-4));
  CHECK(env.err_max == doctest::Approx(kErrMax).epsilon(1e-4));
  // Envelope ordering.
  CHECK(env.delta_min <= env.delta_max);
  CHECK(env.delta_max <= env.beta_max);
  CHECK(env.beta_min <= env.beta_max);
}

TEST_CASE("cosine approximation touches both exact envelopes at the peak") {
  CircuitParams cp;
  AmplitudeEnvelope env = fit_envelope(cp, 1024);
  CHECK(approx_alpha_max(env, -env.theta) ==
        doctest::Approx(env.beta_max).epsilon(1e-12));
  CHECK(approx_alpha_min(env, -env.theta) ==
        doctest::Approx(env.delta_max).epsilon(1e-12));
  auto exact = amplitude_bounds_exact(-env.theta, cp);
  REQUIRE(exact.has_value());
  CHECK(std::abs(exact->alpha_max - approx_alpha_max(env, -env.theta)) <
        1e-6);
  CHECK(std::abs(exact->alpha_min - approx_alpha_min(env, -env.theta)) <
        1e-6);
  // The fit's measured errors bound the grid deviation everywhere.
  for (int i = 1; i < 40; ++i) {
    double ph = env.window_lo + env.window_width * i / 40.0;
    auto b = amplitude_bounds_exact(ph, cp);
    if (!b) continue;
    CHECK(std::abs(approx_alpha_min(env, ph) - b->alpha_min) <=
          env.err_min + 1e-6);
    CHECK(std::abs(approx_alpha_max(env, ph) - b->alpha_max) <=
          env.err_max + 1e-6);
  }
}

TEST_CASE("passive termination collapses the envelopes to one curve") {
  CircuitParams cp;
  cp.r_min_ohm = 1.5;
  cp.r_max_ohm = 1.5;
  AmplitudeEnvelope env = fit_envelope(cp, 1024);
  CHECK(env.delta_min == doctest::Approx(env.beta_min).epsilon(1e-12));
  CHECK(env.delta_max == doctest::Approx(env.beta_max).epsilon(1e-12));
  CHECK(env.delta_min == doctest::Approx(0.774959).epsilon(1e-4));
  CHECK(env.delta_max == doctest::Approx(0.991799).epsilon(1e-4));
  CHECK(env.beta_max < 1.0);  // passive elements never amplify
}

TEST_CASE("phase window membership and arc projection") {
  CircuitParams cp;
  AmplitudeEnvelope env = fit_envelope(cp, 1024);
  double mid = env.window_lo + 0.5 * env.window_width;
  CHECK(phase_in_window(env, mid));
  CHECK(phase_in_window(env, mid + 2.0 * units::kPi));
  CHECK_FALSE(phase_in_window(env, 1.5));
  CHECK(clamp_phase_to_window(env, mid) == doctest::Approx(mid).epsilon(1e-12));
  double hi = env.window_lo + env.window_width;
  // Just past the upper edge projects back to it.
  CHECK(clamp_phase_to_window(env, hi + 0.1) ==
        doctest::Approx(wrap_angle(hi)).epsilon(1e-9));
  // On the far side of the circle the nearer edge wins.
  double projected = clamp_phase_to_window(env, wrap_angle(hi + 2.9));
  CHECK((std::abs(wrap_angle(projected - env.window_lo)) < 1e-9 ||
         std::abs(wrap_angle(projected - hi)) < 1e-9));
  CHECK(phase_in_window(env, projected));
}

TEST_CASE("normalized amplitude control interpolates the envelopes") {
  CircuitParams cp;
  AmplitudeEnvelope env = fit_envelope(cp, 1024);
  double ph = -1.2;
  CHECK(amplitude_from_normalized(ph, 0.0, env) ==
        doctest::Approx(approx_alpha_min(env, ph)).epsilon(1e-12));
  CHECK(amplitude_from_normalized(ph, 1.0, env) ==
        doctest::Approx(approx_alpha_max(env, ph)).epsilon(1e-12));
  CHECK(amplitude_from_normalized(ph, 0.5, env) ==
        doctest::Approx(0.5 * (approx_alpha_min(env, ph) +
                               approx_alpha_max(env, ph))).epsilon(1e-12));
  CHECK_THROWS_AS(amplitude_from_normalized(ph, 1.5, env), ConfigError);
  // Exact-envelope variant rejects phases outside the window.
  CHECK_THROWS_AS(amplitude_from_normalized(1.5, 0.5, cp), SolverError);
  auto bounds = amplitude_bounds_exact(ph, cp);
  REQUIRE(bounds.has_value());
  CHECK(amplitude_from_normalized(ph, 0.25, cp) ==
        doctest::Approx(bounds->alpha_min +
                        0.25 * (bounds->alpha_max - bounds->alpha_min))
            .epsilon(1e-9));
}

TEST_CASE("resistance recovery inverts the exact amplitude map") {
  CircuitParams cp;
  double ph = -1.0;
  auto bounds = amplitude_bounds_exact(ph, cp);
  REQUIRE(bounds.has_value());
  for (double t : {0.0, 0.3, 0.7, 1.0}) {
    double alpha = bounds->alpha_min + t * (bounds->alpha_max -
                                            bounds->alpha_min);
    double r = resistance_for_amplitude(ph, alpha, cp);
    CHECK(r >= cp.r_min_ohm - 1e-9);
    CHECK(r <= cp.r_max_ohm + 1e-9);
    auto c = capacitance_for_phase(ph, r, cp);
    REQUIRE(c.has_value());
    CHECK(std::abs(reflection_coefficient(*c, r, cp)) ==
          doctest::Approx(alpha).epsilon(1e-6));
  }
  CHECK_THROWS_AS(resistance_for_amplitude(ph, bounds->alpha_max + 0.5, cp),
                  SolverError);
  CHECK_THROWS_AS(resistance_for_amplitude(1.5, 1.0, cp), SolverError);
}

TEST_CASE("angle wrapping lands in (-pi, pi]") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(3.0 * units::kPi) ==
        doctest::Approx(units::kPi).epsilon(1e-14));
  CHECK(wrap_angle(-3.0 * units::kPi) ==
        doctest::Approx(units::kPi).epsilon(1e-14));
  CHECK(wrap_angle(2.0 * units::kPi + 0.25) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(wrap_angle(-0.25 - 2.0 * units::kPi) ==
        doctest::Approx(-0.25).epsilon(1e-12));
}

}  // TEST_SUITE("cell")
