#include "arisim/cell.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "arisim/errors.hpp"

namespace arisim::cell {

namespace {

constexpr double kDenominatorFloor = 1e-12;
constexpr double kInstabilityFloor = 1e-9;
constexpr double kPhaseTol = 1e-9;
constexpr int kScanPoints = 4096;

// Refine a sign bracket of wrap(arg(gamma) - target) by bisection. The
// bracket is only accepted upstream when the wrapped difference does not
// jump across the branch cut, so plain sign bisection is safe.
std::optional<double> refine_phase_root(double c_lo, double d_lo, double c_hi,
                                        double target, double r_ohm,
                                        const CircuitParams& cp) {
  double lo = c_lo, hi = c_hi, dlo = d_lo;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double dmid;
    try {
      dmid = wrap_angle(
          std::arg(reflection_coefficient(mid, r_ohm, cp)) - target);
    } catch (const SolverError&) {
      return std::nullopt;
    }
    if (std::abs(dmid) <= 1e-12 || (hi - lo) < 1e-30) {
      return mid;
    }
    if ((dlo <= 0.0) == (dmid <= 0.0)) {
      lo = mid;
      dlo = dmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double circular_distance(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

// Vertex of the parabola through three samples; falls back to the middle
// abscissa when the points are collinear.
double parabola_vertex(double x0, double y0, double x1, double y1, double x2,
                       double y2) {
  double d1 = (y1 - y0) / (x1 - x0);
  double d2 = (y2 - y1) / (x2 - x1);
  double curv = (d2 - d1) / (x2 - x0);
  if (std::abs(curv) < 1e-300) return x1;
  double vx = 0.5 * (x0 + x1 - d1 / curv);
  return std::clamp(vx, std::min(x0, x2), std::max(x0, x2));
}

}  // namespace

double wrap_angle(double x) {
  double r = std::remainder(x, 2.0 * units::kPi);
  if (r <= -units::kPi) r += 2.0 * units::kPi;
  return r;
}

double tunneling_current_peak_model(double v, double i_peak, double v_peak) {
  if (v < 0.0 || v_peak <= 0.0) {
    throw ConfigError("tunneling_current_peak_model: forward region only");
  }
  return i_peak * (v / v_peak) * std::exp(1.0 - v / v_peak);
}

double tunneling_current(double v, const DiodeParams& d) {
  if (v < 0.0) throw ConfigError("tunneling_current: forward region only");
  return (v / d.r0_ohm) * std::exp(-std::pow(v / d.v0_volt, d.m));
}

double differential_resistance(double v, const DiodeParams& d) {
  if (v < 0.0) {
    throw ConfigError("differential_resistance: forward region only");
  }
  double t = std::pow(v / d.v0_volt, d.m);
  double denom = 1.0 - d.m * t;
  if (std::abs(denom) < 1e-15) {
    throw SolverError("differential_resistance: dI/dV vanishes at this bias");
  }
  return d.r0_ohm * std::exp(t) / denom;
}

double stable_voltage(const DiodeParams& d) {
  return d.v0_volt * std::pow(1.0 / d.m + 1.0, 1.0 / d.m);
}

double stable_resistance(const DiodeParams& d) {
  return -d.r0_ohm / d.m * std::exp((d.m + 1.0) / d.m);
}

double element_power(const DiodeParams& d) {
  return d.v0_volt * d.v0_volt / d.r0_ohm *
         std::pow(1.0 / d.m + 1.0, 2.0 / d.m);
}

double m_from_resistance(double r_ohm, double r0_ohm) {
  if (!(r_ohm < 0.0)) {
    throw ConfigError("m_from_resistance: stable resistance is negative");
  }
  double lo = 0.02, hi = 256.0;
  auto r_of = [&](double m) { return stable_resistance({r0_ohm, 0.1, m}); };
  if (r_ohm < r_of(lo) || r_ohm > r_of(hi)) {
    throw ConfigError("m_from_resistance: target " + std::to_string(r_ohm) +
                      " Ohm out of invertible range");
  }
  // stable_resistance is monotone increasing in m.
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double r = r_of(mid);
    if (std::abs(r - r_ohm) <= 1e-10) return mid;
    if (r < r_ohm) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double power_for_resistance(double r_ohm, const DiodeParams& base) {
  double m = m_from_resistance(r_ohm, base.r0_ohm);
  return element_power({base.r0_ohm, base.v0_volt, m});
}

std::complex<double> impedance(double c_farad, double r_ohm,
                               const CircuitParams& cp) {
  if (c_farad <= 0.0 || cp.omega_rad_s <= 0.0) {
    throw ConfigError("impedance: capacitance and frequency must be positive");
  }
  double w = cp.omega_rad_s;
  double a = w * cp.l1_h;                        // shunt branch reactance
  double u = w * cp.l2_h - 1.0 / (w * c_farad);  // series branch reactance
  std::complex<double> series(r_ohm, u);
  std::complex<double> den(r_ohm, u + a);
  if (std::abs(den) < kDenominatorFloor) {
    throw SolverError(
        "impedance: resonance singularity (|R + j(u+a)| < 1e-12)");
  }
  std::complex<double> num = std::complex<double>(0.0, a) * series;
  return num / den;
}

std::complex<double> reflection_coefficient(double c_farad, double r_ohm,
                                            const CircuitParams& cp) {
  std::complex<double> z = impedance(c_farad, r_ohm, cp);
  std::complex<double> zp = z + cp.z0_ohm;
  if (std::abs(zp) < kInstabilityFloor) {
    throw SolverError(
        "reflection_coefficient: |Z + Z0| < 1e-9, oscillation singularity");
  }
  return (z - cp.z0_ohm) / zp;
}

PhaseSweep::PhaseSweep(double r_ohm, const CircuitParams& cp, int points)
    : r_ohm_(r_ohm), cp_(cp) {
  points = std::max(points, 16);
  c_.resize(points);
  arg_.resize(points);
  valid_.resize(points);
  for (int k = 0; k < points; ++k) {
    double c = cp.c_min_f + (cp.c_max_f - cp.c_min_f) * k / (points - 1);
    c_[k] = c;
    try {
      arg_[k] = std::arg(reflection_coefficient(c, r_ohm, cp));
      valid_[k] = 1;
    } catch (const SolverError&) {
      arg_[k] = 0.0;
      valid_[k] = 0;
    }
  }
}

std::optional<double> PhaseSweep::capacitance_for(
    double target_phase_rad) const {
  double target = wrap_angle(target_phase_rad);
  int points = static_cast<int>(c_.size());
  for (int k = 0; k + 1 < points; ++k) {
    if (!valid_[k] || !valid_[k + 1]) continue;
    double d0 = wrap_angle(arg_[k] - target);
    double d1 = wrap_angle(arg_[k + 1] - target);
    if (std::abs(d0) <= kPhaseTol) return c_[k];
    // A jump larger than pi between neighbors is the wrap seam of the
    // angle, not a zero crossing.
    if (d0 * d1 > 0.0 || std::abs(d0 - d1) >= units::kPi) continue;
    auto root = refine_phase_root(c_[k], d0, c_[k + 1], target, r_ohm_, cp_);
    if (!root) continue;
    double check = wrap_angle(
        std::arg(reflection_coefficient(*root, r_ohm_, cp_)) - target);
    if (std::abs(check) <= kPhaseTol) return root;
  }
  int last = points - 1;
  if (valid_[last] && std::abs(wrap_angle(arg_[last] - target)) <= kPhaseTol) {
    return c_[last];
  }
  return std::nullopt;
}

std::optional<double> capacitance_for_phase(double target_phase_rad,
                                            double r_ohm,
                                            const CircuitParams& cp) {
  PhaseSweep sweep(r_ohm, cp, kScanPoints);
  return sweep.capacitance_for(target_phase_rad);
}

std::optional<double> capacitance_for_phase_near(double target_phase_rad,
                                                 double r_ohm,
                                                 const CircuitParams& cp,
                                                 double c_hint) {
  double target = wrap_angle(target_phase_rad);
  auto residual = [&](double c) -> std::optional<double> {
    if (c < cp.c_min_f || c > cp.c_max_f) return std::nullopt;
    try {
      return wrap_angle(std::arg(reflection_coefficient(c, r_ohm, cp)) -
                        target);
    } catch (const SolverError&) {
      return std::nullopt;
    }
  };

  double c0 = std::clamp(c_hint, cp.c_min_f, cp.c_max_f);
  auto d0 = residual(c0);
  if (d0) {
    if (std::abs(*d0) <= kPhaseTol) return c0;
    // Expand a bracket geometrically around the hint on both sides.
    double step = 1e-3 * (cp.c_max_f - cp.c_min_f);
    for (int it = 0; it < 12; ++it, step *= 2.0) {
      for (double side : {+1.0, -1.0}) {
        double c1 = c0 + side * step;
        auto d1 = residual(c1);
        if (!d1) continue;
        if (*d0 * *d1 <= 0.0 && std::abs(*d0 - *d1) < units::kPi) {
          double lo = std::min(c0, c1), hi = std::max(c0, c1);
          double dl = (lo == c0) ? *d0 : *d1;
          auto root = refine_phase_root(lo, dl, hi, target, r_ohm, cp);
          if (root) {
            auto check = residual(*root);
            if (check && std::abs(*check) <= kPhaseTol) return root;
          }
        }
      }
    }
  }
  return capacitance_for_phase(target, r_ohm, cp);
}

std::optional<std::pair<double, double>> feasible_resistance_range(
    double target_phase_rad, const CircuitParams& cp) {
  double target = wrap_angle(target_phase_rad);
  constexpr int kGrid = 65;
  std::vector<double> rs(kGrid);
  std::vector<bool> ok(kGrid);
  for (int k = 0; k < kGrid; ++k) {
    rs[k] = cp.r_min_ohm + (cp.r_max_ohm - cp.r_min_ohm) * k / (kGrid - 1);
    ok[k] = capacitance_for_phase(target, rs[k], cp).has_value();
  }
  int first = -1, last = -1;
  for (int k = 0; k < kGrid; ++k) {
    if (ok[k]) {
      if (first < 0) first = k;
      last = k;
    }
  }
  if (first < 0) return std::nullopt;

  auto refine_edge = [&](double bad, double good) {
    for (int it = 0; it < 40 && std::abs(good - bad) > 1e-9; ++it) {
      double mid = 0.5 * (bad + good);
      if (capacitance_for_phase(target, mid, cp).has_value()) {
        good = mid;
      } else {
        bad = mid;
      }
    }
    return good;
  };

  double lo = rs[first];
  double hi = rs[last];
  if (first > 0) lo = refine_edge(rs[first - 1], rs[first]);
  if (last < kGrid - 1) hi = refine_edge(rs[last + 1], rs[last]);
  return std::make_pair(lo, hi);
}

std::optional<AmplitudeBounds> amplitude_bounds_from_sweeps(
    const PhaseSweep& strong, const PhaseSweep& weak,
    double target_phase_rad) {
  auto c_strong = strong.capacitance_for(target_phase_rad);
  auto c_weak = weak.capacitance_for(target_phase_rad);
  if (!c_strong || !c_weak) return std::nullopt;
  double a_strong = std::abs(
      reflection_coefficient(*c_strong, strong.r_ohm(), strong.circuit()));
  double a_weak = std::abs(
      reflection_coefficient(*c_weak, weak.r_ohm(), weak.circuit()));
  AmplitudeBounds b;
  if (a_strong >= a_weak) {
    b = {a_weak, a_strong, *c_weak, *c_strong, weak.r_ohm(), strong.r_ohm()};
  } else {
    b = {a_strong, a_weak, *c_strong, *c_weak, strong.r_ohm(), weak.r_ohm()};
  }
  return b;
}

std::optional<AmplitudeBounds> amplitude_bounds_exact(double target_phase_rad,
                                                      const CircuitParams& cp) {
  PhaseSweep strong(cp.r_min_ohm, cp, kScanPoints);
  PhaseSweep weak(cp.r_max_ohm, cp, kScanPoints);
  return amplitude_bounds_from_sweeps(strong, weak, target_phase_rad);
}

AmplitudeEnvelope fit_envelope(const CircuitParams& cp, int grid_size) {
  int g = std::max(grid_size, 1024);
  PhaseSweep strong(cp.r_min_ohm, cp, kScanPoints);
  PhaseSweep weak(cp.r_max_ohm, cp, kScanPoints);

  std::vector<double> amin(g), amax(g);
  std::vector<bool> feasible(g);
  auto grid_phase = [&](int p) {
    return -units::kPi + 2.0 * units::kPi * p / g;
  };
  auto bounds_at = [&](double phase, double* lo, double* hi) {
    auto b = amplitude_bounds_from_sweeps(strong, weak, phase);
    if (!b) return false;
    *lo = b->alpha_min;
    *hi = b->alpha_max;
    return true;
  };

  int n_feasible = 0;
  for (int k = 0; k < g; ++k) {
    feasible[k] = bounds_at(grid_phase(k), &amin[k], &amax[k]);
    if (feasible[k]) ++n_feasible;
  }
  if (n_feasible < 3) {
    throw SolverError("fit_envelope: fewer than 3 feasible grid phases");
  }

  // The feasible set is one circular arc; walk outward from the upper
  // envelope's peak to find its ends.
  int k_peak = -1;
  for (int k = 0; k < g; ++k) {
    if (feasible[k] && (k_peak < 0 || amax[k] > amax[k_peak])) k_peak = k;
  }
  auto wrap_idx = [&](int k) { return ((k % g) + g) % g; };
  int left = k_peak, right = k_peak;
  while (feasible[wrap_idx(left - 1)] && wrap_idx(left - 1) != right) --left;
  while (feasible[wrap_idx(right + 1)] && wrap_idx(right + 1) != wrap_idx(left))
    ++right;

  AmplitudeEnvelope env;
  env.window_lo = wrap_angle(grid_phase(left));
  env.window_width = (right - left) * (2.0 * units::kPi / g);

  // Extremum refinement: parabolic vertex through the grid neighbors,
  // re-evaluated exactly; skipped at window edges.
  auto refined_extremum = [&](const std::vector<double>& y, bool maximize,
                              bool upper, double* arg_out) {
    int pos_best = left;
    double ybest = y[wrap_idx(left)];
    for (int p = left; p <= right; ++p) {
      double yv = y[wrap_idx(p)];
      if (maximize ? yv > ybest : yv < ybest) {
        ybest = yv;
        pos_best = p;
      }
    }
    double arg_best = grid_phase(pos_best);
    double best = ybest;
    if (pos_best > left && pos_best < right) {
      double h = 2.0 * units::kPi / g;
      double vx = parabola_vertex(arg_best - h, y[wrap_idx(pos_best - 1)],
                                  arg_best, ybest, arg_best + h,
                                  y[wrap_idx(pos_best + 1)]);
      double lo, hi;
      if (bounds_at(vx, &lo, &hi)) {
        double cand = upper ? hi : lo;
        if (maximize ? cand > best : cand < best) {
          best = cand;
          arg_best = vx;
        }
      }
    }
    if (arg_out) *arg_out = wrap_angle(arg_best);
    return best;
  };

  double arg_peak = 0.0;
  env.beta_max = refined_extremum(amax, true, true, &arg_peak);
  env.beta_min = refined_extremum(amax, false, true, nullptr);
  env.delta_max = refined_extremum(amin, true, false, nullptr);
  env.delta_min = refined_extremum(amin, false, false, nullptr);
  env.theta = -arg_peak;

  env.err_min = 0.0;
  env.err_max = 0.0;
  for (int p = left; p <= right; ++p) {
    int kk = wrap_idx(p);
    double ph = grid_phase(p);
    env.err_min = std::max(env.err_min,
                           std::abs(approx_alpha_min(env, ph) - amin[kk]));
    env.err_max = std::max(env.err_max,
                           std::abs(approx_alpha_max(env, ph) - amax[kk]));
  }
  return env;
}

double approx_alpha_min(const AmplitudeEnvelope& env, double phase_rad) {
  return 0.5 * (env.delta_max - env.delta_min) *
             (std::cos(phase_rad + env.theta) + 1.0) +
         env.delta_min;
}

double approx_alpha_max(const AmplitudeEnvelope& env, double phase_rad) {
  return 0.5 * (env.beta_max - env.beta_min) *
             (std::cos(phase_rad + env.theta) + 1.0) +
         env.beta_min;
}

bool phase_in_window(const AmplitudeEnvelope& env, double phase_rad) {
  double w = wrap_angle(phase_rad) - env.window_lo;
  if (w < 0.0) w += 2.0 * units::kPi;
  return w <= env.window_width + 1e-12;
}

double clamp_phase_to_window(const AmplitudeEnvelope& env, double phase_rad) {
  if (phase_in_window(env, phase_rad)) return wrap_angle(phase_rad);
  double hi = env.window_lo + env.window_width;
  if (circular_distance(phase_rad, env.window_lo) <=
      circular_distance(phase_rad, hi)) {
    return wrap_angle(env.window_lo);
  }
  return wrap_angle(hi);
}

double amplitude_from_normalized(double phase_rad, double alpha_bar,
                                 const AmplitudeEnvelope& env) {
  if (alpha_bar < -1e-9 || alpha_bar > 1.0 + 1e-9) {
    throw ConfigError("amplitude_from_normalized: control must be in [0,1]");
  }
  double t = std::clamp(alpha_bar, 0.0, 1.0);
  double lo = approx_alpha_min(env, phase_rad);
  double hi = approx_alpha_max(env, phase_rad);
  return lo + t * (hi - lo);
}

double amplitude_from_normalized(double phase_rad, double alpha_bar,
                                 const CircuitParams& cp) {
  if (alpha_bar < -1e-9 || alpha_bar > 1.0 + 1e-9) {
    throw ConfigError("amplitude_from_normalized: control must be in [0,1]");
  }
  double t = std::clamp(alpha_bar, 0.0, 1.0);
  auto b = amplitude_bounds_exact(phase_rad, cp);
  if (!b) {
    throw SolverError("amplitude_from_normalized: phase " +
                      std::to_string(phase_rad) +
                      " rad not realizable by the circuit");
  }
  return b->alpha_min + t * (b->alpha_max - b->alpha_min);
}

double resistance_for_amplitude(double phase_rad, double alpha,
                                const CircuitParams& cp) {
  auto b = amplitude_bounds_exact(phase_rad, cp);
  if (!b) {
    throw SolverError("resistance_for_amplitude: phase not realizable");
  }
  return resistance_for_amplitude(phase_rad, alpha, cp, *b);
}

double resistance_for_amplitude(double phase_rad, double alpha,
                                const CircuitParams& cp,
                                const AmplitudeBounds& b) {
  if (alpha < b.alpha_min - 1e-9 || alpha > b.alpha_max + 1e-9) {
    throw SolverError("resistance_for_amplitude: amplitude " +
                      std::to_string(alpha) + " outside exact bounds [" +
                      std::to_string(b.alpha_min) + ", " +
                      std::to_string(b.alpha_max) + "]");
  }
  double target = std::clamp(alpha, b.alpha_min, b.alpha_max);
  if (target >= b.alpha_max - 1e-12) return b.r_at_max_ohm;
  if (target <= b.alpha_min + 1e-12) return b.r_at_min_ohm;
  double lo = b.r_at_max_ohm;  // amplitude alpha_max here
  double hi = b.r_at_min_ohm;  // amplitude alpha_min here
  if (lo == hi) return lo;

  // Track the phase-matching capacitance while bisecting over R: warm
  // starts keep each inner root-find local.
  double c_warm = 0.5 * (b.c_at_max_f + b.c_at_min_f);
  auto amp_at = [&](double r) {
    auto c = capacitance_for_phase_near(phase_rad, r, cp, c_warm);
    if (!c) {
      throw SolverError(
          "resistance_for_amplitude: interior resistance lost phase "
          "feasibility");
    }
    c_warm = *c;
    return std::abs(reflection_coefficient(*c, r, cp));
  };

  double f_lo = b.alpha_max - target;  // >= 0
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    double f_mid = amp_at(mid) - target;
    if (std::abs(f_mid) <= 1e-10 || std::abs(hi - lo) < 1e-13) return mid;
    if ((f_mid >= 0.0) == (f_lo >= 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace arisim::cell
