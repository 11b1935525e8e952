#include "arisim/experiments.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "arisim/ao.hpp"
#include "arisim/cell.hpp"
#include "arisim/channel.hpp"
#include "arisim/errors.hpp"
#include "arisim/power.hpp"
#include "arisim/siso.hpp"
#include "arisim/stats.hpp"
#include "arisim/units.hpp"

#ifndef ARISIM_BUILD_ID
#define ARISIM_BUILD_ID "unknown"
#endif

namespace arisim::experiments {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct MeanSe {
  double mean = kNan;
  double se = kNan;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  if (xs.empty()) return r;
  double sum = 0.0;
  for (double x : xs) sum += x;
  r.mean = sum / xs.size();
  if (xs.size() < 2) {
    r.se = 0.0;
    return r;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / (xs.size() - 1) / xs.size());
  return r;
}

csv::ResultTable new_table(const config::ExperimentConfig& cfg) {
  csv::ResultTable t;
  t.add_metadata("build", ARISIM_BUILD_ID);
  t.add_metadata("experiment", cfg.id);
  t.add_metadata("seed", std::to_string(cfg.seed));
  t.add_metadata("trials", std::to_string(cfg.trials));
  return t;
}

// ---- SISO experiments -------------------------------------------------------

csv::ResultTable run_gamma_fit_table(const config::ExperimentConfig& cfg) {
  csv::ResultTable t = new_table(cfg);
  t.columns = {{"n", "-"},          {"p_max", "dBm"}, {"p_t", "dBm"},
               {"shape", "-"},      {"scale", "-"},   {"snr_mean", "-"},
               {"snr_se", "-"}};
  RngStream root(cfg.seed);
  for (size_t e = 0; e < cfg.gamma_entries.size(); ++e) {
    const auto& entry = cfg.gamma_entries[e];
    siso::SisoScenario sc = cfg.siso;
    sc.n_per_panel = entry.n;
    sc.p_max_w = entry.p_max_w;
    sc.p_t_w = entry.p_t_w;
    RngStream er = root.substream(e);
    std::vector<double> snr(cfg.trials);
    parallel_trials(cfg.trials, [&](long i) {
      RngStream r = er.substream(static_cast<std::uint64_t>(i));
      siso::SisoDraw d = siso::sample_links(sc, r);
      snr[i] = siso::operating_point(d.h, d.g, sc).snr;
    });
    stats::GammaFit fit = stats::fit_gamma_moments(snr);
    MeanSe ms = mean_se(snr);
    t.add_row({static_cast<double>(entry.n),
               units::watt_to_dbm(entry.p_max_w),
               units::watt_to_dbm(entry.p_t_w), fit.shape, fit.scale, ms.mean,
               ms.se});
  }
  return t;
}

csv::ResultTable run_ber_vs_pt(const config::ExperimentConfig& cfg) {
  csv::ResultTable t = new_table(cfg);
  t.columns = {{"n", "-"},        {"p_max", "dBm"},  {"p_t", "dBm"},
               {"ber_mc", "-"},   {"ber_mc_se", "-"}, {"bep_analytic", "-"}};
  t.add_metadata("symbols_per_trial", std::to_string(cfg.symbols_per_trial));
  RngStream root(cfg.seed);
  std::uint64_t point = 0;
  for (const auto& setup : cfg.ber_setups) {
    for (double p_t_w : cfg.p_t_w_values) {
      siso::SisoScenario sc = cfg.siso;
      sc.n_per_panel = setup.n;
      sc.p_max_w = setup.p_max_w;
      sc.p_t_w = p_t_w;
      RngStream pr = root.substream(point++);
      std::vector<double> snr(cfg.trials);
      std::vector<double> ber(cfg.trials);
      parallel_trials(cfg.trials, [&](long i) {
        RngStream r = pr.substream(static_cast<std::uint64_t>(i));
        siso::SisoDraw d = siso::sample_links(sc, r);
        snr[i] = siso::operating_point(d.h, d.g, sc).snr;
        siso::SymbolCounts counts = siso::simulate_received_symbols(
            d.h, d.g, sc, cfg.symbols_per_trial, r);
        ber[i] = static_cast<double>(counts.errors) /
                 static_cast<double>(counts.symbols);
      });
      stats::GammaFit fit = stats::fit_gamma_moments(snr);
      double bep = stats::bep_bpsk(fit.shape, fit.scale);
      MeanSe ms = mean_se(ber);
      t.add_row({static_cast<double>(setup.n),
                 units::watt_to_dbm(setup.p_max_w), units::watt_to_dbm(p_t_w),
                 ms.mean, ms.se, bep});
    }
  }
  return t;
}

// Mean/standard-error of the amplified link and the element-matched passive
// baseline for one scenario.
struct RatePair {
  MeanSe active;
  MeanSe passive;
  double g_opt_mean = kNan;
  double p_out_mean = kNan;
};

RatePair rate_pair(const siso::SisoScenario& sc, long trials,
                   const RngStream& point_root) {
  std::vector<double> active(trials), passive(trials), gain(trials),
      pout(trials);
  siso::SisoScenario sc_pass = sc;
  sc_pass.n_per_panel = sc.n_passive();
  parallel_trials(trials, [&](long i) {
    RngStream r = point_root.substream(static_cast<std::uint64_t>(i));
    siso::SisoDraw d = siso::sample_links(sc, r);
    siso::OperatingPoint op = siso::operating_point(d.h, d.g, sc);
    active[i] = siso::rate_active(op.snr);
    gain[i] = op.gain;
    pout[i] = op.p_out_w;
    siso::SisoDraw dp = siso::sample_links(sc_pass, r);
    passive[i] = siso::rate_active(siso::snr_passive_baseline(
        dp.h, dp.g, sc.p_t_w, sc.sigma2_rx_w));
  });
  RatePair rp;
  rp.active = mean_se(active);
  rp.passive = mean_se(passive);
  rp.g_opt_mean = mean_se(gain).mean;
  rp.p_out_mean = mean_se(pout).mean;
  return rp;
}

csv::ResultTable run_rate_vs_dh(const config::ExperimentConfig& cfg) {
  csv::ResultTable t = new_table(cfg);
  t.columns = {{"n", "-"},
               {"d_h", "m"},
               {"rate_active_mean", "bits/s/Hz"},
               {"rate_active_se", "bits/s/Hz"},
               {"rate_passive_mean", "bits/s/Hz"},
               {"rate_passive_se", "bits/s/Hz"}};
  RngStream root(cfg.seed);
  std::uint64_t point = 0;
  for (int n : cfg.n_values) {
    for (double d_h : cfg.d_h_m_values) {
      siso::SisoScenario sc = cfg.siso;
      sc.n_per_panel = n;
      sc.geometry.d_h_m = d_h;
      RatePair rp = rate_pair(sc, cfg.trials, root.substream(point++));
      t.add_row({static_cast<double>(n), d_h, rp.active.mean, rp.active.se,
                 rp.passive.mean, rp.passive.se});
    }
  }
  return t;
}

csv::ResultTable run_rate_vs_n(const config::ExperimentConfig& cfg) {
  csv::ResultTable t = new_table(cfg);
  t.columns = {{"n", "-"},
               {"p_t", "dBm"},
               {"p_max", "dBm"},
               {"rate_active_mean", "bits/s/Hz"},
               {"rate_active_se", "bits/s/Hz"},
               {"g_opt_mean", "-"},
               {"p_out_mean", "W"},
               {"rate_passive_mean", "bits/s/Hz"},
               {"rate_passive_se", "bits/s/Hz"}};
  RngStream root(cfg.seed);
  std::uint64_t point = 0;
  for (double p_max_w : cfg.p_max_w_values) {
    for (double p_t_w : cfg.p_t_w_values) {
      for (int n : cfg.n_values) {
        siso::SisoScenario sc = cfg.siso;
        sc.n_per_panel = n;
        sc.p_max_w = p_max_w;
        sc.p_t_w = p_t_w;
        RatePair rp = rate_pair(sc, cfg.trials, root.substream(point++));
        t.add_row({static_cast<double>(n), units::watt_to_dbm(p_t_w),
                   units::watt_to_dbm(p_max_w), rp.active.mean, rp.active.se,
                   rp.g_opt_mean, rp.p_out_mean, rp.passive.mean,
                   rp.passive.se});
      }
    }
  }
  return t;
}

csv::ResultTable run_ee_sweeps(const config::ExperimentConfig& cfg) {
  csv::ResultTable t = new_table(cfg);
  bool axis_n = cfg.ee_axis == "n";
  bool axis_pt = cfg.ee_axis == "p_t";
  csv::Column axis_col = axis_n ? csv::Column{"n", "-"}
                        : axis_pt ? csv::Column{"p_t", "dBm"}
                                  : csv::Column{"p_max", "dBm"};
  csv::Column curve_col =
      cfg.ee_axis == "p_max" ? csv::Column{"p_t", "dBm"}
                             : csv::Column{"p_max", "dBm"};
  t.columns = {axis_col,
               curve_col,
               {"ee_active_mean", "bits/J"},
               {"ee_active_se", "bits/J"},
               {"rate_active_mean", "bits/s/Hz"},
               {"p_tot_active_mean", "W"},
               {"ee_passive_mean", "bits/J"},
               {"ee_passive_se", "bits/J"},
               {"rate_passive_mean", "bits/s/Hz"},
               {"p_tot_passive_mean", "W"}};
  t.add_metadata("axis", cfg.ee_axis);

  std::vector<double> axis_values;
  if (axis_n) {
    for (int n : cfg.n_values) axis_values.push_back(n);
  } else if (axis_pt) {
    axis_values = cfg.p_t_w_values;
  } else {
    axis_values = cfg.p_max_w_values;
  }
  const std::vector<double>& curve_values =
      cfg.ee_axis == "p_max" ? cfg.p_t_w_values : cfg.p_max_w_values;

  RngStream root(cfg.seed);
  std::uint64_t point = 0;
  for (double curve : curve_values) {
    for (double axis : axis_values) {
      siso::SisoScenario sc = cfg.siso;
      if (axis_n) {
        sc.n_per_panel = static_cast<int>(axis);
      } else if (axis_pt) {
        sc.p_t_w = axis;
      } else {
        sc.p_max_w = axis;
      }
      if (cfg.ee_axis == "p_max") {
        sc.p_t_w = curve;
      } else {
        sc.p_max_w = curve;
      }
      int n_elements = 2 * sc.n_per_panel;  // both panels draw control power
      RngStream pr = root.substream(point++);
      std::vector<double> ee_a(cfg.trials), rate_a(cfg.trials),
          ptot_a(cfg.trials), ee_p(cfg.trials), rate_p(cfg.trials);
      siso::SisoScenario sc_pass = sc;
      sc_pass.n_per_panel = sc.n_passive();
      parallel_trials(cfg.trials, [&](long i) {
        RngStream r = pr.substream(static_cast<std::uint64_t>(i));
        siso::SisoDraw d = siso::sample_links(sc, r);
        siso::OperatingPoint op = siso::operating_point(d.h, d.g, sc);
        rate_a[i] = siso::rate_active(op.snr);
        ptot_a[i] = power::total_power_active(sc.p_t_w, n_elements, op.p_out_w,
                                              sc.p_max_w, cfg.power);
        ee_a[i] = power::energy_efficiency(rate_a[i], sc.bw_hz, ptot_a[i]);
        siso::SisoDraw dp = siso::sample_links(sc_pass, r);
        rate_p[i] = siso::rate_active(siso::snr_passive_baseline(
            dp.h, dp.g, sc.p_t_w, sc.sigma2_rx_w));
        double ptot_p =
            power::total_power_passive(sc.p_t_w, n_elements, cfg.power);
        ee_p[i] = power::energy_efficiency(rate_p[i], sc.bw_hz, ptot_p);
      });
      MeanSe mee_a = mean_se(ee_a), mee_p = mean_se(ee_p);
      double curve_out = units::watt_to_dbm(curve);
      double axis_out = axis_n ? axis : units::watt_to_dbm(axis);
      t.add_row({axis_out, curve_out, mee_a.mean, mee_a.se,
                 mean_se(rate_a).mean, mean_se(ptot_a).mean, mee_p.mean,
                 mee_p.se, mean_se(rate_p).mean,
                 power::total_power_passive(sc.p_t_w, n_elements, cfg.power)});
    }
  }
  return t;
}

csv::ResultTable run_envelope_fig(const config::ExperimentConfig& cfg) {
  csv::ResultTable t = new_table(cfg);
  t.columns = {{"phase", "rad"},
               {"alpha_min_exact", "-"},
               {"alpha_max_exact", "-"},
               {"alpha_min_approx", "-"},
               {"alpha_max_approx", "-"}};
  cell::CircuitParams cp{};
  cell::AmplitudeEnvelope env = cell::fit_envelope(cp, cfg.phase_grid);
  cell::PhaseSweep strong(cp.r_min_ohm, cp);
  cell::PhaseSweep weak(cp.r_max_ohm, cp);
  for (int k = 0; k < cfg.phase_grid; ++k) {
    double phase =
        -units::kPi + 2.0 * units::kPi * k / cfg.phase_grid;
    auto b = cell::amplitude_bounds_from_sweeps(strong, weak, phase);
    if (!b) continue;
    t.add_row({phase, b->alpha_min, b->alpha_max,
               cell::approx_alpha_min(env, phase),
               cell::approx_alpha_max(env, phase)});
  }
  t.add_metadata("theta_rad", std::to_string(env.theta));
  t.add_metadata("window_lo_rad", std::to_string(env.window_lo));
  t.add_metadata("window_width_rad", std::to_string(env.window_width));
  t.add_metadata("fit_err_min", std::to_string(env.err_min));
  t.add_metadata("fit_err_max", std::to_string(env.err_max));
  return t;
}

// ---- MIMO experiments -------------------------------------------------------

struct SolverRates {
  std::vector<double> ao, pai, ga, pso;
};

SolverRates solver_rates(const mimo::MimoScenario& sc,
                         const ao::RISModel& model, const ao::AOOptions& opt,
                         long trials, const RngStream& point_root) {
  SolverRates out;
  out.ao.resize(trials);
  out.pai.resize(trials);
  out.ga.resize(trials);
  out.pso.resize(trials);
  parallel_trials(trials, [&](long i) {
    RngStream tr = point_root.substream(static_cast<std::uint64_t>(i));
    mimo::MimoChannels ch = mimo::sample_mimo_channels(sc, tr);
    ao::AOState st = ao::ao_solve(sc, ch, model, opt);
    out.ao[i] = st.achieved_rate_exact;
    out.pai[i] = ao::pai_solve(sc, ch, model, opt).achieved_rate_exact;
    RngStream ga_rng = tr.substream(1);
    out.ga[i] = ao::ga_solve(sc, ch, model, st.objective_evaluations, ga_rng)
                    .achieved_rate_exact;
    RngStream pso_rng = tr.substream(2);
    out.pso[i] = ao::pso_solve(sc, ch, model, st.objective_evaluations,
                               pso_rng)
                     .achieved_rate_exact;
  });
  return out;
}

void add_solver_row(csv::ResultTable& t, std::vector<double> prefix,
                    const SolverRates& r) {
  for (const auto* xs : {&r.ao, &r.pai, &r.ga, &r.pso}) {
    MeanSe ms = mean_se(*xs);
    prefix.push_back(ms.mean);
    prefix.push_back(ms.se);
  }
  t.add_row(std::move(prefix));
}

void add_failed_row(csv::ResultTable& t, std::vector<double> prefix,
                    int rate_cells, const std::string& what) {
  for (int i = 0; i < rate_cells; ++i) prefix.push_back(kNan);
  t.add_row(std::move(prefix));
  t.add_metadata("failed_point", what);
}

csv::ResultTable run_rate_vs_rho(const config::ExperimentConfig& cfg) {
  csv::ResultTable t = new_table(cfg);
  t.columns = {{"rho", "dB"},          {"p_t", "dBm"},
               {"rate_ao_mean", "bits/s/Hz"},  {"rate_ao_se", "bits/s/Hz"},
               {"rate_pai_mean", "bits/s/Hz"}, {"rate_pai_se", "bits/s/Hz"},
               {"rate_ga_mean", "bits/s/Hz"},  {"rate_ga_se", "bits/s/Hz"},
               {"rate_pso_mean", "bits/s/Hz"}, {"rate_pso_se", "bits/s/Hz"}};
  ao::RISModel model = ao::make_ris_model(cfg.mimo.n, cfg.mimo.n_act);
  RngStream root(cfg.seed);
  std::uint64_t point = 0;
  for (double rho_db : cfg.rho_db_values) {
    mimo::MimoScenario sc = cfg.mimo;
    sc.p_t_w = mimo::p_t_for_rho(units::db_to_linear(rho_db),
                                 sc.wavelength_m(), sc.d_ris_tx_m,
                                 sc.d_rx_ris_m, sc.sigma2_w, sc.f_r);
    std::vector<double> prefix{rho_db, units::watt_to_dbm(sc.p_t_w)};
    RngStream pr = root.substream(point++);
    try {
      SolverRates r = solver_rates(sc, model, cfg.ao, cfg.trials, pr);
      add_solver_row(t, std::move(prefix), r);
    } catch (const Error& e) {
      add_failed_row(t, std::move(prefix), 8,
                     "rho=" + std::to_string(rho_db) + " dB: " + e.what());
    }
  }
  return t;
}

csv::ResultTable run_rate_vs_distance(const config::ExperimentConfig& cfg) {
  csv::ResultTable t = new_table(cfg);
  t.columns = {{"d_rx_ris", "m"},      {"p_t", "dBm"},
               {"rate_ao_mean", "bits/s/Hz"},  {"rate_ao_se", "bits/s/Hz"},
               {"rate_pai_mean", "bits/s/Hz"}, {"rate_pai_se", "bits/s/Hz"},
               {"rate_ga_mean", "bits/s/Hz"},  {"rate_ga_se", "bits/s/Hz"},
               {"rate_pso_mean", "bits/s/Hz"}, {"rate_pso_se", "bits/s/Hz"}};
  t.add_metadata("rho_db", std::to_string(cfg.fixed_rho_db));
  ao::RISModel model = ao::make_ris_model(cfg.mimo.n, cfg.mimo.n_act);
  RngStream root(cfg.seed);
  std::uint64_t point = 0;
  for (double d_rx : cfg.d_rx_ris_m_values) {
    mimo::MimoScenario sc = cfg.mimo;
    sc.d_rx_ris_m = d_rx;
    sc.p_t_w = mimo::p_t_for_rho(units::db_to_linear(cfg.fixed_rho_db),
                                 sc.wavelength_m(), sc.d_ris_tx_m,
                                 sc.d_rx_ris_m, sc.sigma2_w, sc.f_r);
    std::vector<double> prefix{d_rx, units::watt_to_dbm(sc.p_t_w)};
    RngStream pr = root.substream(point++);
    try {
      SolverRates r = solver_rates(sc, model, cfg.ao, cfg.trials, pr);
      add_solver_row(t, std::move(prefix), r);
    } catch (const Error& e) {
      add_failed_row(t, std::move(prefix), 8,
                     "d_rx_ris=" + std::to_string(d_rx) + " m: " + e.what());
    }
  }
  return t;
}

csv::ResultTable run_rate_vs_pris(const config::ExperimentConfig& cfg) {
  csv::ResultTable t = new_table(cfg);
  t.columns = {{"p_ris", "W"},
               {"n_act", "-"},
               {"rate_ao_mean", "bits/s/Hz"},
               {"rate_ao_se", "bits/s/Hz"}};
  RngStream root(cfg.seed);
  std::uint64_t point = 0;
  for (double frac : cfg.n_act_fractions) {
    int n_act = static_cast<int>(std::lround(frac * cfg.mimo.n));
    ao::RISModel model = ao::make_ris_model(cfg.mimo.n, n_act);
    for (double p_ris : cfg.p_ris_w_values) {
      mimo::MimoScenario sc = cfg.mimo;
      sc.n_act = n_act;
      sc.p_ris_w = p_ris;
      std::vector<double> prefix{p_ris, static_cast<double>(n_act)};
      RngStream pr = root.substream(point++);
      try {
        if (n_act > 0 && p_ris < n_act * model.p_elem_min_w * (1.0 - 1e-12)) {
          throw SolverError("budget below the active-element floor of " +
                            std::to_string(n_act * model.p_elem_min_w) +
                            " W");
        }
        std::vector<double> rates(cfg.trials);
        parallel_trials(cfg.trials, [&](long i) {
          RngStream tr = pr.substream(static_cast<std::uint64_t>(i));
          mimo::MimoChannels ch = mimo::sample_mimo_channels(sc, tr);
          rates[i] = ao::ao_solve(sc, ch, model, cfg.ao).achieved_rate_exact;
        });
        MeanSe ms = mean_se(rates);
        prefix.push_back(ms.mean);
        prefix.push_back(ms.se);
        t.add_row(std::move(prefix));
      } catch (const Error& e) {
        add_failed_row(t, std::move(prefix), 2,
                       "p_ris=" + std::to_string(p_ris) +
                           " W, n_act=" + std::to_string(n_act) + ": " +
                           e.what());
      }
    }
  }
  return t;
}

}  // namespace

void parallel_trials(long trials, const std::function<void(long)>& fn) {
  if (trials <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  unsigned workers = hw == 0 ? 1 : std::min<unsigned>(hw, 8);
  if (workers <= 1 || trials == 1) {
    for (long i = 0; i < trials; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      long i = next.fetch_add(1);
      if (i >= trials) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

csv::ResultTable run_experiment(const config::ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.id == "gamma-fit-table") return run_gamma_fit_table(cfg);
  if (cfg.id == "ber-vs-pt") return run_ber_vs_pt(cfg);
  if (cfg.id == "rate-vs-dh") return run_rate_vs_dh(cfg);
  if (cfg.id == "rate-vs-n") return run_rate_vs_n(cfg);
  if (cfg.id == "ee-sweeps") return run_ee_sweeps(cfg);
  if (cfg.id == "envelope-fig") return run_envelope_fig(cfg);
  if (cfg.id == "rate-vs-rho") return run_rate_vs_rho(cfg);
  if (cfg.id == "rate-vs-distance") return run_rate_vs_distance(cfg);
  if (cfg.id == "rate-vs-pris") return run_rate_vs_pris(cfg);
  throw ConfigError("unknown experiment '" + cfg.id + "'");
}

}  // namespace arisim::experiments
