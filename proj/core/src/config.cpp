#include "arisim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "arisim/cell.hpp"
#include "arisim/errors.hpp"
#include "arisim/units.hpp"

namespace arisim::config {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  size_t b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

struct Quantity {
  double value;
  std::string unit;
};

Quantity split_quantity(const std::string& text) {
  std::string s = trim(text);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) {
    throw ConfigError("cannot parse a number from '" + text + "'");
  }
  std::string unit = trim(std::string(end));
  if (unit.empty()) {
    throw ConfigError("missing unit suffix on '" + text +
                      "' (dimensioned values require one, e.g. \"30 dBm\")");
  }
  return {v, unit};
}

[[noreturn]] void bad_unit(const std::string& text, const char* accepted) {
  throw ConfigError("unsupported unit in '" + text + "'; accepted: " +
                    accepted);
}

}  // namespace

double parse_power_w(const std::string& text) {
  Quantity q = split_quantity(text);
  if (q.unit == "dBm") return units::dbm_to_watt(q.value);
  if (q.unit == "dBW") return units::dbw_to_watt(q.value);
  if (q.unit == "W") return q.value;
  if (q.unit == "mW") return q.value * 1e-3;
  if (q.unit == "uW") return q.value * 1e-6;
  bad_unit(text, "dBm, dBW, W, mW, uW");
}

double parse_distance_m(const std::string& text) {
  Quantity q = split_quantity(text);
  if (q.unit == "m") return q.value;
  if (q.unit == "cm") return q.value * 1e-2;
  if (q.unit == "km") return q.value * 1e3;
  bad_unit(text, "m, cm, km");
}

double parse_frequency_hz(const std::string& text) {
  Quantity q = split_quantity(text);
  if (q.unit == "Hz") return q.value;
  if (q.unit == "kHz") return q.value * 1e3;
  if (q.unit == "MHz") return q.value * 1e6;
  if (q.unit == "GHz") return q.value * 1e9;
  bad_unit(text, "Hz, kHz, MHz, GHz");
}

double parse_ratio_linear(const std::string& text) {
  Quantity q = split_quantity(text);
  if (q.unit == "dB") return units::db_to_linear(q.value);
  if (q.unit == "linear") return q.value;
  bad_unit(text, "dB, linear");
}

double parse_db(const std::string& text) {
  Quantity q = split_quantity(text);
  if (q.unit == "dB") return q.value;
  bad_unit(text, "dB");
}

namespace {

// ---- typed JSON accessors -------------------------------------------------

std::string quantity_string(const json& v, const std::string& key) {
  if (!v.is_string()) {
    throw ConfigError("'" + key +
                      "': dimensioned values must be unit-suffixed strings "
                      "(e.g. \"30 dBm\", \"5 m\"), got " + v.dump());
  }
  return v.get<std::string>();
}

double as_power_w(const json& v, const std::string& key) {
  return parse_power_w(quantity_string(v, key));
}
double as_distance_m(const json& v, const std::string& key) {
  return parse_distance_m(quantity_string(v, key));
}
double as_frequency_hz(const json& v, const std::string& key) {
  return parse_frequency_hz(quantity_string(v, key));
}
double as_ratio_linear(const json& v, const std::string& key) {
  return parse_ratio_linear(quantity_string(v, key));
}
double as_db(const json& v, const std::string& key) {
  return parse_db(quantity_string(v, key));
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) {
    throw ConfigError("'" + key + "': expected a plain number, got " +
                      v.dump());
  }
  return v.get<double>();
}

long as_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw ConfigError("'" + key + "': expected an integer, got " + v.dump());
  }
  return v.get<long>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) {
    throw ConfigError("'" + key + "': expected a boolean, got " + v.dump());
  }
  return v.get<bool>();
}

const json& as_object(const json& v, const std::string& key) {
  if (!v.is_object()) {
    throw ConfigError("'" + key + "': expected an object, got " + v.dump());
  }
  return v;
}

const json& as_array(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError("'" + key + "': expected a non-empty array, got " +
                      v.dump());
  }
  return v;
}

void reject_unknown(const json& obj,
                    std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      std::string list;
      for (const char* k : allowed) {
        if (!list.empty()) list += ", ";
        list += k;
      }
      throw ConfigError("unknown key '" + it.key() + "' in " + where +
                        " (allowed: " + list + ")");
    }
  }
}

channel::LinkState as_link_state(const json& v, const std::string& key) {
  if (!v.is_string()) {
    throw ConfigError("'" + key + "': expected \"auto\", \"los\" or \"nlos\"");
  }
  std::string s = v.get<std::string>();
  if (s == "auto") return channel::LinkState::automatic;
  if (s == "los") return channel::LinkState::los;
  if (s == "nlos") return channel::LinkState::nlos;
  throw ConfigError("'" + key + "': expected \"auto\", \"los\" or \"nlos\", "
                    "got \"" + s + "\"");
}

// ---- defaults ---------------------------------------------------------------

std::vector<double> dbm_list(std::initializer_list<double> dbm) {
  std::vector<double> out;
  for (double v : dbm) out.push_back(units::dbm_to_watt(v));
  return out;
}

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) {
    out[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
  }
  return out;
}

void default_ris_budgets(ExperimentConfig& c) {
  cell::CircuitParams cp{};
  double p_min = cell::power_for_resistance(cp.r_max_ohm);
  double p_max = cell::power_for_resistance(cp.r_min_ohm);
  c.p_ris_w_values = linspace(1.05 * c.mimo.n * p_min, c.mimo.n * p_max, 5);
}

void apply_desk_scale(ExperimentConfig& c) {
  c.mimo.m_t = c.mimo.m_r = c.mimo.d = 4;
  c.mimo.n = c.mimo.n_act = 32;
}

bool is_mimo_id(const std::string& id) {
  return id == "rate-vs-rho" || id == "rate-vs-distance" ||
         id == "rate-vs-pris";
}

void apply_paper_scale(ExperimentConfig& c) {
  if (is_mimo_id(c.id)) {
    c.mimo.m_t = c.mimo.m_r = c.mimo.d = 8;
    c.mimo.n = c.mimo.n_act = 64;
    c.trials = 200;
    if (c.id == "rate-vs-pris") default_ris_budgets(c);
  }
  if (c.id == "gamma-fit-table") {
    c.gamma_entries.clear();
    for (double p_max_dbm : {10.0, 20.0}) {
      for (int n : {64, 256}) {
        for (double p_t_dbm = -10.0; p_t_dbm <= 30.0; p_t_dbm += 5.0) {
          c.gamma_entries.push_back({n, units::dbm_to_watt(p_max_dbm),
                                     units::dbm_to_watt(p_t_dbm)});
        }
      }
    }
  }
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {
      "ber-vs-pt",        "ee-sweeps",     "envelope-fig",
      "gamma-fit-table",  "rate-vs-dh",    "rate-vs-distance",
      "rate-vs-n",        "rate-vs-pris",  "rate-vs-rho"};
  return ids;
}

ExperimentConfig default_config(const std::string& id) {
  if (std::find(experiment_ids().begin(), experiment_ids().end(), id) ==
      experiment_ids().end()) {
    std::string list;
    for (const auto& k : experiment_ids()) {
      if (!list.empty()) list += ", ";
      list += k;
    }
    throw ConfigError("unknown experiment '" + id + "' (registered: " + list +
                      ")");
  }
  ExperimentConfig c;
  c.id = id;
  apply_desk_scale(c);

  if (id == "gamma-fit-table") {
    c.trials = 100000;
    c.gamma_entries = {
        {64, units::dbm_to_watt(10.0), units::dbm_to_watt(-10.0)},
        {256, units::dbm_to_watt(20.0), units::dbm_to_watt(0.0)}};
    // Matches the published fit setting: a line-of-sight first hop and a
    // non-line-of-sight second hop.
    c.siso.state_h = channel::LinkState::los;
    c.siso.state_g = channel::LinkState::nlos;
  } else if (id == "ber-vs-pt") {
    c.trials = 500;
    c.symbols_per_trial = 2000;
    c.p_t_w_values = dbm_list({0, 5, 10, 15, 20, 25, 30});
    c.ber_setups = {{32, units::dbm_to_watt(10.0)},
                    {128, units::dbm_to_watt(10.0)},
                    {256, units::dbm_to_watt(10.0)},
                    {32, units::dbm_to_watt(20.0)},
                    {128, units::dbm_to_watt(20.0)},
                    {256, units::dbm_to_watt(20.0)}};
    c.siso.state_h = channel::LinkState::los;
    c.siso.state_g = channel::LinkState::nlos;
  } else if (id == "rate-vs-dh") {
    c.trials = 400;
    c.d_h_m_values = linspace(2.0, 48.0, 24);
    c.n_values = {64, 128};
  } else if (id == "rate-vs-n") {
    c.trials = 400;
    c.n_values = {16, 32, 64, 96, 128, 192, 256};
    c.p_t_w_values = dbm_list({10, 20});
    c.p_max_w_values = dbm_list({10, 20});
  } else if (id == "ee-sweeps") {
    c.trials = 400;
    c.ee_axis = "n";
    c.n_values = {16, 32, 64, 128, 192, 256};
    c.p_t_w_values = dbm_list({30});
    c.p_max_w_values = dbm_list({10, 20, 50});
  } else if (id == "envelope-fig") {
    c.trials = 1;
    c.phase_grid = 1024;
  } else if (id == "rate-vs-rho") {
    c.trials = 50;
    c.rho_db_values = {-20.0, -10.0, 0.0, 10.0};
  } else if (id == "rate-vs-distance") {
    c.trials = 50;
    c.d_rx_ris_m_values = {1, 2, 4, 8, 16, 32};
    c.fixed_rho_db = -30.0;
  } else if (id == "rate-vs-pris") {
    c.trials = 30;
    c.n_act_fractions = {0.25, 0.5, 0.75, 1.0};
    default_ris_budgets(c);
  }
  return c;
}

namespace {

void apply_siso_overrides(ExperimentConfig& c, const json& s) {
  reject_unknown(s,
                 {"d_v", "d_h", "d", "f_c", "bandwidth", "p_t", "p_max",
                  "g_max", "noise_figure", "k1", "k2", "n", "sigma2_tot",
                  "sigma2_rx", "link_h", "link_g"},
                 "scenario.siso");
  for (auto it = s.begin(); it != s.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "d_v") c.siso.geometry.d_v_m = as_distance_m(v, k);
    else if (k == "d_h") c.siso.geometry.d_h_m = as_distance_m(v, k);
    else if (k == "d") c.siso.geometry.d_m = as_distance_m(v, k);
    else if (k == "f_c") c.siso.f_c_ghz = as_frequency_hz(v, k) / 1e9;
    else if (k == "bandwidth") c.siso.bw_hz = as_frequency_hz(v, k);
    else if (k == "p_t") c.siso.p_t_w = as_power_w(v, k);
    else if (k == "p_max") c.siso.p_max_w = as_power_w(v, k);
    else if (k == "g_max") c.siso.g_max = as_ratio_linear(v, k);
    else if (k == "noise_figure") c.siso.noise_figure = as_ratio_linear(v, k);
    else if (k == "k1") c.siso.k1 = as_number(v, k);
    else if (k == "k2") c.siso.k2 = as_number(v, k);
    else if (k == "n") c.siso.n_per_panel = static_cast<int>(as_integer(v, k));
    else if (k == "sigma2_tot") c.siso.sigma2_tot_w = as_power_w(v, k);
    else if (k == "sigma2_rx") c.siso.sigma2_rx_w = as_power_w(v, k);
    else if (k == "link_h") c.siso.state_h = as_link_state(v, k);
    else if (k == "link_g") c.siso.state_g = as_link_state(v, k);
  }
}

void apply_mimo_overrides(ExperimentConfig& c, const json& s) {
  reject_unknown(s,
                 {"m_t", "m_r", "streams", "n", "n_act", "sigma2", "f_r",
                  "f_s", "p_t", "p_ris", "d_ris_tx", "d_rx_ris", "d_tx_rx",
                  "f_c"},
                 "scenario.mimo");
  for (auto it = s.begin(); it != s.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "m_t") c.mimo.m_t = static_cast<int>(as_integer(v, k));
    else if (k == "m_r") c.mimo.m_r = static_cast<int>(as_integer(v, k));
    else if (k == "streams") c.mimo.d = static_cast<int>(as_integer(v, k));
    else if (k == "n") c.mimo.n = static_cast<int>(as_integer(v, k));
    else if (k == "n_act") c.mimo.n_act = static_cast<int>(as_integer(v, k));
    else if (k == "sigma2") c.mimo.sigma2_w = as_power_w(v, k);
    else if (k == "f_r") c.mimo.f_r = as_ratio_linear(v, k);
    else if (k == "f_s") c.mimo.f_s = as_ratio_linear(v, k);
    else if (k == "p_t") c.mimo.p_t_w = as_power_w(v, k);
    else if (k == "p_ris") c.mimo.p_ris_w = as_power_w(v, k);
    else if (k == "d_ris_tx") c.mimo.d_ris_tx_m = as_distance_m(v, k);
    else if (k == "d_rx_ris") c.mimo.d_rx_ris_m = as_distance_m(v, k);
    else if (k == "d_tx_rx") c.mimo.d_tx_rx_m = as_distance_m(v, k);
    else if (k == "f_c") {
      c.mimo.omega_rad_s = 2.0 * units::kPi * as_frequency_hz(v, k);
    }
  }
}

void apply_power_overrides(ExperimentConfig& c, const json& s) {
  reject_unknown(s, {"alpha", "beta", "p_n", "p_tx", "p_rx", "eta_exponent"},
                 "power_model");
  for (auto it = s.begin(); it != s.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "alpha") c.power.alpha = as_number(v, k);
    else if (k == "beta") c.power.beta = as_number(v, k);
    else if (k == "p_n") c.power.p_n_w = as_power_w(v, k);
    else if (k == "p_tx") c.power.p_tx_w = as_power_w(v, k);
    else if (k == "p_rx") c.power.p_rx_w = as_power_w(v, k);
    else if (k == "eta_exponent") c.power.eta_exponent = as_number(v, k);
  }
}

void apply_ao_overrides(ExperimentConfig& c, const json& s) {
  reject_unknown(s,
                 {"epsilon", "j_alt", "phase_iters", "sca_iters", "pgd_steps",
                  "optimize_ris"},
                 "ao");
  for (auto it = s.begin(); it != s.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "epsilon") c.ao.epsilon = as_number(v, k);
    else if (k == "j_alt") c.ao.j_alt = static_cast<int>(as_integer(v, k));
    else if (k == "phase_iters")
      c.ao.phase_iters = static_cast<int>(as_integer(v, k));
    else if (k == "sca_iters")
      c.ao.sca_iters = static_cast<int>(as_integer(v, k));
    else if (k == "pgd_steps")
      c.ao.pgd_steps = static_cast<int>(as_integer(v, k));
    else if (k == "optimize_ris") c.ao.optimize_ris = as_bool(v, k);
  }
}

std::vector<double> power_list(const json& arr, const std::string& key) {
  std::vector<double> out;
  for (const auto& v : as_array(arr, key)) out.push_back(as_power_w(v, key));
  return out;
}

std::vector<double> distance_list(const json& arr, const std::string& key) {
  std::vector<double> out;
  for (const auto& v : as_array(arr, key)) {
    out.push_back(as_distance_m(v, key));
  }
  return out;
}

std::vector<int> int_list(const json& arr, const std::string& key) {
  std::vector<int> out;
  for (const auto& v : as_array(arr, key)) {
    out.push_back(static_cast<int>(as_integer(v, key)));
  }
  return out;
}

void apply_sweep_overrides(ExperimentConfig& c, const json& s) {
  const std::string& id = c.id;
  if (id == "gamma-fit-table") {
    reject_unknown(s, {"entries"}, "sweep");
    if (s.contains("entries")) {
      c.gamma_entries.clear();
      for (const auto& e : as_array(s["entries"], "entries")) {
        reject_unknown(as_object(e, "entries[]"), {"n", "p_max", "p_t"},
                       "sweep.entries[]");
        GammaFitEntry g;
        g.n = static_cast<int>(as_integer(e.at("n"), "entries[].n"));
        g.p_max_w = as_power_w(e.at("p_max"), "entries[].p_max");
        g.p_t_w = as_power_w(e.at("p_t"), "entries[].p_t");
        c.gamma_entries.push_back(g);
      }
    }
  } else if (id == "ber-vs-pt") {
    reject_unknown(s, {"p_t", "setups", "symbols_per_trial"}, "sweep");
    if (s.contains("p_t")) c.p_t_w_values = power_list(s["p_t"], "p_t");
    if (s.contains("setups")) {
      c.ber_setups.clear();
      for (const auto& e : as_array(s["setups"], "setups")) {
        reject_unknown(as_object(e, "setups[]"), {"n", "p_max"},
                       "sweep.setups[]");
        BerSetup b;
        b.n = static_cast<int>(as_integer(e.at("n"), "setups[].n"));
        b.p_max_w = as_power_w(e.at("p_max"), "setups[].p_max");
        c.ber_setups.push_back(b);
      }
    }
    if (s.contains("symbols_per_trial")) {
      c.symbols_per_trial = as_integer(s["symbols_per_trial"],
                                       "symbols_per_trial");
    }
  } else if (id == "rate-vs-dh") {
    reject_unknown(s, {"d_h", "n"}, "sweep");
    if (s.contains("d_h")) c.d_h_m_values = distance_list(s["d_h"], "d_h");
    if (s.contains("n")) c.n_values = int_list(s["n"], "n");
  } else if (id == "rate-vs-n") {
    reject_unknown(s, {"n", "p_t", "p_max"}, "sweep");
    if (s.contains("n")) c.n_values = int_list(s["n"], "n");
    if (s.contains("p_t")) c.p_t_w_values = power_list(s["p_t"], "p_t");
    if (s.contains("p_max")) {
      c.p_max_w_values = power_list(s["p_max"], "p_max");
    }
  } else if (id == "ee-sweeps") {
    reject_unknown(s, {"axis", "n", "p_t", "p_max"}, "sweep");
    if (s.contains("axis")) {
      if (!s["axis"].is_string()) {
        throw ConfigError("'axis': expected \"n\", \"p_t\" or \"p_max\"");
      }
      c.ee_axis = s["axis"].get<std::string>();
    }
    if (s.contains("n")) c.n_values = int_list(s["n"], "n");
    if (s.contains("p_t")) c.p_t_w_values = power_list(s["p_t"], "p_t");
    if (s.contains("p_max")) {
      c.p_max_w_values = power_list(s["p_max"], "p_max");
    }
  } else if (id == "envelope-fig") {
    reject_unknown(s, {"grid"}, "sweep");
    if (s.contains("grid")) {
      c.phase_grid = static_cast<int>(as_integer(s["grid"], "grid"));
    }
  } else if (id == "rate-vs-rho") {
    reject_unknown(s, {"rho"}, "sweep");
    if (s.contains("rho")) {
      c.rho_db_values.clear();
      for (const auto& v : as_array(s["rho"], "rho")) {
        c.rho_db_values.push_back(as_db(v, "rho"));
      }
    }
  } else if (id == "rate-vs-distance") {
    reject_unknown(s, {"d_rx_ris", "rho"}, "sweep");
    if (s.contains("d_rx_ris")) {
      c.d_rx_ris_m_values = distance_list(s["d_rx_ris"], "d_rx_ris");
    }
    if (s.contains("rho")) c.fixed_rho_db = as_db(s["rho"], "rho");
  } else if (id == "rate-vs-pris") {
    reject_unknown(s, {"p_ris", "n_act_fractions"}, "sweep");
    if (s.contains("p_ris")) {
      c.p_ris_w_values = power_list(s["p_ris"], "p_ris");
    }
    if (s.contains("n_act_fractions")) {
      c.n_act_fractions.clear();
      for (const auto& v : as_array(s["n_act_fractions"], "n_act_fractions")) {
        c.n_act_fractions.push_back(as_number(v, "n_act_fractions"));
      }
    }
  }
}

ExperimentConfig resolve(const json& doc) {
  reject_unknown(as_object(doc, "top level"),
                 {"experiment", "trials", "seed", "output", "paper_scale",
                  "scenario", "power_model", "ao", "sweep"},
                 "the top level");
  if (!doc.contains("experiment")) {
    throw ConfigError("config is missing the required 'experiment' key");
  }
  if (!doc["experiment"].is_string()) {
    throw ConfigError("'experiment': expected a string id");
  }
  ExperimentConfig c = default_config(doc["experiment"].get<std::string>());
  if (doc.contains("paper_scale") && as_bool(doc["paper_scale"],
                                             "paper_scale")) {
    c.paper_scale = true;
    apply_paper_scale(c);
  }
  if (doc.contains("trials")) {
    c.trials = as_integer(doc["trials"], "trials");
  }
  if (doc.contains("seed")) {
    long s = as_integer(doc["seed"], "seed");
    if (s < 0) throw ConfigError("'seed': must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) {
      throw ConfigError("'output': expected a path string");
    }
    c.output_path = doc["output"].get<std::string>();
  }
  if (doc.contains("scenario")) {
    const json& sc = as_object(doc["scenario"], "scenario");
    reject_unknown(sc, {"siso", "mimo"}, "scenario");
    if (sc.contains("siso")) {
      apply_siso_overrides(c, as_object(sc["siso"], "scenario.siso"));
    }
    if (sc.contains("mimo")) {
      apply_mimo_overrides(c, as_object(sc["mimo"], "scenario.mimo"));
    }
  }
  if (doc.contains("power_model")) {
    apply_power_overrides(c, as_object(doc["power_model"], "power_model"));
  }
  if (doc.contains("ao")) {
    apply_ao_overrides(c, as_object(doc["ao"], "ao"));
  }
  if (doc.contains("sweep")) {
    apply_sweep_overrides(c, as_object(doc["sweep"], "sweep"));
  }
  c.validate();
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (std::find(experiment_ids().begin(), experiment_ids().end(), id) ==
      experiment_ids().end()) {
    throw ConfigError("unknown experiment '" + id + "'");
  }
  if (trials < 1) {
    throw ConfigError("trials must be >= 1, got " + std::to_string(trials));
  }
  if (siso.n_per_panel < 1) throw ConfigError("siso n must be >= 1");
  if (siso.p_t_w <= 0 || siso.p_max_w <= 0 || siso.g_max <= 0) {
    throw ConfigError("siso powers and gain cap must be positive");
  }
  if (siso.sigma2_tot_w <= 0 || siso.sigma2_rx_w <= 0) {
    throw ConfigError("siso noise powers must be positive");
  }
  if (is_mimo_id(id)) mimo.validate();
  if (id == "gamma-fit-table" && gamma_entries.empty()) {
    throw ConfigError("gamma-fit-table needs at least one sweep entry");
  }
  if (id == "ber-vs-pt" &&
      (ber_setups.empty() || p_t_w_values.empty() || symbols_per_trial < 1)) {
    throw ConfigError("ber-vs-pt needs setups, p_t values and >= 1 symbol");
  }
  if (id == "rate-vs-dh" && (d_h_m_values.empty() || n_values.empty())) {
    throw ConfigError("rate-vs-dh needs d_h and n values");
  }
  if (id == "rate-vs-n" && (n_values.empty() || p_t_w_values.empty() ||
                            p_max_w_values.empty())) {
    throw ConfigError("rate-vs-n needs n, p_t and p_max values");
  }
  if (id == "ee-sweeps") {
    if (ee_axis != "n" && ee_axis != "p_t" && ee_axis != "p_max") {
      throw ConfigError("ee-sweeps axis must be n, p_t or p_max");
    }
    if (n_values.empty() || p_t_w_values.empty() || p_max_w_values.empty()) {
      throw ConfigError("ee-sweeps needs n, p_t and p_max values");
    }
  }
  if (id == "envelope-fig" && phase_grid < 64) {
    throw ConfigError("envelope-fig grid must be >= 64");
  }
  if (id == "rate-vs-rho" && rho_db_values.empty()) {
    throw ConfigError("rate-vs-rho needs rho values");
  }
  if (id == "rate-vs-distance" && d_rx_ris_m_values.empty()) {
    throw ConfigError("rate-vs-distance needs d_rx_ris values");
  }
  if (id == "rate-vs-pris") {
    if (p_ris_w_values.empty() || n_act_fractions.empty()) {
      throw ConfigError("rate-vs-pris needs p_ris and n_act_fractions");
    }
    for (double f : n_act_fractions) {
      if (f < 0.0 || f > 1.0) {
        throw ConfigError("n_act_fractions entries must lie in [0, 1]");
      }
    }
  }
}

ExperimentConfig load_config_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  return resolve(doc);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_config_text(ss.str());
}

}  // namespace arisim::config
