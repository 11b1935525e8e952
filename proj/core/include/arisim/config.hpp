#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arisim/ao.hpp"
#include "arisim/mimo.hpp"
#include "arisim/power.hpp"
#include "arisim/siso.hpp"

// Experiment configuration: JSON files with mandatory unit suffixes on every
// dimensioned quantity, resolved against per-experiment defaults.
namespace arisim::config {

// One row of the SNR-distribution fit sweep.
struct GammaFitEntry {
  int n = 0;
  double p_max_w = 0.0;
  double p_t_w = 0.0;
};

// One curve of the error-rate sweep.
struct BerSetup {
  int n = 0;
  double p_max_w = 0.0;
};

struct ExperimentConfig {
  std::string id;
  long trials = 0;  // resolved to a per-experiment default when 0
  std::uint64_t seed = 1;
  std::string output_path;  // empty: CLI chooses
  bool paper_scale = false;

  siso::SisoScenario siso{};
  mimo::MimoScenario mimo{};
  power::PowerModelParams power{};
  ao::AOOptions ao{};

  // Sweep axes, already converted to SI/linear units where dimensioned.
  std::vector<GammaFitEntry> gamma_entries;       // gamma-fit-table
  std::vector<BerSetup> ber_setups;               // ber-vs-pt
  std::vector<double> p_t_w_values;               // ber-vs-pt, rate-vs-n, ee
  std::vector<double> p_max_w_values;             // rate-vs-n, ee-sweeps
  long symbols_per_trial = 10000;                 // ber-vs-pt
  std::vector<double> d_h_m_values;               // rate-vs-dh
  std::vector<int> n_values;                      // rate-vs-dh, rate-vs-n, ee
  std::string ee_axis = "n";                      // ee-sweeps: n | p_t | p_max
  int phase_grid = 1024;                          // envelope-fig
  std::vector<double> rho_db_values;              // rate-vs-rho
  std::vector<double> d_rx_ris_m_values;          // rate-vs-distance
  double fixed_rho_db = -30.0;                    // rate-vs-distance
  std::vector<double> p_ris_w_values;             // rate-vs-pris
  std::vector<double> n_act_fractions;            // rate-vs-pris

  // Throws ConfigError when the id is unregistered or a resolved sweep is
  // degenerate (empty axis, trials < 1, fractions outside [0, 1], ...).
  void validate() const;
};

// Registered experiment names, sorted.
const std::vector<std::string>& experiment_ids();

// Fully-resolved defaults for one experiment (§scale: desk unless
// paper_scale is set later by the file/CLI).
ExperimentConfig default_config(const std::string& id);

// Parse a JSON file and resolve it over the defaults of its "experiment"
// entry. Unknown keys anywhere are rejected; dimensioned values must be
// strings with a unit suffix ("30 dBm", "5 m", "28 GHz", "2 dB").
ExperimentConfig load_config(const std::string& path);

// Same, from an in-memory JSON document (tests).
ExperimentConfig load_config_text(const std::string& json_text);

// Quantity parsing helpers (exposed for tests).
double parse_power_w(const std::string& text);      // dBm | dBW | W | mW | uW
double parse_distance_m(const std::string& text);   // m | km | cm
double parse_frequency_hz(const std::string& text); // Hz | kHz | MHz | GHz
double parse_ratio_linear(const std::string& text); // dB | linear ("x2.5")
double parse_db(const std::string& text);           // dB only

}  // namespace arisim::config
