#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "arisim/channel.hpp"
#include "arisim/rng.hpp"
#include "arisim/units.hpp"

// Single-amplifier dual-panel SISO link: optimal phase configuration, gain
// selection under the amplifier output-power cap, SNR/rate, symbol-level
// simulation, and the passive single-surface baseline.
namespace arisim::siso {

struct SisoScenario {
  channel::InhGeometry geometry{};  // d_v=5, d_h=5, d=50 m
  double f_c_ghz = 28.0;
  double bw_hz = 180e3;
  double p_t_w = 1.0;                 // 30 dBm
  double p_max_w = 1.0;               // amplifier max output, 30 dBm
  double g_max = 1000.0;              // amplifier max gain, 30 dB
  double noise_figure = 3.1622776601683795;  // F, 5 dB
  double k1 = 5.0;                    // Rician factor, Tx -> panel 1
  double k2 = 5.0;                    // Rician factor, panel 2 -> Rx
  int n_per_panel = 128;
  double sigma2_tot_w = 1e-13;        // PA input noise, -100 dBm
  double sigma2_rx_w = 1e-13;         // receiver noise, -100 dBm
  channel::LinkState state_h = channel::LinkState::automatic;
  channel::LinkState state_g = channel::LinkState::automatic;

  // Fair-comparison element count for the passive baseline: the amplifier
  // design splits its budget over two panels of n_per_panel each.
  int n_passive() const { return 2 * n_per_panel; }
};

// Conjugate phase configuration e^{-j*angle(c_i)}. Zero entries get phase
// factor 1; their count is reported through zero_entries when non-null so
// callers can surface a diagnostic.
Eigen::VectorXcd optimal_phases(const Eigen::VectorXcd& chan,
                                int* zero_entries = nullptr);

// Power entering the amplifier from the configured first panel:
// P_t * |phi^T h|^2 (noise excluded by convention).
double pa_input_power(double p_t_w, const Eigen::VectorXcd& h,
                      const Eigen::VectorXcd& phi);

// Largest admissible gain: min(g_max, p_max/p_in). Unbounded input headroom
// (p_in = 0) yields g_max.
double optimal_gain(double p_in_w, double p_max_w, double g_max);

// Amplified-link SNR for arbitrary phase configurations and gain.
double snr_active(const Eigen::VectorXcd& h, const Eigen::VectorXcd& g,
                  const Eigen::VectorXcd& phi, const Eigen::VectorXcd& theta,
                  double gain, const SisoScenario& sc);

double rate_active(double snr);  // log2(1 + snr)

// Passive single-surface baseline over h.size() elements:
// P_t * (sum_i |h_i g_i|)^2 / sigma2_rx (optimal per-element phase alignment).
double snr_passive_baseline(const Eigen::VectorXcd& h,
                            const Eigen::VectorXcd& g, double p_t_w,
                            double sigma2_rx_w);

struct SisoDraw {
  Eigen::VectorXcd h;  // Tx -> panel 1, length n_per_panel
  Eigen::VectorXcd g;  // panel 2 -> Rx, length n_per_panel
};

SisoDraw sample_links(const SisoScenario& sc, RngStream& rng);

// Optimally configured operating point for one channel realization.
struct OperatingPoint {
  double snr;
  double gain;      // selected gain
  double p_in_w;    // amplifier input power
  double p_out_w;   // gain * p_in, never exceeds p_max (+roundoff)
};

OperatingPoint operating_point(const Eigen::VectorXcd& h,
                               const Eigen::VectorXcd& g,
                               const SisoScenario& sc);

// Same phases but a fixed gain regardless of the output cap (reference
// curves showing where the cap binds).
double snr_with_fixed_gain(const Eigen::VectorXcd& h,
                           const Eigen::VectorXcd& g, double gain,
                           const SisoScenario& sc);

struct SymbolCounts {
  std::int64_t symbols = 0;
  std::int64_t errors = 0;
};

// Coherent BPSK over the amplified link for one channel realization:
// y = sqrt(G*P_t/N)(phi^T h)(theta^T g) s
//   + sqrt(G*F/N)(theta^T g) n_tot + n_rx,
// detected by the sign of the phase-aligned real part.
SymbolCounts simulate_received_symbols(const Eigen::VectorXcd& h,
                                       const Eigen::VectorXcd& g,
                                       const SisoScenario& sc,
                                       std::int64_t n_symbols, RngStream& rng);

}  // namespace arisim::siso
