#pragma once

#include <Eigen/Dense>

#include "arisim/rng.hpp"
#include "arisim/units.hpp"

// Active-RIS-aided point-to-point MIMO link: channel sampling, the effective
// channel with the reflection vector, and the spectral-efficiency /
// LMMSE-combiner expressions that the optimizers maximize.
namespace arisim::mimo {

struct MimoScenario {
  int m_t = 8;  // transmit antennas
  int m_r = 8;  // receive antennas
  int d = 8;    // data streams
  int n = 64;   // RIS elements
  int n_act = 64;  // leading elements are active, the rest passive

  double sigma2_w = 4.04575891697442e-15;   // -113.93 dBm
  double f_r = 5.011872336272722;           // receive noise figure, 7 dB
  double f_s = 1.5848931924611136;          // RIS noise figure, 2 dB
  double p_t_w = 5.30884444230988e-5;       // transmit budget, -12.75 dBm
  double p_ris_w = 2.3;                     // RIS power budget

  double d_ris_tx_m = 40.0;
  double d_rx_ris_m = 4.0;
  double d_tx_rx_m = 40.2;
  double eta_direct = 5.0;  // blocked direct link
  double eta_ris = 2.0;
  double omega_rad_s = 2.0 * units::kPi * 2.4e9;

  double wavelength_m() const {
    return 2.0 * units::kPi * units::kSpeedOfLight / omega_rad_s;
  }
  // Throws ConfigError when stream counts, element split, budgets, noise
  // powers, or distances are out of range.
  void validate() const;
};

struct MimoChannels {
  Eigen::MatrixXcd h_d;  // M_R x M_T direct link
  Eigen::MatrixXcd h1;   // N x M_T, Tx to RIS
  Eigen::MatrixXcd h2;   // M_R x N, RIS to Rx
};

// Free-space-referenced per-link power path loss: (lambda^2/(4*pi)) * d^-eta.
// The cascaded product of the two RIS links with eta = 2 reproduces
// lambda^4/(16*pi^2) * (d1*d2)^-2.
double pathloss_link(double wavelength_m, double distance_m, double exponent);

// Rayleigh links scaled by the root path loss; for one stream the draw order
// is h_d, h1, h2, each filled column-major.
MimoChannels sample_mimo_channels(const MimoScenario& sc, RngStream& rng);

// H_d + H2 * diag(gamma) * H1. Throws ConfigError on dimension mismatch.
Eigen::MatrixXcd effective_channel(const MimoChannels& ch,
                                   const Eigen::VectorXcd& gamma);

// Sum-rate of linear transceiving with an explicit combiner:
// sum_i log2(1 + |w_i^H Ht v_i|^2 / (sum_{j != i} |w_i^H Ht v_j|^2
//   + sigma2*F_s*||w_i^H H2 diag(gamma)||^2 + sigma2*F_r*||w_i||^2)).
double rate_with_combiner(const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& w,
                          const Eigen::VectorXcd& gamma,
                          const MimoChannels& ch, double sigma2, double f_r,
                          double f_s);

// (Ht V V^H Ht^H + sigma2*F_s*H2 Gam Gam^H H2^H + sigma2*F_r*I)^{-1} Ht V.
// A diagonal lift of 1e-12*trace/M_R is applied only when the covariance
// condition estimate exceeds 1e12; `regularized`, when given, reports it.
Eigen::MatrixXcd lmmse_combiner(const Eigen::MatrixXcd& v,
                                const Eigen::VectorXcd& gamma,
                                const MimoChannels& ch, double sigma2,
                                double f_r, double f_s,
                                bool* regularized = nullptr);

// Sum-rate under the optimal linear combiner:
// sum_i log2(1 + v_i^H Ht^H B_i^{-1} Ht v_i) with B_i the interference-plus-
// noise covariance of stream i.
double rate_lmmse(const Eigen::MatrixXcd& v, const Eigen::VectorXcd& gamma,
                  const MimoChannels& ch, double sigma2, double f_r,
                  double f_s);

// Normalized SNR of the cascaded RIS link:
// P_T * [lambda^4/(16*pi^2) * (d1*d2)^-2] / (sigma2 * F_r).
double rho(double p_t_w, double wavelength_m, double d_ris_tx_m,
           double d_rx_ris_m, double sigma2_w, double f_r);

// Transmit power realizing a requested normalized SNR (inverse of `rho`).
double p_t_for_rho(double rho_linear, double wavelength_m, double d_ris_tx_m,
                   double d_rx_ris_m, double sigma2_w, double f_r);

}  // namespace arisim::mimo
