#pragma once

// Consumed-power model of the amplifier-assisted and passive reflector
// systems, and the bits-per-joule energy efficiency metric.
namespace arisim::power {

struct PowerModelParams {
  double alpha = 1.2;        // transmit-PA inefficiency multiplier (1/w_max)
  double beta = 1.2;         // inter-panel PA inefficiency multiplier (1/eta_max)
  double p_n_w = 7.8e-3;     // per-element phase-control power P_n(b)
  double p_tx_w = 7.943282347242816;  // static Tx dissipation (9 dBW)
  double p_rx_w = 0.01;               // static Rx dissipation (10 dBm)
  double eta_exponent = 0.5;          // PA efficiency curve exponent
};

// Inter-panel PA consumption: beta * p_out^(1-eps) * p_max^eps. At the
// default eps = 0.5 this is the closed form beta*sqrt(p_out*p_max).
// p_out = 0 consumes nothing.
double pa_consumed_power(double p_out_w, double p_max_w, double beta,
                         double eta_exponent = 0.5);

// Static phase-control power of n elements: n * p_n_w.
double ris_static_power(int n, double p_n_w);

// alpha*P_t + P_Tx + P_Rx + N*P_n + PA term.
double total_power_active(double p_t_w, int n, double p_out_w, double p_max_w,
                          const PowerModelParams& params = {});

// Same without the inter-panel PA term.
double total_power_passive(double p_t_w, int n,
                           const PowerModelParams& params = {});

// rate [bits/s/Hz] * bandwidth [Hz] / total power [W] -> bits per joule.
double energy_efficiency(double rate_bits_s_hz, double bw_hz, double p_tot_w);

}  // namespace arisim::power
