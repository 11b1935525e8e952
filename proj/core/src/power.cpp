#include "arisim/power.hpp"

#include <cmath>

#include "arisim/errors.hpp"

namespace arisim::power {

double pa_consumed_power(double p_out_w, double p_max_w, double beta,
                         double eta_exponent) {
  if (p_out_w < 0.0 || p_max_w <= 0.0) {
    throw ConfigError("pa_consumed_power: powers must be non-negative");
  }
  if (p_out_w == 0.0) return 0.0;
  return beta * std::pow(p_out_w, 1.0 - eta_exponent) *
         std::pow(p_max_w, eta_exponent);
}

double ris_static_power(int n, double p_n_w) {
  if (n < 0) throw ConfigError("ris_static_power: negative element count");
  return n * p_n_w;
}

double total_power_active(double p_t_w, int n, double p_out_w, double p_max_w,
                          const PowerModelParams& params) {
  return params.alpha * p_t_w + params.p_tx_w + params.p_rx_w +
         ris_static_power(n, params.p_n_w) +
         pa_consumed_power(p_out_w, p_max_w, params.beta, params.eta_exponent);
}

double total_power_passive(double p_t_w, int n,
                           const PowerModelParams& params) {
  return params.alpha * p_t_w + params.p_tx_w + params.p_rx_w +
         ris_static_power(n, params.p_n_w);
}

double energy_efficiency(double rate_bits_s_hz, double bw_hz, double p_tot_w) {
  if (p_tot_w <= 0.0) throw ConfigError("energy_efficiency: power must be > 0");
  return rate_bits_s_hz * bw_hz / p_tot_w;
}

}  // namespace arisim::power
