#include "arisim/siso.hpp"

#include <cmath>
#include <complex>

#include "arisim/errors.hpp"

namespace arisim::siso {

Eigen::VectorXcd optimal_phases(const Eigen::VectorXcd& chan,
                                int* zero_entries) {
  Eigen::VectorXcd phi(chan.size());
  int zeros = 0;
  for (Eigen::Index i = 0; i < chan.size(); ++i) {
    double mag = std::abs(chan[i]);
    if (mag == 0.0) {
      phi[i] = 1.0;
      ++zeros;
    } else {
      phi[i] = std::conj(chan[i]) / mag;
    }
  }
  if (zero_entries) *zero_entries = zeros;
  return phi;
}

double pa_input_power(double p_t_w, const Eigen::VectorXcd& h,
                      const Eigen::VectorXcd& phi) {
  if (h.size() != phi.size()) {
    throw ConfigError("pa_input_power: dimension mismatch");
  }
  std::complex<double> combined = (phi.array() * h.array()).sum();
  return p_t_w * std::norm(combined);
}

double optimal_gain(double p_in_w, double p_max_w, double g_max) {
  if (p_in_w < 0.0 || p_max_w <= 0.0 || g_max <= 0.0) {
    throw ConfigError("optimal_gain: invalid power or gain bound");
  }
  if (p_in_w == 0.0) return g_max;
  return std::min(g_max, p_max_w / p_in_w);
}

double snr_active(const Eigen::VectorXcd& h, const Eigen::VectorXcd& g,
                  const Eigen::VectorXcd& phi, const Eigen::VectorXcd& theta,
                  double gain, const SisoScenario& sc) {
  double n = static_cast<double>(h.size());
  std::complex<double> ch = (phi.array() * h.array()).sum();
  std::complex<double> cg = (theta.array() * g.array()).sum();
  double sig = sc.p_t_w * (gain / n) * std::norm(ch) * std::norm(cg);
  double amp_noise =
      (gain * sc.noise_figure / n) * std::norm(cg) * sc.sigma2_tot_w;
  return sig / (amp_noise + sc.sigma2_rx_w);
}

double rate_active(double snr) { return std::log2(1.0 + snr); }

double snr_passive_baseline(const Eigen::VectorXcd& h,
                            const Eigen::VectorXcd& g, double p_t_w,
                            double sigma2_rx_w) {
  if (h.size() != g.size()) {
    throw ConfigError("snr_passive_baseline: dimension mismatch");
  }
  double combined = (h.array().abs() * g.array().abs()).sum();
  return p_t_w * combined * combined / sigma2_rx_w;
}

SisoDraw sample_links(const SisoScenario& sc, RngStream& rng) {
  auto dist = channel::link_distances(sc.geometry);
  channel::LinkSpec link_h{dist.d1_m, sc.k1, sc.state_h};
  channel::LinkSpec link_g{dist.d2_m, sc.k2, sc.state_g};
  return {channel::sample_channel(link_h, sc.f_c_ghz, sc.n_per_panel, rng),
          channel::sample_channel(link_g, sc.f_c_ghz, sc.n_per_panel, rng)};
}

OperatingPoint operating_point(const Eigen::VectorXcd& h,
                               const Eigen::VectorXcd& g,
                               const SisoScenario& sc) {
  Eigen::VectorXcd phi = optimal_phases(h);
  Eigen::VectorXcd theta = optimal_phases(g);
  double p_in = pa_input_power(sc.p_t_w, h, phi);
  double gain = optimal_gain(p_in, sc.p_max_w, sc.g_max);
  OperatingPoint op;
  op.p_in_w = p_in;
  op.gain = gain;
  op.p_out_w = gain * p_in;
  op.snr = snr_active(h, g, phi, theta, gain, sc);
  return op;
}

double snr_with_fixed_gain(const Eigen::VectorXcd& h,
                           const Eigen::VectorXcd& g, double gain,
                           const SisoScenario& sc) {
  Eigen::VectorXcd phi = optimal_phases(h);
  Eigen::VectorXcd theta = optimal_phases(g);
  return snr_active(h, g, phi, theta, gain, sc);
}

SymbolCounts simulate_received_symbols(const Eigen::VectorXcd& h,
                                       const Eigen::VectorXcd& g,
                                       const SisoScenario& sc,
                                       std::int64_t n_symbols,
                                       RngStream& rng) {
  if (n_symbols <= 0) {
    throw ConfigError("simulate_received_symbols: need n_symbols >= 1");
  }
  Eigen::VectorXcd phi = optimal_phases(h);
  Eigen::VectorXcd theta = optimal_phases(g);
  double p_in = pa_input_power(sc.p_t_w, h, phi);
  double gain = optimal_gain(p_in, sc.p_max_w, sc.g_max);

  double n = static_cast<double>(h.size());
  std::complex<double> ch = (phi.array() * h.array()).sum();
  std::complex<double> cg = (theta.array() * g.array()).sum();
  std::complex<double> a = std::sqrt(gain * sc.p_t_w / n) * ch * cg;
  double b = std::sqrt(gain * sc.noise_figure / n);
  double amp_noise_std = std::sqrt(sc.sigma2_tot_w);
  double rx_noise_std = std::sqrt(sc.sigma2_rx_w);

  SymbolCounts counts;
  counts.symbols = n_symbols;
  for (std::int64_t i = 0; i < n_symbols; ++i) {
    double s = rng.uniform() < 0.5 ? -1.0 : 1.0;
    std::complex<double> y = a * s +
                             b * cg * (amp_noise_std * rng.cgauss()) +
                             rx_noise_std * rng.cgauss();
    double metric = std::real(std::conj(a) * y);
    double detected = metric >= 0.0 ? 1.0 : -1.0;
    if (detected != s) ++counts.errors;
  }
  return counts;
}

}  // namespace arisim::siso
