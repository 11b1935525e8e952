#include "arisim/mimo.hpp"

#include <cmath>
#include <string>

#include "arisim/errors.hpp"

namespace arisim::mimo {

namespace {

// Hermitian solve with the conditional diagonal lift shared by the combiner
// and the per-stream SINR expressions.
Eigen::MatrixXcd hermitian_solve(Eigen::MatrixXcd cov,
                                 const Eigen::MatrixXcd& rhs,
                                 bool* regularized) {
  Eigen::Index m = cov.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov,
                                                     Eigen::EigenvaluesOnly);
  double lam_max = es.eigenvalues().maxCoeff();
  double lam_min = es.eigenvalues().minCoeff();
  bool lift = !(lam_min > 0.0) || lam_max > 1e12 * lam_min;
  if (lift) {
    double shift = 1e-12 * cov.real().trace() / static_cast<double>(m);
    cov += shift * Eigen::MatrixXcd::Identity(m, m);
  }
  if (regularized) *regularized = lift;
  return cov.ldlt().solve(rhs);
}

Eigen::MatrixXcd scaled_ris_column_matrix(const MimoChannels& ch,
                                          const Eigen::VectorXcd& gamma) {
  // H2 * diag(gamma): column n scaled by gamma_n.
  return ch.h2 * gamma.asDiagonal();
}

void fill_rayleigh(Eigen::MatrixXcd& m, double scale, RngStream& rng) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      m(r, c) = scale * rng.cgauss();
    }
  }
}

}  // namespace

void MimoScenario::validate() const {
  if (m_t < 1 || m_r < 1 || d < 1) {
    throw ConfigError("MimoScenario: antenna and stream counts must be >= 1");
  }
  if (d > std::min(m_t, m_r)) {
    throw ConfigError("MimoScenario: streams d=" + std::to_string(d) +
                      " exceed min(M_T, M_R)");
  }
  if (n < 1 || n_act < 0 || n_act > n) {
    throw ConfigError("MimoScenario: need 0 <= N_act <= N with N >= 1");
  }
  if (!(p_t_w > 0.0) || !(p_ris_w > 0.0)) {
    throw ConfigError("MimoScenario: power budgets must be positive");
  }
  if (!(sigma2_w > 0.0) || !(f_r > 0.0) || !(f_s > 0.0)) {
    throw ConfigError("MimoScenario: noise parameters must be positive");
  }
  if (!(d_ris_tx_m > 0.0) || !(d_rx_ris_m > 0.0) || !(d_tx_rx_m > 0.0)) {
    throw ConfigError("MimoScenario: distances must be positive");
  }
  if (!(omega_rad_s > 0.0)) {
    throw ConfigError("MimoScenario: carrier frequency must be positive");
  }
}

double pathloss_link(double wavelength_m, double distance_m, double exponent) {
  if (!(wavelength_m > 0.0) || !(distance_m > 0.0)) {
    throw ConfigError("pathloss_link: wavelength and distance must be > 0");
  }
  return wavelength_m * wavelength_m / (4.0 * units::kPi) *
         std::pow(distance_m, -exponent);
}

MimoChannels sample_mimo_channels(const MimoScenario& sc, RngStream& rng) {
  sc.validate();
  double lam = sc.wavelength_m();
  double s_d = std::sqrt(pathloss_link(lam, sc.d_tx_rx_m, sc.eta_direct));
  double s_1 = std::sqrt(pathloss_link(lam, sc.d_ris_tx_m, sc.eta_ris));
  double s_2 = std::sqrt(pathloss_link(lam, sc.d_rx_ris_m, sc.eta_ris));

  MimoChannels ch;
  ch.h_d.resize(sc.m_r, sc.m_t);
  ch.h1.resize(sc.n, sc.m_t);
  ch.h2.resize(sc.m_r, sc.n);
  fill_rayleigh(ch.h_d, s_d, rng);
  fill_rayleigh(ch.h1, s_1, rng);
  fill_rayleigh(ch.h2, s_2, rng);
  return ch;
}

Eigen::MatrixXcd effective_channel(const MimoChannels& ch,
                                   const Eigen::VectorXcd& gamma) {
  if (ch.h1.rows() != gamma.size() || ch.h2.cols() != gamma.size()) {
    throw ConfigError("effective_channel: reflection vector length " +
                      std::to_string(gamma.size()) +
                      " does not match RIS channel dimensions");
  }
  if (ch.h_d.rows() != ch.h2.rows() || ch.h_d.cols() != ch.h1.cols()) {
    throw ConfigError("effective_channel: direct/RIS channel shape mismatch");
  }
  return ch.h_d + ch.h2 * gamma.asDiagonal() * ch.h1;
}

double rate_with_combiner(const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& w,
                          const Eigen::VectorXcd& gamma,
                          const MimoChannels& ch, double sigma2, double f_r,
                          double f_s) {
  if (v.cols() != w.cols()) {
    throw ConfigError("rate_with_combiner: precoder/combiner stream mismatch");
  }
  Eigen::MatrixXcd ht = effective_channel(ch, gamma);
  Eigen::MatrixXcd a = ht * v;                              // M_R x d
  Eigen::MatrixXcd g = scaled_ris_column_matrix(ch, gamma); // M_R x N
  double rate = 0.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    Eigen::VectorXcd wi = w.col(i);
    Eigen::RowVectorXcd cross = wi.adjoint() * a;  // 1 x d
    double signal = std::norm(cross(i));
    double interference = cross.squaredNorm() - signal;
    double ris_noise = sigma2 * f_s * (wi.adjoint() * g).squaredNorm();
    double rx_noise = sigma2 * f_r * wi.squaredNorm();
    double denom = interference + ris_noise + rx_noise;
    if (denom <= 0.0) {
      // All-zero combiner row contributes nothing.
      continue;
    }
    rate += std::log2(1.0 + signal / denom);
  }
  return rate;
}

Eigen::MatrixXcd lmmse_combiner(const Eigen::MatrixXcd& v,
                                const Eigen::VectorXcd& gamma,
                                const MimoChannels& ch, double sigma2,
                                double f_r, double f_s, bool* regularized) {
  Eigen::MatrixXcd ht = effective_channel(ch, gamma);
  Eigen::MatrixXcd a = ht * v;
  Eigen::MatrixXcd g = scaled_ris_column_matrix(ch, gamma);
  Eigen::Index m_r = ht.rows();
  Eigen::MatrixXcd cov =
      a * a.adjoint() + sigma2 * f_s * (g * g.adjoint()) +
      sigma2 * f_r * Eigen::MatrixXcd::Identity(m_r, m_r);
  return hermitian_solve(std::move(cov), a, regularized);
}

double rate_lmmse(const Eigen::MatrixXcd& v, const Eigen::VectorXcd& gamma,
                  const MimoChannels& ch, double sigma2, double f_r,
                  double f_s) {
  Eigen::MatrixXcd ht = effective_channel(ch, gamma);
  Eigen::MatrixXcd a = ht * v;
  Eigen::MatrixXcd g = scaled_ris_column_matrix(ch, gamma);
  Eigen::Index m_r = ht.rows();
  Eigen::MatrixXcd noise_cov =
      sigma2 * f_s * (g * g.adjoint()) +
      sigma2 * f_r * Eigen::MatrixXcd::Identity(m_r, m_r);
  Eigen::MatrixXcd full = a * a.adjoint() + noise_cov;
  double rate = 0.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    Eigen::MatrixXcd b_i = full - a.col(i) * a.col(i).adjoint();
    Eigen::VectorXcd x = hermitian_solve(std::move(b_i), a.col(i), nullptr);
    double sinr = std::max(0.0, std::real(a.col(i).dot(x)));
    rate += std::log2(1.0 + sinr);
  }
  return rate;
}

double rho(double p_t_w, double wavelength_m, double d_ris_tx_m,
           double d_rx_ris_m, double sigma2_w, double f_r) {
  double pl = pathloss_link(wavelength_m, d_ris_tx_m, 2.0) *
              pathloss_link(wavelength_m, d_rx_ris_m, 2.0);
  return p_t_w * pl / (sigma2_w * f_r);
}

double p_t_for_rho(double rho_linear, double wavelength_m, double d_ris_tx_m,
                   double d_rx_ris_m, double sigma2_w, double f_r) {
  double pl = pathloss_link(wavelength_m, d_ris_tx_m, 2.0) *
              pathloss_link(wavelength_m, d_rx_ris_m, 2.0);
  return rho_linear * sigma2_w * f_r / pl;
}

}  // namespace arisim::mimo
