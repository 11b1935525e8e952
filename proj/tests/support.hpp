#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "arisim/mimo.hpp"
#include "arisim/rng.hpp"

// Shared helpers for the test suites: independent numerical oracles
// (quadrature, water-filling, naive rate evaluation) and scenario factories.
namespace testkit {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

// Composite Simpson rule on [a, b] with n subintervals (n even).
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n) {
  if (n % 2) ++n;
  double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) {
    s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

// Water-filling capacity oracle: maximize sum log2(1 + g_i p_i) subject to
// sum p_i <= budget, p_i >= 0, by bisection on the waterline.
inline double waterfill_capacity(std::vector<double> gains, double budget) {
  gains.erase(std::remove_if(gains.begin(), gains.end(),
                             [](double g) { return g <= 0.0; }),
              gains.end());
  if (gains.empty() || budget <= 0.0) return 0.0;
  auto spent = [&](double mu) {
    double s = 0.0;
    for (double g : gains) s += std::max(0.0, mu - 1.0 / g);
    return s;
  };
  double lo = 0.0, hi = budget + 1.0;
  for (double g : gains) hi = std::max(hi, 1.0 / g + budget);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (spent(mid) > budget ? hi : lo) = mid;
  }
  double mu = 0.5 * (lo + hi);
  double cap = 0.0;
  for (double g : gains) {
    double p = std::max(0.0, mu - 1.0 / g);
    cap += std::log2(1.0 + g * p);
  }
  return cap;
}

// Naive per-stream sum-rate with an explicit combiner, written as scalar
// loops (independent of the production Eigen expressions).
inline double naive_rate_with_combiner(
    const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& w,
    const Eigen::VectorXcd& gamma, const arisim::mimo::MimoChannels& ch,
    double sigma2, double f_r, double f_s) {
  using cd = std::complex<double>;
  Eigen::Index mr = ch.h_d.rows(), mt = ch.h_d.cols(), n = ch.h1.rows();
  Eigen::Index d = v.cols();
  // effective channel, entry by entry
  Eigen::MatrixXcd ht(mr, mt);
  for (Eigen::Index r = 0; r < mr; ++r) {
    for (Eigen::Index c = 0; c < mt; ++c) {
      cd acc = ch.h_d(r, c);
      for (Eigen::Index k = 0; k < n; ++k) {
        acc += ch.h2(r, k) * gamma[k] * ch.h1(k, c);
      }
      ht(r, c) = acc;
    }
  }
  double rate = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    cd sig = 0.0;
    for (Eigen::Index r = 0; r < mr; ++r) {
      cd hv = 0.0;
      for (Eigen::Index c = 0; c < mt; ++c) hv += ht(r, c) * v(c, i);
      sig += std::conj(w(r, i)) * hv;
    }
    double interf = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == i) continue;
      cd x = 0.0;
      for (Eigen::Index r = 0; r < mr; ++r) {
        cd hv = 0.0;
        for (Eigen::Index c = 0; c < mt; ++c) hv += ht(r, c) * v(c, j);
        x += std::conj(w(r, i)) * hv;
      }
      interf += std::norm(x);
    }
    double ris_noise = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      cd x = 0.0;
      for (Eigen::Index r = 0; r < mr; ++r) {
        x += std::conj(w(r, i)) * ch.h2(r, k);
      }
      ris_noise += std::norm(x * gamma[k]);
    }
    double wnorm = 0.0;
    for (Eigen::Index r = 0; r < mr; ++r) wnorm += std::norm(w(r, i));
    double den = interf + sigma2 * f_s * ris_noise + sigma2 * f_r * wnorm;
    rate += std::log2(1.0 + std::norm(sig) / den);
  }
  return rate;
}

// Small MIMO scenario used throughout the optimizer tests.
inline arisim::mimo::MimoScenario desk_scenario(int n, int n_act, int m = 4,
                                                int d = 4) {
  arisim::mimo::MimoScenario sc;
  sc.m_t = m;
  sc.m_r = m;
  sc.d = d;
  sc.n = n;
  sc.n_act = n_act;
  return sc;
}

inline Eigen::MatrixXcd random_matrix(Eigen::Index r, Eigen::Index c,
                                      arisim::RngStream& rng) {
  Eigen::MatrixXcd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.cgauss();
  }
  return m;
}

// Precoder with trace exactly equal to the budget.
inline Eigen::MatrixXcd random_precoder(Eigen::Index mt, Eigen::Index d,
                                        double p_t_w, arisim::RngStream& rng) {
  Eigen::MatrixXcd v = random_matrix(mt, d, rng);
  v *= std::sqrt(p_t_w / v.squaredNorm());
  return v;
}

}  // namespace testkit
