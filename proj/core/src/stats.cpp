#include "arisim/stats.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

#include "arisim/errors.hpp"
#include "arisim/units.hpp"

namespace arisim::stats {

GammaFit fit_gamma_moments(std::span<const double> samples) {
  if (samples.size() < 2) {
    throw SolverError("fit_gamma_moments: need at least 2 samples");
  }
  double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= n;
  if (!(mean > 0.0) || !(var > 0.0)) {
    throw SolverError("fit_gamma_moments: degenerate sample moments (mean=" +
                      std::to_string(mean) + ", var=" + std::to_string(var) +
                      ")");
  }
  return {mean * mean / var, var / mean};
}

double gamma_pdf(double x, double shape, double scale) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    if (shape > 1.0) return 0.0;
    if (shape == 1.0) return 1.0 / scale;
    return std::numeric_limits<double>::infinity();
  }
  double log_pdf = (shape - 1.0) * std::log(x) - x / scale -
                   shape * std::log(scale) - std::lgamma(shape);
  return std::exp(log_pdf);
}

double gamma_mgf(double s, double shape, double scale) {
  if (s >= 1.0 / scale) {
    throw std::domain_error("gamma_mgf: s must be below 1/scale");
  }
  return std::pow(1.0 - scale * s, -shape);
}

double sep_mpsk(double shape, double scale, int m_ary) {
  if (m_ary < 2) throw SolverError("sep_mpsk: modulation order must be >= 2");
  double g = std::sin(units::kPi / m_ary);
  double g2 = g * g;
  auto integrand = [&](double x) {
    double s2 = std::sin(x) * std::sin(x);
    // mgf at a strictly negative argument; always in-domain.
    return std::pow(1.0 + scale * g2 / s2, -shape);
  };
  // The integrand is bounded by 1 and smooth away from 0; the clamp keeps
  // sin(x) away from the removable 0/0 at x -> 0 (integrand -> 0 there).
  double lo = 1e-12;
  double hi = (m_ary - 1) * units::kPi / m_ary;
  double err = 0.0;
  double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, lo, hi, 15, 1e-10, &err);
  return val / units::kPi;
}

double bep_from_sep(double sep, int m_ary) {
  if (m_ary < 2) throw SolverError("bep_from_sep: modulation order >= 2");
  return sep / std::log2(static_cast<double>(m_ary));
}

double bep_bpsk(double shape, double scale) {
  return sep_mpsk(shape, scale, 2);
}

}  // namespace arisim::stats
