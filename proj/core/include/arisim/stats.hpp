#pragma once

#include <span>

// Gamma moment matching of SNR samples and the single-integral symbol error
// probability it enables for M-PSK signaling.
namespace arisim::stats {

struct GammaFit {
  double shape;  // k
  double scale;  // nu
};

// Moment matching: shape = mean^2/var, scale = var/mean. Requires at least
// two samples with strictly positive mean and variance.
GammaFit fit_gamma_moments(std::span<const double> samples);

double gamma_pdf(double x, double shape, double scale);

// (1 - scale*s)^(-shape); defined for s < 1/scale, else std::domain_error.
double gamma_mgf(double s, double shape, double scale);

// Average M-PSK symbol error probability of a Gamma-distributed SNR:
// (1/pi) * integral over (0, (M-1)pi/M] of mgf(-sin^2(pi/M)/sin^2 x) dx,
// evaluated by adaptive Gauss-Kronrod to 1e-10 absolute tolerance.
double sep_mpsk(double shape, double scale, int m_ary);

// Gray-coded bit error approximation: SEP / log2(M).
double bep_from_sep(double sep, int m_ary);

// BPSK bit error probability (the M=2 integral, where SEP == BEP).
double bep_bpsk(double shape, double scale);

}  // namespace arisim::stats
