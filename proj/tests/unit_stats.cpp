#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "arisim/errors.hpp"
#include "arisim/stats.hpp"
#include "arisim/units.hpp"
#include "support.hpp"

using namespace arisim;

TEST_SUITE("stats") {

TEST_CASE("moment matching recovers sample mean and variance exactly") {
  std::vector<double> s{1.0, 2.0, 3.0, 4.0};
  auto fit = stats::fit_gamma_moments(s);
  // Analytic moments of the fit: mean = k*nu, variance = k*nu^2.
  double mean = 2.5, var = 1.25;  // population variance of {1,2,3,4}
  CHECK(fit.shape * fit.scale == doctest::Approx(mean).epsilon(1e-14));
  CHECK(fit.shape * fit.scale * fit.scale ==
        doctest::Approx(var).epsilon(1e-14));
  CHECK(fit.shape == doctest::Approx(mean * mean / var).epsilon(1e-14));
  CHECK(fit.scale == doctest::Approx(var / mean).epsilon(1e-14));
}

TEST_CASE("degenerate samples are rejected") {
  std::vector<double> one{1.0};
  CHECK_THROWS_AS(stats::fit_gamma_moments(one), SolverError);
  std::vector<double> flat{2.0, 2.0, 2.0};
  CHECK_THROWS_AS(stats::fit_gamma_moments(flat), SolverError);
  std::vector<double> nonpos{-1.0, -3.0};
  CHECK_THROWS_AS(stats::fit_gamma_moments(nonpos), SolverError);
}

TEST_CASE("gamma density normalizes and matches a known point") {
  // k = 2, nu = 1: pdf(x) = x e^{-x}.
  CHECK(stats::gamma_pdf(1.0, 2.0, 1.0) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-14));
  CHECK(stats::gamma_pdf(-0.5, 2.0, 1.0) == 0.0);
  // The x^{1.5} behavior at the origin caps composite-Simpson accuracy.
  double total = testkit::simpson(
      [](double x) { return stats::gamma_pdf(x, 2.5, 1.3); }, 0.0, 80.0,
      20000);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("moment generating function value and domain") {
  CHECK(stats::gamma_mgf(-0.7, 2.5, 1.3) ==
        doctest::Approx(0.19834286485908325).epsilon(1e-14));
  CHECK(stats::gamma_mgf(0.0, 3.0, 2.0) == 1.0);
  CHECK_THROWS_AS(stats::gamma_mgf(1.0 / 1.3, 2.5, 1.3), std::domain_error);
  CHECK_THROWS_AS(stats::gamma_mgf(2.0, 2.5, 1.3), std::domain_error);
}

TEST_CASE("symbol error probability matches frozen references") {
  // 30-digit arbitrary-precision references for the averaged M-PSK error
  // integral, frozen from an independent oracle run.
  CHECK(stats::sep_mpsk(44.8922, 4.05e-4, 2) ==
        doctest::Approx(0.42459949100541087).epsilon(1e-10));
  CHECK(stats::sep_mpsk(44.8922, 4.05e-4, 4) ==
        doctest::Approx(0.69364500807709548).epsilon(1e-10));
  CHECK(stats::sep_mpsk(2.5, 1.3, 2) ==
        doctest::Approx(0.02564831727050592).epsilon(1e-10));
  CHECK(stats::sep_mpsk(2.5, 1.3, 8) ==
        doctest::Approx(0.37031542771351029).epsilon(1e-10));
  CHECK(stats::sep_mpsk(178.4629, 0.064994, 4) ==
        doctest::Approx(0.00073482863275718947).epsilon(1e-10));
  // Rayleigh special case k = 1 has the closed form 0.5(1-sqrt(nu/(1+nu))).
  CHECK(stats::sep_mpsk(1.0, 2.0, 2) ==
        doctest::Approx(0.091751709536136984).epsilon(1e-10));
  CHECK(stats::sep_mpsk(1.0, 2.0, 2) ==
        doctest::Approx(0.5 * (1.0 - std::sqrt(2.0 / 3.0))).epsilon(1e-10));
  CHECK_THROWS_AS(stats::sep_mpsk(1.0, 1.0, 1), SolverError);
}

TEST_CASE("adaptive quadrature agrees with an independent Simpson rule") {
  struct Case {
    double k, nu;
    int m;
  } cases[] = {{2.5, 1.3, 2}, {2.5, 1.3, 4}, {2.5, 1.3, 8}, {44.9, 4e-4, 2}};
  for (const auto& c : cases) {
    double g2 = std::sin(units::kPi / c.m) * std::sin(units::kPi / c.m);
    auto f = [&](double x) {
      double s2 = std::sin(x) * std::sin(x);
      if (s2 < 1e-300) return 0.0;
      return std::pow(1.0 + c.nu * g2 / s2, -c.k);
    };
    double ref = testkit::simpson(f, 1e-12, (c.m - 1) * units::kPi / c.m,
                                  40000) /
                 units::kPi;
    CHECK(std::abs(stats::sep_mpsk(c.k, c.nu, c.m) - ref) < 1e-8);
  }
}

TEST_CASE("averaged error equals the Monte Carlo conditional expectation") {
  // BPSK conditional error Q(sqrt(2 snr)) averaged over Gamma draws must
  // match the transform-domain integral (it is exact, not an approximation).
  const double k = 2.5, nu = 1.3;
  std::mt19937_64 eng(99);
  std::gamma_distribution<double> gam(k, nu);
  const int n = 1000000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double snr = gam(eng);
    double q = 0.5 * std::erfc(std::sqrt(snr));
    acc += q;
    acc2 += q * q;
  }
  double mean = acc / n;
  double se = std::sqrt((acc2 / n - mean * mean) / n);
  double analytic = stats::sep_mpsk(k, nu, 2);
  CHECK(std::abs(mean - analytic) < 4.0 * se);
}

TEST_CASE("error probability decreases as the mean grows at fixed shape") {
  double prev = 1.0;
  for (double nu = 0.05; nu <= 30.0; nu *= 1.6) {
    double sep = stats::sep_mpsk(3.0, nu, 4);
    CHECK(sep <= prev + 1e-14);
    prev = sep;
  }
}

TEST_CASE("bit error mapping") {
  CHECK(stats::bep_from_sep(0.3, 8) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(stats::bep_from_sep(0.3, 2) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(stats::bep_bpsk(2.5, 1.3) ==
        doctest::Approx(stats::sep_mpsk(2.5, 1.3, 2)).epsilon(1e-14));
  CHECK_THROWS_AS(stats::bep_from_sep(0.1, 1), SolverError);
}

}  // TEST_SUITE("stats")
