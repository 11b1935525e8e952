#include "arisim/channel.hpp"

#include <cmath>
#include <string>

#include "arisim/errors.hpp"
#include "arisim/units.hpp"

namespace arisim::channel {

LinkDistances link_distances(const InhGeometry& g) {
  LinkDistances out{std::hypot(g.d_v_m, g.d_h_m),
                    std::hypot(g.d_v_m, g.d_m - g.d_h_m)};
  if (out.d1_m < 1.0 || out.d2_m < 1.0) {
    throw ConfigError("link distance below 1 m (d1=" +
                      std::to_string(out.d1_m) +
                      " m, d2=" + std::to_string(out.d2_m) +
                      " m); outside path-loss model validity");
  }
  return out;
}

double path_loss_los_db(double d_m, double f_c_ghz) {
  return 32.4 + 17.3 * std::log10(d_m) + 20.0 * std::log10(f_c_ghz);
}

double path_loss_nlos_db(double d_m, double f_c_ghz) {
  double nlos = 32.4 + 31.9 * std::log10(d_m) + 20.0 * std::log10(f_c_ghz);
  return std::max(path_loss_los_db(d_m, f_c_ghz), nlos);
}

double p_los(double d_m) {
  if (d_m <= 5.0) return 1.0;
  if (d_m <= 49.0) return std::exp(-(d_m - 5.0) / 70.8);
  return 0.54 * std::exp(-(d_m - 49.0) / 211.7);
}

Eigen::VectorXcd sample_channel(const LinkSpec& link, double f_c_ghz, int n,
                                RngStream& rng) {
  if (n <= 0) throw ConfigError("sample_channel: element count must be >= 1");
  if (link.distance_m < 1.0) {
    throw ConfigError("sample_channel: distance below 1 m");
  }

  bool is_los;
  switch (link.state) {
    case LinkState::los:
      is_los = true;
      break;
    case LinkState::nlos:
      is_los = false;
      break;
    default:
      // One state draw per link per realization: all N elements of a hop
      // share the blockage condition (far-field panel assumption).
      is_los = rng.uniform() < p_los(link.distance_m);
      break;
  }

  double k = is_los ? link.rician_k : 0.0;
  double loss_db = is_los ? path_loss_los_db(link.distance_m, f_c_ghz)
                          : path_loss_nlos_db(link.distance_m, f_c_ghz);
  double scale = std::sqrt(1.0 / units::db_to_linear(loss_db));
  double w_spec = std::sqrt(k / (k + 1.0));
  double w_diff = std::sqrt(1.0 / (k + 1.0));

  Eigen::VectorXcd out(n);
  for (int i = 0; i < n; ++i) {
    std::complex<double> specular = 0.0;
    if (k > 0.0) {
      double psi = rng.uniform(0.0, 2.0 * units::kPi);
      specular = std::polar(1.0, psi);
    }
    out[i] = scale * (w_spec * specular + w_diff * rng.cgauss());
  }
  return out;
}

}  // namespace arisim::channel
