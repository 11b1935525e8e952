#pragma once

#include <Eigen/Dense>

#include "arisim/rng.hpp"

// Indoor-hotspot link budget and Rician/Rayleigh small-scale fading for the
// two reflector hops of the single-amplifier architecture.
namespace arisim::channel {

// Placement: transmitter and receiver are d apart; the reflector sits at
// horizontal offset d_h from the transmitter with perpendicular offset d_v.
struct InhGeometry {
  double d_v_m = 5.0;
  double d_h_m = 5.0;
  double d_m = 50.0;
};

struct LinkDistances {
  double d1_m;  // transmitter -> first panel
  double d2_m;  // second panel -> receiver
};

// Hop lengths from the planar geometry. Throws ConfigError when either hop
// is shorter than 1 m (below the path-loss model's validity range).
LinkDistances link_distances(const InhGeometry& g);

// Indoor-hotspot path loss, carrier in GHz, distance in meters.
double path_loss_los_db(double d_m, double f_c_ghz);
// NLoS is floored by the LoS curve per the model definition.
double path_loss_nlos_db(double d_m, double f_c_ghz);

// Distance-dependent line-of-sight probability (piecewise, breakpoints at
// 5 m and 49 m).
double p_los(double d_m);

// Per-realization link state policy. `automatic` draws one Bernoulli(p_los)
// per link per realization; the draw couples the Rician factor and the path
// loss: LoS keeps the configured K with LoS attenuation, NLoS forces K=0
// with NLoS attenuation.
enum class LinkState { automatic, los, nlos };

struct LinkSpec {
  double distance_m;
  double rician_k;  // applies only when the realization is LoS
  LinkState state = LinkState::automatic;
};

// One realization of the N per-element coefficients of a hop. The specular
// component carries an i.i.d. uniform phase per element per realization; the
// diffuse component is CN(0,1). Entries are scaled by sqrt(1/lambda) with
// lambda the linear path loss selected by the realized link state.
Eigen::VectorXcd sample_channel(const LinkSpec& link, double f_c_ghz, int n,
                                RngStream& rng);

}  // namespace arisim::channel
