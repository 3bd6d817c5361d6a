#pragma once

// Probabilities evaluated by brute-force operator algebra on the exact
// four-photon state. Shares no code path with fourphoton::analytic beyond the
// configuration types.

#include "fourphoton/elements.hpp"

namespace fourphoton::oracle {

/// ||E4 E3 E2 E1 |Psi>||^2, absent polarizers summed over {ref, ref + pi/2}.
double quad_probability(const ExperimentConfig& config, double absent_reference = 0.0,
                        double reflection_sign = 1.0);

/// ||E3 E3 E2 E1 |Psi>||^2 with the D3 polarizer at theta3.
double same_beam_moment(const ExperimentConfig& config, double theta1, double theta2,
                        double theta3);

/// Probability that both right photons leave through the same port (either one),
/// no right polarizers, from factorial moments of the detection operators.
double two_photon_channels_moment_route(const ExperimentConfig& config, double theta1,
                                        double theta2);

struct ChannelProbabilities {
  double one_one = 0.0;
  double two_d3 = 0.0;
  double two_d4 = 0.0;
  double total() const { return one_one + two_d3 + two_d4; }
};

/// Channel decomposition obtained by propagating the right photons through the
/// beam splitter and projecting the output state, given photons 1 and 2 pass
/// polarizers at theta1, theta2.
ChannelProbabilities output_channels(const BeamSplitterSpec& bs, double theta1, double theta2);

}  // namespace fourphoton::oracle
