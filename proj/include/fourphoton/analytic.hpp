#pragma once

// Closed-form quadruple-coincidence probabilities for plane-wave photons.
// Values are per emitted four-photon event with ideal detectors.

#include <array>

#include "fourphoton/elements.hpp"

namespace fourphoton::analytic {

struct QuadProbability {
  double value = 0.0;
  /// The cross term between the transmitted-transmitted and reflected-reflected paths.
  double interference_term = 0.0;
};

/// sqrt(Tx) cos(ti) cos(tj) + sqrt(Ty) sin(ti) sin(tj)
double t_coeff(double theta_i, double theta_j, const BeamSplitterSpec& bs);
/// sqrt(Rx) cos(ti) cos(tj) + sqrt(Ry) sin(ti) sin(tj)
double r_coeff(double theta_i, double theta_j, const BeamSplitterSpec& bs);

/// Amplitude of <0| E4 E3 E2 E1 |Psi>. Carries the overall 1/2 of the two pair
/// normalizations so that its modulus squared is a probability.
Complex quad_amplitude(const ExperimentConfig& config);
/// The same amplitude at explicit angular frequencies. Any real values are
/// accepted, since spectral quadrature nodes can fall below zero.
Complex quad_amplitude_at(const ExperimentConfig& config, const std::array<double, 4>& omega);

/// |quad_amplitude|^2 split into its parts. Absent polarizers are summed over
/// the orthogonal settings {ref, ref + pi/2}.
QuadProbability quad_probability(const ExperimentConfig& config, double absent_reference = 0.0);

/// (1/16) sin^2(t1 - t2) sin^2(t3 - t4); symmetric setup, balanced beam splitter.
double quad_coincidence_prob(double theta1, double theta2, double theta3, double theta4);

/// (1/8){1 - cos^2(t3 - t4) cos[(w3 - w4)((r4 - r3)/c + t3 - t4)]}
double prob_no_left_polarizers(double theta3, double theta4, double omega3, double omega4,
                               double r3, double r4, double t3, double t4,
                               double c = kSpeedOfLight);

/// (1/8){1 - cos^2(t1 - t2) cos[(w3 - w4)((r4 - r3)/c + t3 - t4)]}
double prob_no_right_polarizers(double theta1, double theta2, double omega3, double omega4,
                                double r3, double r4, double t3, double t4,
                                double c = kSpeedOfLight);

/// <E1+ E2+ E3+ E3+ E3 E3 E2 E1> = (1/4) cos^2(t1 - t3) cos^2(t2 - t3), equal frequencies.
/// This is the second factorial moment; the probability of the two-photon event
/// through a polarizer at t3 is half of it.
double prob_both_same_beam(double theta1, double theta2, double theta3);

/// Both two-photon channels together, no right polarizers: [1 + cos^2(t1 - t2)]/8.
double prob_two_photon_channels_no_right(double theta1, double theta2);

/// The 1-1 channel with no right polarizers at equal frequencies: sin^2(t1 - t2)/8.
double prob_one_one_channel_no_right(double theta1, double theta2);

/// Frequency-filtered 2-photon beams: (1/2) cos^2(t1 - t3) cos^2(t2 - t4).
double prob_filtered(double theta1, double theta2, double theta3, double theta4);

/// Standard pair probability (1/2) cos^2(ta - tb).
double bell_pair_prob(double theta_a, double theta_b);

}  // namespace fourphoton::analytic
