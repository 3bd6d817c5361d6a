#include "fourphoton/analytic.hpp"

#include <cmath>

namespace fourphoton::analytic {

namespace {

double sq(double x) { return x * x; }

// Phase difference between the two bracketed terms of the amplitude.
double beat_phase(double omega3, double omega4, double r3, double r4, double t3, double t4,
                  double c) {
  return (omega3 - omega4) * ((r4 - r3) / c + t3 - t4);
}

}  // namespace

double t_coeff(double theta_i, double theta_j, const BeamSplitterSpec& bs) {
  return std::sqrt(bs.Tx) * std::cos(theta_i) * std::cos(theta_j) +
         std::sqrt(bs.Ty) * std::sin(theta_i) * std::sin(theta_j);
}

double r_coeff(double theta_i, double theta_j, const BeamSplitterSpec& bs) {
  return std::sqrt(bs.Rx) * std::cos(theta_i) * std::cos(theta_j) +
         std::sqrt(bs.Ry) * std::sin(theta_i) * std::sin(theta_j);
}

Complex quad_amplitude(const ExperimentConfig& config) {
  config.validate();
  return quad_amplitude_at(config, config.freq.omega);
}

Complex quad_amplitude_at(const ExperimentConfig& config, const std::array<double, 4>& w) {
  config.bs.validate();
  config.geom.validate();
  const auto th = config.angles();
  const auto& g = config.geom;
  const auto& t = config.timing;

  const double global = w[0] * (g.r1 / g.c + t.t0I - t.t1) +
                        w[1] * (g.r2 / g.c + t.t0II - t.t2) + w[2] * (g.rI / g.c + t.t0I) +
                        w[3] * (g.rII / g.c + t.t0II);
  const double alpha = w[2] * (g.r4 / g.c - t.t4) + w[3] * (g.r3 / g.c - t.t3);
  const double beta = w[2] * (g.r3 / g.c - t.t3) + w[3] * (g.r4 / g.c - t.t4);

  const double tt = t_coeff(th[0], th[3], config.bs) * t_coeff(th[1], th[2], config.bs);
  const double rr = r_coeff(th[1], th[3], config.bs) * r_coeff(th[0], th[2], config.bs);

  return 0.5 * std::polar(1.0, global) * (tt * std::polar(1.0, alpha) - rr * std::polar(1.0, beta));
}

QuadProbability quad_probability(const ExperimentConfig& config, double absent_reference) {
  QuadProbability out;
  std::array<std::array<double, 2>, 4> choices{};
  std::array<int, 4> count{};
  for (int i = 0; i < 4; ++i) {
    if (config.polarizers[i].present()) {
      choices[i][0] = config.polarizers[i].angle();
      count[i] = 1;
    } else {
      choices[i] = {absent_reference, absent_reference + kPi / 2};
      count[i] = 2;
    }
  }
  const auto& g = config.geom;
  const auto& t = config.timing;
  const double delta =
      beat_phase(config.freq.omega[2], config.freq.omega[3], g.r3, g.r4, t.t3, t.t4, g.c);
  for (int a = 0; a < count[0]; ++a)
    for (int b = 0; b < count[1]; ++b)
      for (int c = 0; c < count[2]; ++c)
        for (int d = 0; d < count[3]; ++d) {
          const std::array<double, 4> th{choices[0][a], choices[1][b], choices[2][c],
                                         choices[3][d]};
          const double tt = t_coeff(th[0], th[3], config.bs) * t_coeff(th[1], th[2], config.bs);
          const double rr = r_coeff(th[1], th[3], config.bs) * r_coeff(th[0], th[2], config.bs);
          out.value += std::norm(quad_amplitude(config.with_angles(th)));
          out.interference_term -= 0.5 * tt * rr * std::cos(delta);
        }
  return out;
}

double quad_coincidence_prob(double theta1, double theta2, double theta3, double theta4) {
  return sq(std::sin(theta1 - theta2)) * sq(std::sin(theta3 - theta4)) / 16.0;
}

double prob_no_left_polarizers(double theta3, double theta4, double omega3, double omega4,
                               double r3, double r4, double t3, double t4, double c) {
  return (1.0 - sq(std::cos(theta3 - theta4)) *
                    std::cos(beat_phase(omega3, omega4, r3, r4, t3, t4, c))) /
         8.0;
}

double prob_no_right_polarizers(double theta1, double theta2, double omega3, double omega4,
                                double r3, double r4, double t3, double t4, double c) {
  return (1.0 - sq(std::cos(theta1 - theta2)) *
                    std::cos(beat_phase(omega3, omega4, r3, r4, t3, t4, c))) /
         8.0;
}

double prob_both_same_beam(double theta1, double theta2, double theta3) {
  return sq(std::cos(theta1 - theta3)) * sq(std::cos(theta2 - theta3)) / 4.0;
}

double prob_two_photon_channels_no_right(double theta1, double theta2) {
  return (1.0 + sq(std::cos(theta1 - theta2))) / 8.0;
}

double prob_one_one_channel_no_right(double theta1, double theta2) {
  return sq(std::sin(theta1 - theta2)) / 8.0;
}

double prob_filtered(double theta1, double theta2, double theta3, double theta4) {
  return 0.5 * sq(std::cos(theta1 - theta3)) * sq(std::cos(theta2 - theta4));
}

double bell_pair_prob(double theta_a, double theta_b) {
  return 0.5 * sq(std::cos(theta_a - theta_b));
}

}  // namespace fourphoton::analytic
