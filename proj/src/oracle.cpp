#include "fourphoton/oracle.hpp"

#include <array>
#include <vector>

namespace fourphoton::oracle {

using fock::OperatorExpr;
using fock::Path;

namespace {

std::vector<double> settings_for(const PolarizerSetting& p, double reference) {
  if (p.present()) return {p.angle()};
  return {reference, reference + kPi / 2};
}

fock::FockState left_detected(const ExperimentConfig& config, double theta1, double theta2) {
  ExperimentConfig cfg = config;
  cfg.polarizers[0] = PolarizerSetting::at(theta1);
  cfg.polarizers[1] = PolarizerSetting::at(theta2);
  const auto e21 = elements::left_detector_op(cfg, 2) * elements::left_detector_op(cfg, 1);
  return fock::apply(e21, elements::initial_state());
}

}  // namespace

double quad_probability(const ExperimentConfig& config, double absent_reference,
                        double reflection_sign) {
  const auto psi = elements::initial_state();
  double total = 0.0;
  for (double a : settings_for(config.polarizers[0], absent_reference))
    for (double b : settings_for(config.polarizers[1], absent_reference))
      for (double c : settings_for(config.polarizers[2], absent_reference))
        for (double d : settings_for(config.polarizers[3], absent_reference)) {
          const auto expr =
              elements::quad_detection_expr(config.with_angles({a, b, c, d}), reflection_sign);
          total += fock::expectation_abs2(expr, psi);
        }
  return total;
}

double same_beam_moment(const ExperimentConfig& config, double theta1, double theta2,
                        double theta3) {
  const auto left = left_detected(config, theta1, theta2);
  auto [e3, e4] = elements::beamsplitter_detector_ops(config.bs, theta3, theta3, config.geom,
                                                      config.timing, config.freq);
  return fock::expectation_abs2(e3 * e3, left);
}

double two_photon_channels_moment_route(const ExperimentConfig& config, double theta1,
                                        double theta2) {
  const auto left = left_detected(config, theta1, theta2);
  double moment = 0.0;
  for (double a : {0.0, kPi / 2}) {
    for (double b : {0.0, kPi / 2}) {
      auto [e3a, e4a] = elements::beamsplitter_detector_ops(config.bs, a, a, config.geom,
                                                            config.timing, config.freq);
      auto [e3b, e4b] = elements::beamsplitter_detector_ops(config.bs, b, b, config.geom,
                                                            config.timing, config.freq);
      moment += fock::expectation_abs2(e3a * e3b, left);
      moment += fock::expectation_abs2(e4a * e4b, left);
    }
  }
  // <N(N-1)> = 2 P(N = 2) for a port holding at most two photons.
  return moment / 2.0;
}

ChannelProbabilities output_channels(const BeamSplitterSpec& bs, double theta1, double theta2) {
  ExperimentConfig cfg;
  cfg.bs = bs;
  const auto left = left_detected(cfg, theta1, theta2);
  const auto out = fock::transform_creators(left, elements::beamsplitter_output_map(bs));

  ChannelProbabilities ch;
  for (const auto& [occ, amp] : out.terms()) {
    const int n3 = occ[{Path::D3out, fock::Pol::X}] + occ[{Path::D3out, fock::Pol::Y}];
    const int n4 = occ[{Path::D4out, fock::Pol::X}] + occ[{Path::D4out, fock::Pol::Y}];
    const double p = std::norm(amp);
    if (n3 == 1 && n4 == 1) ch.one_one += p;
    else if (n3 == 2) ch.two_d3 += p;
    else if (n4 == 2) ch.two_d4 += p;
  }
  return ch;
}

}  // namespace fourphoton::oracle
