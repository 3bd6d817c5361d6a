#include "fourphoton/elements.hpp"

#include <cmath>
#include <string>

namespace fourphoton {

using fock::Mode;
using fock::OperatorExpr;
using fock::Path;
using fock::Pol;

double normalize_angle(double theta) {
  double t = std::fmod(theta, kPi);
  if (t < 0.0) t += kPi;
  if (t >= kPi) t -= kPi;
  return t;
}

PolarizerSetting PolarizerSetting::at(double theta) {
  if (!std::isfinite(theta)) throw ConfigError("polarizer angle must be finite");
  PolarizerSetting p;
  p.angle_ = normalize_angle(theta);
  return p;
}

double PolarizerSetting::angle() const {
  if (!angle_) throw ConfigError("polarizer is absent; no definite angle");
  return *angle_;
}

void BeamSplitterSpec::validate() const {
  constexpr double kTol = 1e-12;
  for (double v : {Tx, Ty, Rx, Ry}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError("beam-splitter coefficients must lie in [0, 1]");
    }
  }
  if (std::abs(Tx + Rx - 1.0) > kTol || std::abs(Ty + Ry - 1.0) > kTol) {
    throw ConfigError("beam splitter must be lossless: Tx + Rx = 1 and Ty + Ry = 1");
  }
}

bool BeamSplitterSpec::is_balanced() const {
  constexpr double kTol = 1e-12;
  return std::abs(Tx - 0.5) < kTol && std::abs(Ty - 0.5) < kTol &&
         std::abs(Rx - 0.5) < kTol && std::abs(Ry - 0.5) < kTol;
}

void Geometry::validate() const {
  for (double v : {r1, r2, r3, r4, rI, rII}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("path lengths must be >= 0");
  }
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("speed of light must be > 0");
}

void FrequencySpec::validate() const {
  for (double w : omega) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("frequencies must be > 0");
  }
}

ExperimentConfig ExperimentConfig::symmetric(double theta1, double theta2, double theta3,
                                             double theta4) {
  ExperimentConfig cfg;
  cfg.polarizers = {PolarizerSetting::at(theta1), PolarizerSetting::at(theta2),
                    PolarizerSetting::at(theta3), PolarizerSetting::at(theta4)};
  return cfg;
}

void ExperimentConfig::validate() const {
  bs.validate();
  geom.validate();
  freq.validate();
}

ExperimentConfig ExperimentConfig::with_angles(const std::array<double, 4>& theta) const {
  ExperimentConfig out = *this;
  for (int i = 0; i < 4; ++i) out.polarizers[i] = PolarizerSetting::at(theta[i]);
  return out;
}

std::array<double, 4> ExperimentConfig::angles() const {
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) {
    if (!polarizers[i].present()) {
      throw ConfigError("polarizer P" + std::to_string(i + 1) +
                        " is absent; sum over orthogonal settings instead");
    }
    out[i] = polarizers[i].angle();
  }
  return out;
}

namespace elements {

fock::FockState initial_state() {
  using fock::make_occupation;
  fock::FockState psi;
  for (Pol p : {Pol::X, Pol::Y}) {
    for (Pol q : {Pol::X, Pol::Y}) {
      psi.add(make_occupation({{{Path::P1, p}, 1},
                               {{Path::P3in, p}, 1},
                               {{Path::P2, q}, 1},
                               {{Path::P4in, q}, 1}}),
              0.5);
    }
  }
  return psi;
}

OperatorExpr polarizer_detector_op(Path path, double theta, Complex phase) {
  OperatorExpr e = std::cos(theta) * OperatorExpr::annihilate({path, Pol::X}) +
                   std::sin(theta) * OperatorExpr::annihilate({path, Pol::Y});
  e *= phase;
  return e;
}

Complex propagation_phase(double omega, double pathlen, double t_emit, double t_detect,
                          double c) {
  if (!(c > 0.0)) throw ConfigError("speed of light must be > 0");
  return std::polar(1.0, omega * (pathlen / c + t_emit - t_detect));
}

namespace {

// (a_px sqrt(cx) cos(theta) + a_py sqrt(cy) sin(theta))
OperatorExpr weighted_analyzer(Path path, double cx, double cy, double theta) {
  return std::sqrt(cx) * std::cos(theta) * OperatorExpr::annihilate({path, Pol::X}) +
         std::sqrt(cy) * std::sin(theta) * OperatorExpr::annihilate({path, Pol::Y});
}

}  // namespace

std::pair<OperatorExpr, OperatorExpr> beamsplitter_detector_ops(
    const BeamSplitterSpec& bs, double theta3, double theta4, const Geometry& geom,
    const TimingSpec& timing, const FrequencySpec& freq, double reflection_sign) {
  bs.validate();
  const double w3 = freq.omega[2];
  const double w4 = freq.omega[3];
  const Complex refl{0.0, reflection_sign};

  // Photon 4 transmitted into D3, photon 3 reflected into D3.
  OperatorExpr e3 =
      propagation_phase(w4, geom.rII + geom.r3, timing.t0II, timing.t3, geom.c) *
          weighted_analyzer(Path::P4in, bs.Tx, bs.Ty, theta3) +
      refl * propagation_phase(w3, geom.rI + geom.r3, timing.t0I, timing.t3, geom.c) *
          weighted_analyzer(Path::P3in, bs.Rx, bs.Ry, theta3);

  // Photon 3 transmitted into D4, photon 4 reflected into D4.
  OperatorExpr e4 =
      propagation_phase(w3, geom.rI + geom.r4, timing.t0I, timing.t4, geom.c) *
          weighted_analyzer(Path::P3in, bs.Tx, bs.Ty, theta4) +
      refl * propagation_phase(w4, geom.rII + geom.r4, timing.t0II, timing.t4, geom.c) *
          weighted_analyzer(Path::P4in, bs.Rx, bs.Ry, theta4);

  return {std::move(e3), std::move(e4)};
}

OperatorExpr left_detector_op(const ExperimentConfig& config, int detector) {
  const auto& g = config.geom;
  const auto& t = config.timing;
  const auto& w = config.freq.omega;
  if (detector == 1) {
    return polarizer_detector_op(Path::P1, config.polarizers[0].angle(),
                                 propagation_phase(w[0], g.r1, t.t0I, t.t1, g.c));
  }
  if (detector == 2) {
    return polarizer_detector_op(Path::P2, config.polarizers[1].angle(),
                                 propagation_phase(w[1], g.r2, t.t0II, t.t2, g.c));
  }
  throw ConfigError("left detector index must be 1 or 2");
}

OperatorExpr quad_detection_expr(const ExperimentConfig& config, double reflection_sign) {
  config.validate();
  const auto theta = config.angles();
  auto [e3, e4] = beamsplitter_detector_ops(config.bs, theta[2], theta[3], config.geom,
                                            config.timing, config.freq, reflection_sign);
  return e4 * e3 * left_detector_op(config, 2) * left_detector_op(config, 1);
}

fock::ModeMap beamsplitter_output_map(const BeamSplitterSpec& bs) {
  bs.validate();
  fock::ModeMap map;
  const Complex i{0.0, 1.0};
  for (Pol p : {Pol::X, Pol::Y}) {
    const double t = std::sqrt(p == Pol::X ? bs.Tx : bs.Ty);
    const double r = std::sqrt(p == Pol::X ? bs.Rx : bs.Ry);
    map[Mode{Path::P3in, p}.index()] = {{{Path::D3out, p}, i * r}, {{Path::D4out, p}, t}};
    map[Mode{Path::P4in, p}.index()] = {{{Path::D3out, p}, t}, {{Path::D4out, p}, i * r}};
  }
  return map;
}

}  // namespace elements
}  // namespace fourphoton
