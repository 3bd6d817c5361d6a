#include <doctest.h>

#include <cmath>

#include "fourphoton/analytic.hpp"
#include "fourphoton/montecarlo.hpp"
#include "fourphoton/wavepacket.hpp"
#include "generators.hpp"

using namespace fourphoton;
using namespace fourphoton::montecarlo;

namespace {

double sq(double x) { return x * x; }

MonteCarloConfig base_config(std::uint64_t n) {
  MonteCarloConfig cfg;
  cfg.n_events = n;
  cfg.seed = 99;
  cfg.physics.polarizers = {PolarizerSetting::at(0), PolarizerSetting::at(0),
                            PolarizerSetting::absent(), PolarizerSetting::absent()};
  cfg.threads = 2;
  return cfg;
}

// |observed - expected| in units of the binomial standard deviation.
double pulls(std::uint64_t count, std::uint64_t n, double p) {
  return std::abs(static_cast<double>(count) - n * p) / std::sqrt(n * p * (1 - p));
}

}  // namespace

TEST_CASE("streams are keyed by seed, setting and batch") {
  auto a = make_stream(1, 2, 3);
  auto b = make_stream(1, 2, 3);
  auto c = make_stream(1, 2, 4);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
}

TEST_CASE("compensated sum keeps small terms") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
  CompensatedSum t;
  t.add(0.1);
  s.merge(t);
  CHECK(s.value() == doctest::Approx(1.1));
}

TEST_CASE("sampler never exceeds its envelope") {
  testing::Gen gen(61);
  for (int trial = 0; trial < 20; ++trial) {
    auto cfg = base_config(1);
    cfg.coherence_time = gen.uniform(0.5, 2);
    cfg.sigma_s = gen.uniform(0, 3) * cfg.coherence_time;
    cfg.central_omega = {3, 3, 3 + gen.uniform(-1, 1), 3};
    cfg.physics.geom = {gen.uniform(0, 1), gen.uniform(0, 1), gen.uniform(0, 1),
                        gen.uniform(0, 1), gen.uniform(0, 1), gen.uniform(0, 1), 1.0};
    cfg.physics.polarizers = {PolarizerSetting::at(gen.angle()), PolarizerSetting::absent(),
                              PolarizerSetting::at(gen.angle()), PolarizerSetting::absent()};
    auto rng = make_stream(trial, 0, 0);
    for (int i = 0; i < 5000; ++i) CHECK_NOTHROW(sample_event(cfg, rng));
  }
}

TEST_CASE("channel fractions at unit efficiency") {
  auto cfg = base_config(1);
  cfg.physics.polarizers[0] = PolarizerSetting::absent();
  cfg.physics.polarizers[1] = PolarizerSetting::absent();
  auto rng = make_stream(3, 0, 0);
  const std::uint64_t n = 200000;
  std::uint64_t one_one = 0, d3 = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto ev = sample_event(cfg, rng);
    one_one += ev.channel == Channel::OneOne;
    d3 += ev.channel == Channel::TwoAtD3;
  }
  CHECK(pulls(one_one, n, 0.25) < 4);
  CHECK(pulls(d3, n, 0.375) < 4);
}

TEST_CASE("quadruple rate reproduces the plane-wave probabilities") {
  const double delta = kPi / 3;
  auto cfg = base_config(400000);
  const auto t = simulate_settings(cfg, {{0.0, delta}}, {cfg.n_events})[0];
  CHECK(pulls(t.n_quad_detected, t.n_emitted, sq(std::sin(delta)) / 8) < 4);

  cfg.physics.polarizers[2] = PolarizerSetting::at(0.2);
  cfg.physics.polarizers[3] = PolarizerSetting::at(0.2 + kPi / 2);
  const auto r = simulate_settings(cfg, {{0.0, delta}}, {cfg.n_events})[0];
  const double expected = analytic::quad_coincidence_prob(0, delta, 0.2, 0.2 + kPi / 2);
  CHECK(pulls(r.n_quad_detected, r.n_emitted, expected) < 4);
}

TEST_CASE("results do not depend on the thread count") {
  auto cfg = base_config(50000);
  cfg.batch_size = 1000;
  cfg.window34 = 0.5;
  cfg.sigma_s = 1.0;
  cfg.threads = 1;
  const auto one = run(cfg);
  cfg.threads = 4;
  const auto four = run(cfg);
  CHECK(one.n_in_window == four.n_in_window);
  CHECK(one.histogram == four.histogram);
  CHECK(one.mean_abs_tau34 == four.mean_abs_tau34);
  CHECK(one.visibility_est == four.visibility_est);
}

TEST_CASE("widening the window never loses events") {
  auto cfg = base_config(40000);
  cfg.sigma_s = 1.0;
  std::uint64_t previous = 0;
  for (double w : {0.05, 0.2, 0.5, 1.0, 3.0, kUnbounded}) {
    cfg.window34 = w;
    const auto st = run(cfg);
    CHECK(st.n_in_window >= previous);
    previous = st.n_in_window;
  }
}

TEST_CASE("detector efficiency thins quadruples as eta^4") {
  auto cfg = base_config(200000);
  cfg.detector_efficiency = 0.8;
  const auto t = simulate_settings(cfg, {{0.0, kPi / 2}}, {cfg.n_events})[0];
  CHECK(pulls(t.n_quad_detected, t.n_emitted, std::pow(0.8, 4) / 8) < 4);
}

TEST_CASE("zero efficiency reports unavailable statistics") {
  auto cfg = base_config(1000);
  cfg.detector_efficiency = 0.0;
  try {
    run(cfg);
    FAIL("expected StatisticsUnavailable");
  } catch (const StatisticsUnavailable& e) {
    CHECK(e.n_emitted == 1000);
    CHECK(e.n_in_window == 0);
  }
}

TEST_CASE("fringe visibility follows the prediction with source jitter") {
  auto cfg = base_config(400000);
  cfg.sigma_s = 1.0;
  cfg.window34 = 0.5;
  const auto st = run(cfg);
  const double predicted = predicted_visibility(cfg);
  CHECK(predicted < 1.0);
  CHECK(std::abs(st.visibility_est - predicted) < 4 * st.visibility_stderr);
  cfg.sigma_s = 0.0;
  CHECK(predicted_visibility(cfg) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("predicted visibility matches the wave-packet visibility for a fixed offset") {
  // Unequal paths fix both offsets: tau_s = rI - rII and, inside a narrow window
  // around t3 = t4, tau34 = r4 - r3.
  auto cfg = base_config(1);
  cfg.physics.geom.rI = 0.8;
  cfg.physics.geom.r3 = 0.5;
  cfg.physics.geom.c = 1.0;
  cfg.window34 = 1e-4;
  const double expected = wavepacket::visibility(0.8, -0.5, 1.0);
  CHECK(expected < 0.9);
  CHECK(predicted_visibility(cfg) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("mean |tau34| without a window") {
  auto cfg = base_config(400000);
  const auto st = run(cfg);
  CHECK(st.mean_abs_tau34 == doctest::Approx(std::sqrt(2 / kPi)).epsilon(0.02));
  CHECK(st.rms_tau34 == doctest::Approx(1.0).epsilon(0.02));
  CHECK(st.postselect_fraction == 1.0);
}

TEST_CASE("CHSH from simulated coincidences") {
  auto cfg = base_config(800000);
  cfg.window34 = 0.05;
  const auto ex = chsh_experiment(cfg, bell::CHSHSettings::canonical());
  CHECK(ex.tallies.size() == 16);
  CHECK(ex.chsh.S - 2.0 > 3 * ex.chsh.std_error);
  cfg.physics.polarizers[2] = PolarizerSetting::at(0);
  CHECK_THROWS_AS(chsh_experiment(cfg, bell::CHSHSettings::canonical()), ConfigError);
}

TEST_CASE("configuration checks") {
  auto cfg = base_config(10);
  cfg.physics.bs = {0.6, 0.6, 0.4, 0.4};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = base_config(10);
  cfg.scan_angles = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = base_config(0);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
