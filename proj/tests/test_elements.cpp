#include <doctest.h>

#include <cmath>

#include "fourphoton/elements.hpp"
#include "generators.hpp"

using namespace fourphoton;

TEST_CASE("angles normalize into [0, pi)") {
  testing::Gen gen(21);
  for (int k = 0; k < 200; ++k) {
    const double t = gen.uniform(-20, 20);
    const double n = normalize_angle(t);
    CHECK(n >= 0.0);
    CHECK(n < kPi);
    CHECK(std::abs(std::sin(n - t)) < 1e-12);
  }
  CHECK(PolarizerSetting::at(kPi).angle() == doctest::Approx(0.0));
}

TEST_CASE("absent polarizer has no angle") {
  const auto p = PolarizerSetting::absent();
  CHECK_FALSE(p.present());
  CHECK_THROWS_AS(p.angle(), ConfigError);
  CHECK_THROWS_AS(PolarizerSetting::at(std::nan("")), ConfigError);
}

TEST_CASE("beam splitter must be lossless with coefficients in [0, 1]") {
  CHECK_NOTHROW(BeamSplitterSpec::balanced().validate());
  CHECK(BeamSplitterSpec::balanced().is_balanced());
  CHECK_THROWS_AS((BeamSplitterSpec{0.6, 0.5, 0.5, 0.5}.validate()), ConfigError);
  CHECK_THROWS_AS((BeamSplitterSpec{1.2, 0.5, -0.2, 0.5}.validate()), ConfigError);
  CHECK_NOTHROW((BeamSplitterSpec{0.7, 0.2, 0.3, 0.8}.validate()));
  CHECK_FALSE((BeamSplitterSpec{0.7, 0.2, 0.3, 0.8}.is_balanced()));
}

TEST_CASE("geometry rejects negative lengths and non-positive c") {
  Geometry g;
  CHECK_NOTHROW(g.validate());
  g.r3 = -1.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g.r3 = 0.0;
  g.c = 0.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("propagation phase has unit modulus and the expected argument") {
  const Complex p = elements::propagation_phase(2.0, 3.0, 0.5, 1.0, 1.0);
  CHECK(std::abs(p) == doctest::Approx(1.0));
  CHECK(std::arg(p) == doctest::Approx(std::remainder(2.0 * (3.0 + 0.5 - 1.0), 2 * kPi)));
}

TEST_CASE("quad detection operator needs every polarizer") {
  auto cfg = ExperimentConfig::symmetric(0, 0, 0, 0);
  CHECK_NOTHROW(elements::quad_detection_expr(cfg));
  cfg.polarizers[2] = PolarizerSetting::absent();
  CHECK_THROWS_AS(elements::quad_detection_expr(cfg), ConfigError);
  CHECK_THROWS_AS(cfg.angles(), ConfigError);
}

TEST_CASE("with_angles replaces polarizers and keeps the rest") {
  testing::Gen gen(22);
  const auto cfg = gen.config();
  const auto moved = cfg.with_angles({0.1, 0.2, 0.3, 0.4});
  CHECK(moved.bs == cfg.bs);
  CHECK(moved.geom == cfg.geom);
  CHECK(moved.angles()[2] == doctest::Approx(0.3));
}
