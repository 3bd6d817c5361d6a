#pragma once

// Seeded random inputs for property tests.

#include <array>
#include <cstdint>
#include <random>

#include "fourphoton/elements.hpp"
#include "fourphoton/fock.hpp"

namespace fourphoton::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double angle() { return uniform(-kPi, kPi); }
  Complex complex() { return {uniform(-1, 1), uniform(-1, 1)}; }

  BeamSplitterSpec beam_splitter() {
    BeamSplitterSpec bs;
    bs.Tx = uniform(0, 1);
    bs.Ty = uniform(0, 1);
    bs.Rx = 1 - bs.Tx;
    bs.Ry = 1 - bs.Ty;
    return bs;
  }

  /// Arbitrary angles, beam splitter, path lengths (c = 1), frequencies and times.
  ExperimentConfig config() {
    ExperimentConfig cfg;
    for (auto& p : cfg.polarizers) p = PolarizerSetting::at(angle());
    cfg.bs = beam_splitter();
    cfg.geom = {uniform(0, 3), uniform(0, 3), uniform(0, 3), uniform(0, 3),
                uniform(0, 3), uniform(0, 3), 1.0};
    for (auto& w : cfg.freq.omega) w = uniform(0.5, 2.0);
    cfg.timing = {uniform(-1, 1), uniform(-1, 1), uniform(-1, 1),
                  uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
    return cfg;
  }

  fock::Mode mode() { return fock::Mode::from_index(static_cast<std::size_t>(integer(0, 11))); }

  /// Superposition of a few basis states with at most `max_photons` photons.
  fock::FockState state(int max_photons) {
    fock::FockState s;
    const int terms = integer(1, 5);
    for (int k = 0; k < terms; ++k) {
      fock::Occupation occ;
      const int n = integer(0, max_photons);
      for (int j = 0; j < n; ++j) occ = occ.raised(mode());
      s.add(occ, complex());
    }
    return s;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace fourphoton::testing
