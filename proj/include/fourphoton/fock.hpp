#pragma once

// Sparse bosonic Fock-space algebra over the twelve polarization modes of the
// two-source interferometer. Small enough to be exact; used as the brute-force
// reference for every closed-form probability.

#include <array>
#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fourphoton {

using Complex = std::complex<double>;

namespace fock {

/// Spatial modes. P3in/P4in are the right-going photons before the beam
/// splitter, D3out/D4out the beam-splitter output ports.
enum class Path : std::uint8_t { P1, P2, P3in, P4in, D3out, D4out };
enum class Pol : std::uint8_t { X, Y };

inline constexpr std::size_t kModeCount = 12;
inline constexpr int kMaxPhotons = 4;

struct Mode {
  Path path;
  Pol pol;

  /// Canonical index: (P1x, P1y, P2x, P2y, P3in x, ..., D4out y).
  constexpr std::size_t index() const {
    return 2 * static_cast<std::size_t>(path) + static_cast<std::size_t>(pol);
  }
  static constexpr Mode from_index(std::size_t i) {
    return {static_cast<Path>(i / 2), static_cast<Pol>(i % 2)};
  }
  friend constexpr bool operator==(Mode, Mode) = default;
};

std::string to_string(Mode m);

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Photon counts per mode. Never holds more than kMaxPhotons in total.
class Occupation {
 public:
  Occupation() = default;

  int operator[](Mode m) const { return counts_[m.index()]; }
  int total() const;

  /// Returns a copy with one more photon in `m`; throws CapacityError past the cap.
  Occupation raised(Mode m) const;
  /// Returns a copy with one photon removed from `m`. Precondition: count > 0.
  Occupation lowered(Mode m) const;

  const std::array<std::uint8_t, kModeCount>& counts() const { return counts_; }

  friend auto operator<=>(const Occupation&, const Occupation&) = default;

 private:
  std::array<std::uint8_t, kModeCount> counts_{};
};

/// Builds an occupation from (mode, count) pairs.
Occupation make_occupation(std::initializer_list<std::pair<Mode, int>> entries);

class FockState {
 public:
  /// Amplitudes below this fraction of the state norm are dropped.
  static constexpr double kDropout = 1e-15;

  FockState() = default;

  static FockState vacuum();
  static FockState basis(const Occupation& occ, Complex amplitude = 1.0);

  void add(const Occupation& occ, Complex amplitude);
  Complex amplitude(const Occupation& occ) const;

  double norm_squared() const;
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::map<Occupation, Complex>& terms() const { return terms_; }

  /// Removes amplitudes below kDropout relative to the norm.
  FockState& prune();

  FockState& operator+=(const FockState& other);
  FockState& operator*=(Complex scale);
  friend FockState operator+(FockState a, const FockState& b) { return a += b; }
  friend FockState operator*(Complex s, FockState a) { return a *= s; }

 private:
  std::map<Occupation, Complex> terms_;
};

enum class Ladder : std::uint8_t { Create, Annihilate };

struct LadderOp {
  Mode mode;
  Ladder kind;
};

/// coefficient * factors[0] * factors[1] * ... ; the rightmost factor acts first.
struct Monomial {
  Complex coefficient{1.0};
  std::vector<LadderOp> factors;
};

class OperatorExpr {
 public:
  OperatorExpr() = default;

  static OperatorExpr identity();
  static OperatorExpr annihilate(Mode m);
  static OperatorExpr create(Mode m);

  const std::vector<Monomial>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Hermitian conjugate.
  OperatorExpr adjoint() const;

  OperatorExpr& operator+=(const OperatorExpr& other);
  OperatorExpr& operator*=(Complex scale);
  friend OperatorExpr operator+(OperatorExpr a, const OperatorExpr& b) { return a += b; }
  friend OperatorExpr operator-(OperatorExpr a, OperatorExpr b) {
    b *= -1.0;
    return a += b;
  }
  friend OperatorExpr operator*(Complex s, OperatorExpr a) { return a *= s; }
  /// Operator product: (a * b) applies b first.
  friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);

 private:
  std::vector<Monomial> terms_;
};

FockState apply(const OperatorExpr& expr, const FockState& s);

/// <a|b>, conjugate-linear in `a`.
Complex inner_product(const FockState& a, const FockState& b);

/// ||expr |s>||^2
double expectation_abs2(const OperatorExpr& expr, const FockState& s);

/// Linear substitution of creation operators, a_m^dagger -> sum_k U_km b_k^dagger.
/// Modes absent from the map are left untouched. This is the Schroedinger-picture
/// counterpart of transforming annihilation operators.
using ModeMap = std::map<std::size_t, std::vector<std::pair<Mode, Complex>>>;
FockState transform_creators(const FockState& s, const ModeMap& map);

/// One line per term: "n0,n1,...,n11<TAB>re<TAB>im", canonical mode order.
std::string to_text(const FockState& s);

}  // namespace fock
}  // namespace fourphoton
