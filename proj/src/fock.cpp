#include "fourphoton/fock.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace fourphoton::fock {

std::string to_string(Mode m) {
  static constexpr const char* kPaths[] = {"P1", "P2", "P3in", "P4in", "D3out", "D4out"};
  std::string out = kPaths[static_cast<int>(m.path)];
  out += m.pol == Pol::X ? 'x' : 'y';
  return out;
}

int Occupation::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), 0);
}

Occupation Occupation::raised(Mode m) const {
  if (total() >= kMaxPhotons) {
    throw CapacityError("creation in mode " + to_string(m) + " exceeds the " +
                        std::to_string(kMaxPhotons) + "-photon cap");
  }
  Occupation out = *this;
  ++out.counts_[m.index()];
  return out;
}

Occupation Occupation::lowered(Mode m) const {
  Occupation out = *this;
  --out.counts_[m.index()];
  return out;
}

Occupation make_occupation(std::initializer_list<std::pair<Mode, int>> entries) {
  Occupation occ;
  for (const auto& [mode, count] : entries) {
    for (int i = 0; i < count; ++i) occ = occ.raised(mode);
  }
  return occ;
}

FockState FockState::vacuum() { return basis(Occupation{}); }

FockState FockState::basis(const Occupation& occ, Complex amplitude) {
  FockState s;
  s.add(occ, amplitude);
  return s;
}

void FockState::add(const Occupation& occ, Complex amplitude) {
  if (amplitude == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(occ, amplitude);
  if (!inserted) {
    it->second += amplitude;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

Complex FockState::amplitude(const Occupation& occ) const {
  auto it = terms_.find(occ);
  return it == terms_.end() ? Complex{} : it->second;
}

double FockState::norm_squared() const {
  double sum = 0.0;
  for (const auto& [occ, amp] : terms_) sum += std::norm(amp);
  return sum;
}

FockState& FockState::prune() {
  const double cutoff = kDropout * std::sqrt(norm_squared());
  std::erase_if(terms_, [cutoff](const auto& kv) { return std::abs(kv.second) < cutoff; });
  return *this;
}

FockState& FockState::operator+=(const FockState& other) {
  for (const auto& [occ, amp] : other.terms_) add(occ, amp);
  return *this;
}

FockState& FockState::operator*=(Complex scale) {
  if (scale == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [occ, amp] : terms_) amp *= scale;
  return *this;
}

OperatorExpr OperatorExpr::identity() {
  OperatorExpr e;
  e.terms_.push_back(Monomial{});
  return e;
}

OperatorExpr OperatorExpr::annihilate(Mode m) {
  OperatorExpr e;
  e.terms_.push_back(Monomial{1.0, {LadderOp{m, Ladder::Annihilate}}});
  return e;
}

OperatorExpr OperatorExpr::create(Mode m) {
  OperatorExpr e;
  e.terms_.push_back(Monomial{1.0, {LadderOp{m, Ladder::Create}}});
  return e;
}

OperatorExpr OperatorExpr::adjoint() const {
  OperatorExpr out;
  out.terms_.reserve(terms_.size());
  for (const auto& term : terms_) {
    Monomial m{std::conj(term.coefficient), {}};
    m.factors.reserve(term.factors.size());
    for (auto it = term.factors.rbegin(); it != term.factors.rend(); ++it) {
      m.factors.push_back(
          {it->mode, it->kind == Ladder::Create ? Ladder::Annihilate : Ladder::Create});
    }
    out.terms_.push_back(std::move(m));
  }
  return out;
}

OperatorExpr& OperatorExpr::operator+=(const OperatorExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

OperatorExpr& OperatorExpr::operator*=(Complex scale) {
  for (auto& t : terms_) t.coefficient *= scale;
  return *this;
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
  OperatorExpr out;
  out.terms_.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      Monomial m{ta.coefficient * tb.coefficient, ta.factors};
      m.factors.insert(m.factors.end(), tb.factors.begin(), tb.factors.end());
      out.terms_.push_back(std::move(m));
    }
  }
  return out;
}

namespace {

// Applies one monomial to a basis state. Returns false when the result vanishes.
bool apply_monomial(const Monomial& term, Occupation& occ, Complex& amp) {
  amp *= term.coefficient;
  for (auto it = term.factors.rbegin(); it != term.factors.rend(); ++it) {
    const int n = occ[it->mode];
    if (it->kind == Ladder::Annihilate) {
      if (n == 0) return false;
      amp *= std::sqrt(static_cast<double>(n));
      occ = occ.lowered(it->mode);
    } else {
      occ = occ.raised(it->mode);
      amp *= std::sqrt(static_cast<double>(n + 1));
    }
  }
  return true;
}

}  // namespace

FockState apply(const OperatorExpr& expr, const FockState& s) {
  FockState out;
  for (const auto& term : expr.terms()) {
    for (const auto& [occ, amp] : s.terms()) {
      Occupation o = occ;
      Complex a = amp;
      if (apply_monomial(term, o, a)) out.add(o, a);
    }
  }
  return out.prune();
}

Complex inner_product(const FockState& a, const FockState& b) {
  Complex sum{};
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& [occ, amp] : small.terms()) {
    auto it = large.terms().find(occ);
    if (it == large.terms().end()) continue;
    sum += &small == &a ? std::conj(amp) * it->second : std::conj(it->second) * amp;
  }
  return sum;
}

double expectation_abs2(const OperatorExpr& expr, const FockState& s) {
  return apply(expr, s).norm_squared();
}

FockState transform_creators(const FockState& s, const ModeMap& map) {
  FockState out;
  for (const auto& [occ, amp] : s.terms()) {
    OperatorExpr builder = OperatorExpr::identity();
    double factorial = 1.0;
    for (std::size_t i = 0; i < kModeCount; ++i) {
      const Mode mode = Mode::from_index(i);
      const int n = occ[mode];
      if (n == 0) continue;
      OperatorExpr creator;
      if (auto it = map.find(i); it != map.end()) {
        for (const auto& [target, coeff] : it->second) {
          creator += coeff * OperatorExpr::create(target);
        }
      } else {
        creator = OperatorExpr::create(mode);
      }
      for (int k = 1; k <= n; ++k) {
        builder = creator * builder;
        factorial *= k;
      }
    }
    FockState piece = apply(builder, FockState::vacuum());
    piece *= amp / std::sqrt(factorial);
    out += piece;
  }
  return out.prune();
}

std::string to_text(const FockState& s) {
  std::string out;
  char buf[64];
  for (const auto& [occ, amp] : s.terms()) {
    for (std::size_t i = 0; i < kModeCount; ++i) {
      if (i) out += ',';
      out += std::to_string(occ.counts()[i]);
    }
    std::snprintf(buf, sizeof buf, "\t%.17g\t%.17g\n", amp.real(), amp.imag());
    out += buf;
  }
  return out;
}

}  // namespace fourphoton::fock
