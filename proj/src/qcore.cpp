#include "diqsdc/qcore.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace diqsdc::qcore {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
constexpr Amplitude kZero{0.0, 0.0};
constexpr Amplitude kOne{1.0, 0.0};

std::size_t index_of(std::size_t a, std::size_t b) { return 2 * a + b; }

// Amplitudes of (|0> + s e^{i theta}|1>)/sqrt2.
std::array<Amplitude, 2> basis_vector(RotatedBasis basis, Outcome outcome) {
  const Amplitude phase = std::polar(1.0, basis.theta) * static_cast<double>(sign(outcome));
  return {Amplitude{kInvSqrt2, 0.0}, phase * kInvSqrt2};
}

// Unnormalized conditional state of the other qubit after projecting `side`
// onto the given basis vector.
std::array<Amplitude, 2> project_side(const PairState& state, Side side,
                                      const std::array<Amplitude, 2>& v) {
  std::array<Amplitude, 2> rest{};
  for (std::size_t other = 0; other < 2; ++other) {
    for (std::size_t own = 0; own < 2; ++own) {
      const std::size_t idx = side == Side::A ? index_of(own, other) : index_of(other, own);
      rest[other] += std::conj(v[own]) * state[idx];
    }
  }
  return rest;
}

void require_finite(const Amplitude& a) {
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
    throw std::invalid_argument("PairState: non-finite amplitude");
  }
}

}  // namespace

std::string_view name(BellLabel label) {
  switch (label) {
    case BellLabel::PhiPlus: return "PhiPlus";
    case BellLabel::PhiMinus: return "PhiMinus";
    case BellLabel::PsiPlus: return "PsiPlus";
    case BellLabel::PsiMinus: return "PsiMinus";
  }
  return "?";
}

std::string_view name(SingleQubitOp op) {
  switch (op) {
    case SingleQubitOp::Id: return "Id";
    case SingleQubitOp::SigmaX: return "SigmaX";
    case SingleQubitOp::ISigmaY: return "ISigmaY";
    case SingleQubitOp::SigmaZ: return "SigmaZ";
    case SingleQubitOp::Had: return "Had";
    case SingleQubitOp::ISigmaYHad: return "ISigmaYHad";
  }
  return "?";
}

std::string_view name(Side side) { return side == Side::A ? "A" : "B"; }

Matrix2 multiply(const Matrix2& lhs, const Matrix2& rhs) {
  Matrix2 out{};
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t k = 0; k < 2; ++k) out[r][c] += lhs[r][k] * rhs[k][c];
  return out;
}

Matrix2 adjoint(const Matrix2& m) {
  return {{{std::conj(m[0][0]), std::conj(m[1][0])}, {std::conj(m[0][1]), std::conj(m[1][1])}}};
}

const Matrix2& matrix(SingleQubitOp op) {
  static const std::array<Matrix2, 6> table = [] {
    const Matrix2 id{{{kOne, kZero}, {kZero, kOne}}};
    const Matrix2 x{{{kZero, kOne}, {kOne, kZero}}};
    // i*sigma_y = |0><1| - |1><0|
    const Matrix2 iy{{{kZero, kOne}, {-kOne, kZero}}};
    const Matrix2 z{{{kOne, kZero}, {kZero, -kOne}}};
    Matrix2 h{};
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) h[r][c] = (x[r][c] + z[r][c]) * kInvSqrt2;
    return std::array<Matrix2, 6>{id, x, iy, z, h, multiply(iy, h)};
  }();
  return table[static_cast<std::size_t>(op)];
}

PairState::PairState(const std::array<Amplitude, 4>& amplitudes) : amp_(amplitudes) {
  for (const auto& a : amp_) require_finite(a);
  if (std::abs(norm_squared() - 1.0) > kTolerance) {
    throw std::invalid_argument("PairState: amplitudes are not normalized");
  }
}

PairState PairState::normalized(const std::array<Amplitude, 4>& amplitudes) {
  double total = 0.0;
  for (const auto& a : amplitudes) {
    require_finite(a);
    total += std::norm(a);
  }
  if (!(total > 0.0)) throw std::invalid_argument("PairState: zero vector");
  const double scale = 1.0 / std::sqrt(total);
  std::array<Amplitude, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = amplitudes[i] * scale;
  return PairState(out);
}

double PairState::norm_squared() const {
  double total = 0.0;
  for (const auto& a : amp_) total += std::norm(a);
  return total;
}

Amplitude inner_product(const PairState& bra, const PairState& ket) {
  Amplitude total{};
  for (std::size_t i = 0; i < 4; ++i) total += std::conj(bra[i]) * ket[i];
  return total;
}

bool equal_up_to_phase(const PairState& a, const PairState& b, double tol) {
  return std::abs(std::abs(inner_product(a, b)) - 1.0) <= tol;
}

PairState bell_state(BellLabel label) {
  const Amplitude h{kInvSqrt2, 0.0};
  switch (label) {
    case BellLabel::PhiPlus: return PairState({h, kZero, kZero, h});
    case BellLabel::PhiMinus: return PairState({h, kZero, kZero, -h});
    case BellLabel::PsiPlus: return PairState({kZero, h, h, kZero});
    case BellLabel::PsiMinus: return PairState({kZero, h, -h, kZero});
  }
  throw std::invalid_argument("bell_state: bad label");
}

PairState apply_to_side(const PairState& state, Side side, const Matrix2& u) {
  std::array<Amplitude, 4> out{};
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      Amplitude acc{};
      for (std::size_t k = 0; k < 2; ++k) {
        acc += side == Side::A ? u[a][k] * state[index_of(k, b)] : u[b][k] * state[index_of(a, k)];
      }
      out[index_of(a, b)] = acc;
    }
  }
  // Renormalize to absorb rounding.
  return PairState::normalized(out);
}

PairState apply_to_side(const PairState& state, Side side, SingleQubitOp op) {
  return apply_to_side(state, side, matrix(op));
}

BellDistribution bell_probabilities(const PairState& state) {
  BellDistribution dist;
  for (BellLabel label : kBellLabels) {
    dist.p[static_cast<std::size_t>(label)] = std::norm(inner_product(bell_state(label), state));
  }
  return dist;
}

bool is_bell_state(const PairState& state, BellLabel* label_out) {
  const BellDistribution dist = bell_probabilities(state);
  for (BellLabel label : kBellLabels) {
    if (std::abs(dist[label] - 1.0) <= kTolerance) {
      if (label_out != nullptr) *label_out = label;
      return true;
    }
  }
  return false;
}

BellLabel measure_bell(const PairState& state, RandomSource& rng) {
  const BellDistribution dist = bell_probabilities(state);
  const double r = rng.uniform();
  double cumulative = 0.0;
  for (BellLabel label : kBellLabels) {
    cumulative += dist[label];
    if (r < cumulative) return label;
  }
  // Rounding left r above the cumulative sum: take the last label that has
  // any weight.
  for (auto it = kBellLabels.rbegin(); it != kBellLabels.rend(); ++it) {
    if (dist[*it] > 0.0) return *it;
  }
  return BellLabel::PsiMinus;
}

double outcome_probability(const PairState& state, Side side, RotatedBasis basis, Outcome outcome) {
  const auto rest = project_side(state, side, basis_vector(basis, outcome));
  return std::norm(rest[0]) + std::norm(rest[1]);
}

std::pair<Outcome, PairState> measure_rotated(const PairState& state, Side side,
                                              RotatedBasis basis, RandomSource& rng) {
  const double p_plus = outcome_probability(state, side, basis, Outcome::Plus);
  const Outcome outcome = rng.uniform() < p_plus ? Outcome::Plus : Outcome::Minus;
  const auto v = basis_vector(basis, outcome);
  const auto rest = project_side(state, side, v);
  std::array<Amplitude, 4> out{};
  for (std::size_t own = 0; own < 2; ++own) {
    for (std::size_t other = 0; other < 2; ++other) {
      const std::size_t idx = side == Side::A ? index_of(own, other) : index_of(other, own);
      out[idx] = v[own] * rest[other];
    }
  }
  return {outcome, PairState::normalized(out)};
}

double correlator(const PairState& state, double theta_a, double theta_b) {
  double total = 0.0;
  for (Outcome oa : {Outcome::Plus, Outcome::Minus}) {
    const auto va = basis_vector(RotatedBasis{theta_a}, oa);
    const auto rest = project_side(state, Side::A, va);
    for (Outcome ob : {Outcome::Plus, Outcome::Minus}) {
      const auto vb = basis_vector(RotatedBasis{theta_b}, ob);
      const Amplitude amp = std::conj(vb[0]) * rest[0] + std::conj(vb[1]) * rest[1];
      total += sign(oa) * sign(ob) * std::norm(amp);
    }
  }
  return total;
}

PairState apply_pauli_noise(const PairState& state, Side side, double p, RandomSource& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("apply_pauli_noise: p outside [0,1]");
  if (p == 0.0 || !rng.bernoulli(p)) return state;
  return apply_to_side(state, side, kPaulis[rng.below(4)]);
}

}  // namespace diqsdc::qcore
