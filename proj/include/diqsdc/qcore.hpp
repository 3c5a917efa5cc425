#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>
#include <utility>

#include "diqsdc/random.hpp"

// Exact simulation of a single two-qubit system. The first tensor factor is
// side A (the qubit that travels to and from Alice), the second is side B
// (the qubit Bob keeps).
namespace diqsdc::qcore {

using Amplitude = std::complex<double>;
using Matrix2 = std::array<std::array<Amplitude, 2>, 2>;

inline constexpr double kTolerance = 1e-9;

enum class Side : std::uint8_t { A, B };

enum class BellLabel : std::uint8_t { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };
inline constexpr std::array<BellLabel, 4> kBellLabels = {
    BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus};

enum class SingleQubitOp : std::uint8_t { Id, SigmaX, ISigmaY, SigmaZ, Had, ISigmaYHad };
inline constexpr std::array<SingleQubitOp, 4> kPaulis = {
    SingleQubitOp::Id, SingleQubitOp::SigmaX, SingleQubitOp::ISigmaY, SingleQubitOp::SigmaZ};
inline constexpr std::array<SingleQubitOp, 4> kCoverOps = {
    SingleQubitOp::Id, SingleQubitOp::ISigmaY, SingleQubitOp::Had, SingleQubitOp::ISigmaYHad};
inline constexpr std::array<SingleQubitOp, 6> kAllOps = {
    SingleQubitOp::Id, SingleQubitOp::SigmaX, SingleQubitOp::ISigmaY,
    SingleQubitOp::SigmaZ, SingleQubitOp::Had, SingleQubitOp::ISigmaYHad};

enum class Outcome : std::int8_t { Plus = 1, Minus = -1 };

inline int sign(Outcome o) { return static_cast<int>(o); }

// Measurement basis {(|0> + e^{i theta}|1>)/sqrt2, (|0> - e^{i theta}|1>)/sqrt2}.
struct RotatedBasis {
  double theta = 0.0;
};

std::string_view name(BellLabel label);
std::string_view name(SingleQubitOp op);
std::string_view name(Side side);

const Matrix2& matrix(SingleQubitOp op);
Matrix2 adjoint(const Matrix2& m);
Matrix2 multiply(const Matrix2& lhs, const Matrix2& rhs);

// Normalized two-qubit pure state over |00>, |01>, |10>, |11>.
class PairState {
 public:
  // Throws std::invalid_argument on non-finite input or a norm that is not 1
  // within kTolerance.
  explicit PairState(const std::array<Amplitude, 4>& amplitudes);

  // Rescales an arbitrary nonzero vector to unit norm.
  static PairState normalized(const std::array<Amplitude, 4>& amplitudes);

  const std::array<Amplitude, 4>& amplitudes() const { return amp_; }
  const Amplitude& operator[](std::size_t i) const { return amp_[i]; }

  double norm_squared() const;

 private:
  std::array<Amplitude, 4> amp_;
};

Amplitude inner_product(const PairState& bra, const PairState& ket);

// |<a|b>| == 1 within tol; insensitive to global phase.
bool equal_up_to_phase(const PairState& a, const PairState& b, double tol = kTolerance);

PairState bell_state(BellLabel label);

PairState apply_to_side(const PairState& state, Side side, const Matrix2& u);
PairState apply_to_side(const PairState& state, Side side, SingleQubitOp op);

struct BellDistribution {
  std::array<double, 4> p{};
  double operator[](BellLabel label) const { return p[static_cast<std::size_t>(label)]; }
};

BellDistribution bell_probabilities(const PairState& state);

// When `state` is (up to phase) a Bell state, returns its label.
bool is_bell_state(const PairState& state, BellLabel* label_out = nullptr);

// Consumes the pair; no post-measurement state exists.
BellLabel measure_bell(const PairState& state, RandomSource& rng);

double outcome_probability(const PairState& state, Side side, RotatedBasis basis, Outcome outcome);

std::pair<Outcome, PairState> measure_rotated(const PairState& state, Side side,
                                              RotatedBasis basis, RandomSource& rng);

// Analytic E[a*b] for side A measured at theta_a and side B at theta_b.
double correlator(const PairState& state, double theta_a, double theta_b);

// With probability p, one of the four Paulis (uniform) hits `side`.
PairState apply_pauli_noise(const PairState& state, Side side, double p, RandomSource& rng);

}  // namespace diqsdc::qcore
