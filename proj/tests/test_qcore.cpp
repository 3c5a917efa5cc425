#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "diqsdc/qcore.hpp"
#include "oracle.hpp"

using namespace diqsdc;
using namespace diqsdc::qcore;

namespace {

constexpr double kTol = 1e-12;

oracle::Vec4 to_vec(const PairState& s) { return s.amplitudes(); }

PairState from_vec(const oracle::Vec4& v) { return PairState(v); }

oracle::Mat2 reference_matrix(SingleQubitOp op) {
  switch (op) {
    case SingleQubitOp::Id: return oracle::kId;
    case SingleQubitOp::SigmaX: return oracle::kX;
    case SingleQubitOp::ISigmaY: return oracle::kISigmaY;
    case SingleQubitOp::SigmaZ: return oracle::kZ;
    case SingleQubitOp::Had: return oracle::kHad;
    case SingleQubitOp::ISigmaYHad: return oracle::mul(oracle::kISigmaY, oracle::kHad);
  }
  return oracle::kId;
}

void expect_vec_near(const oracle::Vec4& a, const oracle::Vec4& b, double tol = kTol) {
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(a[i].real(), b[i].real(), tol) << "i=" << i;
    EXPECT_NEAR(a[i].imag(), b[i].imag(), tol) << "i=" << i;
  }
}

PairState random_state(RandomSource& rng) {
  std::array<Amplitude, 4> raw{};
  for (auto& a : raw) a = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  return PairState::normalized(raw);
}

}  // namespace

TEST(Qcore, BellStatesMatchLiteralVectors) {
  for (int l = 0; l < 4; ++l) expect_vec_near(to_vec(bell_state(kBellLabels[l])), oracle::bell(l));
}

TEST(Qcore, OperatorMatricesMatchLiterals) {
  for (SingleQubitOp op : kAllOps) {
    const auto& m = matrix(op);
    const auto ref = reference_matrix(op);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(m[i][j] - ref[i][j]), 0.0, kTol) << name(op);
  }
}

TEST(Qcore, PairStateRejectsBadInput) {
  EXPECT_THROW(PairState({1.0, 1.0, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(PairState({std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(PairState::normalized({0.0, 0.0, 0.0, 0.0}), std::invalid_argument);
  EXPECT_NO_THROW(PairState({0.0, 0.0, 1.0, 0.0}));
}

TEST(Qcore, ApplyToSideMatchesKroneckerProduct) {
  RandomSource rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const PairState s = random_state(rng);
    for (SingleQubitOp op : kAllOps) {
      const auto u = reference_matrix(op);
      expect_vec_near(to_vec(apply_to_side(s, Side::A, op)), oracle::apply(oracle::kron(u, oracle::kId), to_vec(s)));
      expect_vec_near(to_vec(apply_to_side(s, Side::B, op)), oracle::apply(oracle::kron(oracle::kId, u), to_vec(s)));
    }
  }
}

TEST(Qcore, UnitaryRoundTripRestoresState) {
  RandomSource rng(12);
  const PairState s = random_state(rng);
  for (SingleQubitOp op : kAllOps) {
    for (Side side : {Side::A, Side::B}) {
      const auto back = apply_to_side(apply_to_side(s, side, op), side, adjoint(matrix(op)));
      expect_vec_near(to_vec(back), to_vec(s), 1e-12);
    }
  }
}

TEST(Qcore, BellProbabilitiesMatchOverlaps) {
  RandomSource rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const PairState s = random_state(rng);
    const auto dist = bell_probabilities(s);
    double total = 0;
    for (int l = 0; l < 4; ++l) {
      EXPECT_NEAR(dist.p[l], oracle::fidelity(oracle::bell(l), to_vec(s)), kTol);
      total += dist.p[l];
    }
    EXPECT_NEAR(total, 1.0, kTol);
  }
}

TEST(Qcore, IsBellStateIgnoresGlobalPhase) {
  for (BellLabel l : kBellLabels) {
    auto v = to_vec(bell_state(l));
    for (auto& a : v) a *= std::polar(1.0, 0.7);
    BellLabel found{};
    ASSERT_TRUE(is_bell_state(from_vec(v), &found));
    EXPECT_EQ(found, l);
  }
  EXPECT_FALSE(is_bell_state(PairState({1.0, 0.0, 0.0, 0.0})));
}

TEST(Qcore, XBasisExpansionsOfBellStates) {
  const oracle::Vec4 pp{0.5, 0.5, 0.5, 0.5}, mm{0.5, -0.5, -0.5, 0.5};
  const oracle::Vec4 pm{0.5, -0.5, 0.5, -0.5}, mp{0.5, 0.5, -0.5, -0.5};
  auto sum = [](const oracle::Vec4& a, double s, const oracle::Vec4& b) {
    oracle::Vec4 r{};
    for (int i = 0; i < 4; ++i) r[i] = oracle::kH * (a[i] + s * b[i]);
    return PairState(r);
  };
  EXPECT_TRUE(equal_up_to_phase(bell_state(BellLabel::PhiPlus), sum(pp, 1, mm)));
  EXPECT_TRUE(equal_up_to_phase(bell_state(BellLabel::PhiMinus), sum(pm, 1, mp)));
  EXPECT_TRUE(equal_up_to_phase(bell_state(BellLabel::PsiPlus), sum(pp, -1, mm)));
  EXPECT_TRUE(equal_up_to_phase(bell_state(BellLabel::PsiMinus), sum(pm, -1, mp)));
}

TEST(Qcore, OutcomeProbabilityMatchesProjector) {
  RandomSource rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const PairState s = random_state(rng);
    const double theta = rng.uniform() * 2 * std::numbers::pi;
    for (int sgn : {1, -1}) {
      const auto p = oracle::projector(theta, sgn);
      const Outcome o = sgn > 0 ? Outcome::Plus : Outcome::Minus;
      EXPECT_NEAR(outcome_probability(s, Side::A, {theta}, o), oracle::born(to_vec(s), oracle::kron(p, oracle::kId)),
                  kTol);
      EXPECT_NEAR(outcome_probability(s, Side::B, {theta}, o), oracle::born(to_vec(s), oracle::kron(oracle::kId, p)),
                  kTol);
    }
  }
}

TEST(Qcore, MeasureRotatedCollapsesOntoEigenstate) {
  RandomSource rng(15);
  const PairState s = bell_state(BellLabel::PsiPlus);
  const double theta = std::numbers::pi / 3;
  for (int trial = 0; trial < 20; ++trial) {
    const auto [outcome, post] = measure_rotated(s, Side::A, {theta}, rng);
    EXPECT_NEAR(outcome_probability(post, Side::A, {theta}, outcome), 1.0, 1e-12);
    // Psi+ correlates perfectly when both sides use the same angle.
    EXPECT_NEAR(outcome_probability(post, Side::B, {theta}, outcome), 1.0, 1e-12);
  }
}

TEST(Qcore, MeasureRotatedFrequencies) {
  RandomSource rng(16);
  const PairState s = PairState::normalized({1.0, 0.0, 0.0, 0.0});
  // |0> gives + with probability 1/2 in any equatorial basis.
  int plus = 0;
  constexpr int kShots = 20000;
  for (int i = 0; i < kShots; ++i) plus += measure_rotated(s, Side::A, {0.3}, rng).first == Outcome::Plus;
  EXPECT_NEAR(plus / double(kShots), 0.5, 5 * std::sqrt(0.25 / kShots));
}

TEST(Qcore, CorrelatorMatchesBornRule) {
  const std::array<double, 5> angles = {0.0, std::numbers::pi / 4, -std::numbers::pi / 4, std::numbers::pi / 2, 1.1};
  for (int l = 0; l < 4; ++l) {
    for (double a : angles) {
      for (double b : angles) {
        EXPECT_NEAR(correlator(bell_state(kBellLabels[l]), a, b), oracle::correlator(oracle::bell(l), a, b), 1e-12);
      }
    }
  }
  EXPECT_NEAR(correlator(bell_state(BellLabel::PsiPlus), 0.4, 0.1), std::cos(0.3), 1e-12);
  EXPECT_NEAR(correlator(bell_state(BellLabel::PsiMinus), 0.4, 0.1), -std::cos(0.3), 1e-12);
  EXPECT_NEAR(correlator(bell_state(BellLabel::PhiPlus), 0.4, 0.1), std::cos(0.5), 1e-12);
}

TEST(Qcore, MeasureBellFrequencies) {
  RandomSource rng(17);
  const PairState s = PairState::normalized({1.0, 1.0, 0.0, 0.0});  // |0>|+>
  std::array<int, 4> counts{};
  constexpr int kShots = 40000;
  for (int i = 0; i < kShots; ++i) ++counts[static_cast<int>(measure_bell(s, rng))];
  for (int l = 0; l < 4; ++l) {
    const double p = oracle::fidelity(oracle::bell(l), to_vec(s));
    EXPECT_NEAR(counts[l] / double(kShots), p, 5 * std::sqrt(p * (1 - p) / kShots) + 1e-12);
  }
}

TEST(Qcore, PauliNoiseEdgeCases) {
  RandomSource rng(18);
  const RandomSource before = rng;
  const PairState s = bell_state(BellLabel::PhiPlus);
  expect_vec_near(to_vec(apply_pauli_noise(s, Side::A, 0.0, rng)), to_vec(s));
  EXPECT_EQ(rng, before);
  EXPECT_THROW(apply_pauli_noise(s, Side::A, -0.1, rng), std::invalid_argument);
  EXPECT_THROW(apply_pauli_noise(s, Side::A, 1.5, rng), std::invalid_argument);
}

TEST(Qcore, FullPauliTwirlIsUniform) {
  RandomSource rng(19);
  std::array<int, 4> counts{};
  constexpr int kShots = 40000;
  for (int i = 0; i < kShots; ++i) {
    BellLabel l{};
    ASSERT_TRUE(is_bell_state(apply_pauli_noise(bell_state(BellLabel::PsiMinus), Side::B, 1.0, rng), &l));
    ++counts[static_cast<int>(l)];
  }
  for (int c : counts) EXPECT_NEAR(c / double(kShots), 0.25, 5 * std::sqrt(0.1875 / kShots));
}
