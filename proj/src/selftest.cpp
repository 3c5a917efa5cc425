#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "diqsdc/qcore.hpp"
#include "diqsdc/simcli.hpp"

namespace diqsdc::simcli {

namespace {

using qcore::Amplitude;
using qcore::BellLabel;
using qcore::PairState;
using qcore::Side;
using qcore::SingleQubitOp;

constexpr double kTol = 1e-9;

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

PairState product(const std::array<Amplitude, 2>& a, const std::array<Amplitude, 2>& b) {
  return PairState({a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]});
}

PairState combine(Amplitude ca, const PairState& a, Amplitude cb, const PairState& b) {
  std::array<Amplitude, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = ca * a[i] + cb * b[i];
  return PairState::normalized(out);
}

std::string label(BellLabel l) { return std::string(qcore::name(l)); }
std::string label(SingleQubitOp op) { return std::string(qcore::name(op)); }

void normalization() {
  for (BellLabel l : qcore::kBellLabels) {
    require(std::abs(qcore::bell_state(l).norm_squared() - 1.0) < kTol, "bell state " + label(l));
    for (SingleQubitOp op : qcore::kAllOps) {
      for (Side side : {Side::A, Side::B}) {
        const auto s = qcore::apply_to_side(qcore::bell_state(l), side, op);
        require(std::abs(s.norm_squared() - 1.0) < kTol, label(op) + " on " + label(l));
      }
    }
  }
}

void unitarity_roundtrip() {
  for (SingleQubitOp op : qcore::kAllOps) {
    const auto& u = qcore::matrix(op);
    const auto prod = qcore::multiply(qcore::adjoint(u), u);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 2; ++c) {
        require(std::abs(prod[r][c] - Amplitude(r == c ? 1.0 : 0.0)) < kTol, "U^dagger U for " + label(op));
      }
    }
    for (BellLabel l : qcore::kBellLabels) {
      for (Side side : {Side::A, Side::B}) {
        const auto there = qcore::apply_to_side(qcore::bell_state(l), side, u);
        const auto back = qcore::apply_to_side(there, side, qcore::adjoint(u));
        require(std::abs(qcore::inner_product(qcore::bell_state(l), back) - Amplitude(1.0)) < kTol,
                "round trip of " + label(op) + " on " + label(l));
      }
    }
  }
}

void probability_sums() {
  RandomSource rng(0x5e1f);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<Amplitude, 4> raw{};
    for (auto& a : raw) a = {rng.uniform() - 0.5, rng.uniform() - 0.5};
    const auto s = PairState::normalized(raw);
    const auto dist = qcore::bell_probabilities(s);
    double total = 0.0;
    for (double p : dist.p) total += p;
    require(std::abs(total - 1.0) < kTol, "bell distribution sum");
    const qcore::RotatedBasis basis{rng.uniform() * 2.0 * std::numbers::pi};
    for (Side side : {Side::A, Side::B}) {
      const double sum = qcore::outcome_probability(s, side, basis, qcore::Outcome::Plus) +
                         qcore::outcome_probability(s, side, basis, qcore::Outcome::Minus);
      require(std::abs(sum - 1.0) < kTol, "rotated outcome sum");
    }
  }
}

void x_basis_identities() {
  const double h = 1.0 / std::numbers::sqrt2;
  const std::array<Amplitude, 2> plus{h, h};
  const std::array<Amplitude, 2> minus{h, -h};
  const auto pp = product(plus, plus), mm = product(minus, minus);
  const auto pm = product(plus, minus), mp = product(minus, plus);
  const std::array<std::pair<BellLabel, PairState>, 4> cases = {{
      {BellLabel::PhiPlus, combine(1.0, pp, 1.0, mm)},
      {BellLabel::PhiMinus, combine(1.0, pm, 1.0, mp)},
      {BellLabel::PsiPlus, combine(1.0, pp, -1.0, mm)},
      {BellLabel::PsiMinus, combine(1.0, pm, -1.0, mp)},
  }};
  for (const auto& [l, s] : cases) {
    require(qcore::equal_up_to_phase(qcore::bell_state(l), s), label(l));
  }
}

void table1_roundtrip() {
  const std::array<BellLabel, 4> phi_plus_row = {BellLabel::PhiPlus, BellLabel::PsiPlus, BellLabel::PsiMinus,
                                                 BellLabel::PhiMinus};
  for (BellLabel initial : qcore::kBellLabels) {
    for (std::uint8_t v = 0; v < 4; ++v) {
      const auto final = protocol::bell_transition(initial, protocol::pauli_for_bits(v));
      require(protocol::bits_for_transition(initial, final) == v, "decode " + label(initial));
      if (initial == BellLabel::PhiPlus) require(final == phi_plus_row[v], "row " + label(initial));
    }
  }
}

void table2_roundtrip() {
  for (std::uint8_t alice = 0; alice < 2; ++alice) {
    for (std::uint8_t bob = 0; bob < 2; ++bob) {
      for (BellLabel prepared : protocol::qd_prepare_family(bob)) {
        for (SingleQubitOp op : protocol::qd_op_family(alice)) {
          const auto final = protocol::bell_transition(prepared, op);
          const auto at_bob = protocol::qd_decode(prepared, final, std::nullopt);
          const auto at_alice = protocol::qd_decode(std::nullopt, final, op);
          require(at_bob.alice_bit == alice && at_bob.bob_bit == bob, "bob view " + label(prepared));
          require(at_alice.alice_bit == alice && at_alice.bob_bit == bob, "alice view " + label(op));
        }
      }
    }
  }
}

void pauli_composition() {
  for (BellLabel initial : qcore::kBellLabels) {
    for (SingleQubitOp op : qcore::kPaulis) {
      const auto s = qcore::apply_to_side(qcore::bell_state(initial), Side::A, op);
      BellLabel found{};
      require(qcore::is_bell_state(s, &found), label(op) + " on " + label(initial) + " leaves the Bell basis");
      require(found == protocol::bell_transition(initial, op), label(op) + " on " + label(initial));
    }
  }
}

void chsh_frame_correction() {
  for (BellLabel l : qcore::kBellLabels) {
    const double s = protocol::chsh_analytic(qcore::bell_state(l), l);
    require(std::abs(s - 2.0 * std::numbers::sqrt2) < kTol, "S for " + label(l));
  }
}

void pauli_twirl() {
  RandomSource rng(0x7714);
  constexpr std::size_t kSamples = 8000;
  std::array<std::size_t, 4> counts{};
  for (std::size_t i = 0; i < kSamples; ++i) {
    const auto s = qcore::apply_pauli_noise(qcore::bell_state(BellLabel::PhiPlus), Side::A, 1.0, rng);
    BellLabel found{};
    require(qcore::is_bell_state(s, &found), "twirled state leaves the Bell basis");
    ++counts[static_cast<std::size_t>(found)];
  }
  for (std::size_t c : counts) {
    require(std::abs(static_cast<double>(c) / kSamples - 0.25) < 0.03, "twirl frequency");
  }
}

void bell_sampling() {
  RandomSource rng(0xbe11);
  const auto s = combine(std::sqrt(0.75), qcore::bell_state(BellLabel::PhiPlus), std::sqrt(0.25),
                         qcore::bell_state(BellLabel::PsiMinus));
  constexpr std::size_t kSamples = 8000;
  std::array<std::size_t, 4> counts{};
  for (std::size_t i = 0; i < kSamples; ++i) ++counts[static_cast<std::size_t>(qcore::measure_bell(s, rng))];
  require(counts[1] == 0 && counts[2] == 0, "zero-probability outcome sampled");
  require(std::abs(static_cast<double>(counts[0]) / kSamples - 0.75) < 0.03, "Phi+ frequency");
}

void honest_run() {
  protocol::ProtocolConfig config;
  config.seed = 20240101;
  const auto inputs = protocol::complete_inputs(config, {});
  const auto report = protocol::run_protocol(config, inputs);
  require(!report.abort, "honest run aborted: " + report.abort_detail);
  require(report.delivered_message && *report.delivered_message == inputs.message, "message corrupted");
}

}  // namespace

std::vector<SuiteResult> run_selftest() {
  const std::vector<std::pair<std::string, std::function<void()>>> suites = {
      {"normalization", normalization},
      {"unitarity-roundtrip", unitarity_roundtrip},
      {"probability-sums", probability_sums},
      {"x-basis-identities", x_basis_identities},
      {"table1-roundtrip", table1_roundtrip},
      {"table2-roundtrip", table2_roundtrip},
      {"pauli-composition", pauli_composition},
      {"chsh-frame-correction", chsh_frame_correction},
      {"pauli-twirl", pauli_twirl},
      {"bell-sampling", bell_sampling},
      {"honest-run", honest_run},
  };
  std::vector<SuiteResult> results;
  for (const auto& [name, body] : suites) {
    SuiteResult r{name, true, ""};
    try {
      body();
    } catch (const Failure& f) {
      r.passed = false;
      r.detail = f.what;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace diqsdc::simcli
