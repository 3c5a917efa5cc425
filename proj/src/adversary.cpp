#include "diqsdc/adversary.hpp"

#include <stdexcept>

namespace diqsdc::adversary {

std::string_view name(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::InterceptResend: return "intercept-resend";
    case AttackKind::ImpersonateAlice: return "impersonate-alice";
    case AttackKind::ImpersonateBob: return "impersonate-bob";
  }
  return "?";
}

std::string_view name(AppliesTo applies) {
  switch (applies) {
    case AppliesTo::FirstTransmission: return "first";
    case AppliesTo::SecondTransmission: return "second";
    case AppliesTo::Both: return "both";
  }
  return "?";
}

bool AdversarySpec::intercepts(Transmission t) const {
  if (kind != AttackKind::InterceptResend) return false;
  switch (applies_to) {
    case AppliesTo::FirstTransmission: return t == Transmission::First;
    case AppliesTo::SecondTransmission: return t == Transmission::Second;
    case AppliesTo::Both: return true;
  }
  return false;
}

PairState intercept_resend(const PairState& state, Side side, InterceptBasis basis, RandomSource& rng) {
  if (basis == InterceptBasis::X) {
    return qcore::measure_rotated(state, side, {0.0}, rng).second;
  }
  // Z measurement as an X measurement conjugated by a Hadamard.
  const PairState rotated = qcore::apply_to_side(state, side, qcore::SingleQubitOp::Had);
  const PairState collapsed = qcore::measure_rotated(rotated, side, {0.0}, rng).second;
  return qcore::apply_to_side(collapsed, side, qcore::SingleQubitOp::Had);
}

PairState transit(const PairState& state, Side side, const ChannelModel& channel, const AdversarySpec& spec,
                  Transmission transmission, RandomSource& rng) {
  PairState out = state;
  if (spec.intercepts(transmission)) {
    const InterceptBasis basis = rng.bernoulli(spec.intercept_basis_mix) ? InterceptBasis::Z : InterceptBasis::X;
    out = intercept_resend(out, side, basis, rng);
  }
  return qcore::apply_pauli_noise(out, side, channel.noise_p, rng);
}

PairState store(const PairState& state, const ChannelModel& channel, RandomSource& rng) {
  const PairState a = qcore::apply_pauli_noise(state, Side::A, channel.storage_noise_p, rng);
  return qcore::apply_pauli_noise(a, Side::B, channel.storage_noise_p, rng);
}

AliceEncoding impersonate_alice_encode(BobPreparation& prep, const CheckedMessage& m_prime, RandomSource& rng) {
  const protocol::Identity guess = protocol::random_bits(2 * prep.identity.size(), rng);
  return protocol::alice_encode(prep, m_prime, guess, rng);
}

BobPreparation impersonate_bob_prepare(const ProtocolConfig& config, RandomSource& rng) {
  const protocol::Identity guess = protocol::random_bits(2 * config.k, rng);
  return protocol::bob_prepare(config, guess, rng);
}

AliceEncoding impersonate_alice_encode_qd(BobPreparation& prep, const CheckedMessage& a_prime, RandomSource& rng) {
  const protocol::Identity guess = protocol::random_bits(2 * prep.identity.size(), rng);
  return protocol::qd_alice_encode(prep, a_prime, guess, rng);
}

BobPreparation impersonate_bob_prepare_qd(const ProtocolConfig& config, const protocol::BitString& b_prime,
                                          RandomSource& rng) {
  const protocol::Identity guess = protocol::random_bits(2 * config.k, rng);
  return protocol::qd_bob_prepare(config, guess, b_prime, rng);
}

}  // namespace diqsdc::adversary
