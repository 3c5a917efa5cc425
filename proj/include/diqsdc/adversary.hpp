#pragma once

#include <cstdint>
#include <string_view>

#include "diqsdc/protocol.hpp"
#include "diqsdc/qcore.hpp"
#include "diqsdc/random.hpp"

namespace diqsdc::adversary {

using protocol::AliceEncoding;
using protocol::BobPreparation;
using protocol::CheckedMessage;
using protocol::ProtocolConfig;
using qcore::PairState;
using qcore::Side;

enum class AttackKind : std::uint8_t { None, InterceptResend, ImpersonateAlice, ImpersonateBob };
enum class Transmission : std::uint8_t { First, Second };
enum class AppliesTo : std::uint8_t { FirstTransmission, SecondTransmission, Both };

std::string_view name(AttackKind kind);
std::string_view name(AppliesTo applies);

struct AdversarySpec {
  AttackKind kind = AttackKind::None;
  double intercept_basis_mix = 0.5;  // probability of a Z-basis intercept
  AppliesTo applies_to = AppliesTo::Both;

  bool intercepts(Transmission t) const;
};

struct ChannelModel {
  double noise_p = 0.0;
  double storage_noise_p = 0.0;

  static ChannelModel from(const ProtocolConfig& config) { return {config.noise_p, config.storage_noise_p}; }
};

enum class InterceptBasis : std::uint8_t { Z, X };

// Measures `side` in the given basis and resends the eigenstate it saw.
PairState intercept_resend(const PairState& state, Side side, InterceptBasis basis, RandomSource& rng);

// One qubit crossing the channel: intercept-resend (when active on this
// transmission), then depolarizing noise.
PairState transit(const PairState& state, Side side, const ChannelModel& channel, const AdversarySpec& spec,
                  Transmission transmission, RandomSource& rng);

// One storage epoch in quantum memory: noise on both qubits.
PairState store(const PairState& state, const ChannelModel& channel, RandomSource& rng);

// Eve holds Q_A but not Id_A: she runs Alice's encoding with a uniformly
// random identity in place of Id_A.
AliceEncoding impersonate_alice_encode(BobPreparation& prep, const CheckedMessage& m_prime, RandomSource& rng);

// Eve does not know Id_B: Bob's preparation with every identity pair in a
// uniformly random Bell state.
BobPreparation impersonate_bob_prepare(const ProtocolConfig& config, RandomSource& rng);

// Dialogue-mode counterparts.
AliceEncoding impersonate_alice_encode_qd(BobPreparation& prep, const CheckedMessage& a_prime, RandomSource& rng);
BobPreparation impersonate_bob_prepare_qd(const ProtocolConfig& config, const protocol::BitString& b_prime,
                                          RandomSource& rng);

}  // namespace diqsdc::adversary
