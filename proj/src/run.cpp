#include "diqsdc/run.hpp"

#include <algorithm>
#include <array>

namespace diqsdc::protocol {

namespace {

using adversary::AdversarySpec;
using adversary::AttackKind;
using adversary::ChannelModel;
using adversary::Transmission;

constexpr std::array<std::string_view, 6> kAbortNames = {
    "ConfigInvalid", "ChshFirstFailed", "ReceiverAuthFailed", "ChshSecondFailed", "SenderAuthFailed", "IntegrityFailed"};

class Transcript {
 public:
  explicit Transcript(std::vector<Announcement>& log) : log_(log) {}

  void add(std::string party, std::string step, std::string event, nlohmann::json data) {
    log_.push_back({log_.size(), std::move(party), std::move(step), std::move(event), std::move(data)});
  }

 private:
  std::vector<Announcement>& log_;
};

nlohmann::json labels_json(std::span<const BellLabel> labels) {
  auto out = nlohmann::json::array();
  for (BellLabel l : labels) out.push_back(qcore::name(l));
  return out;
}

nlohmann::json check_json(const CheckResult& check) {
  return {{"s_value", check.estimate.s_value},
          {"rounds_used", check.estimate.rounds_used},
          {"verdict", name(check.verdict)}};
}

// Per-run random streams, one per party.
struct Streams {
  RandomSource alice, bob, eve, channel, check, measure;

  explicit Streams(std::uint64_t seed)
      : alice(RandomSource(seed).substream("alice")),
        bob(RandomSource(seed).substream("bob")),
        eve(RandomSource(seed).substream("eve")),
        channel(RandomSource(seed).substream("channel")),
        check(RandomSource(seed).substream("check")),
        measure(RandomSource(seed).substream("measure")) {}
};

void transmit(PairRegistry& registry, const SequenceLayout& layout, Transmission transmission,
              const ChannelModel& channel, const AdversarySpec& spec, RandomSource& rng) {
  const Lifecycle moving = transmission == Transmission::First ? Lifecycle::InTransitFirst : Lifecycle::InTransitSecond;
  for (const Slot& slot : layout.slots) {
    registry.set_lifecycle(slot.pair, moving);
    registry.set_state(slot.pair,
                       adversary::transit(registry.state(slot.pair), slot.side, channel, spec, transmission, rng));
    registry.set_lifecycle(slot.pair, Lifecycle::Held);
  }
}

void storage_epoch(PairRegistry& registry, const ChannelModel& channel, RandomSource& rng) {
  if (channel.storage_noise_p == 0.0) return;
  for (PairId id = 0; id < registry.size(); ++id) {
    if (registry.live(id)) registry.set_state(id, adversary::store(registry.state(id), channel, rng));
  }
}

std::optional<std::string> input_problem(const ProtocolConfig& config, const RunInputs& inputs, Mode mode) {
  try {
    config.validate();
  } catch (const ProtocolError& e) {
    return std::string(e.what());
  }
  if (config.mode != mode) return "mode mismatch: expected " + std::string(name(mode));
  if (inputs.id_a.size() != 2 * config.k) return "Id_A must have 2k bits";
  if (inputs.id_b.size() != 2 * config.k) return "Id_B must have 2k bits";
  if (inputs.message.size() != config.n) return "message must have n bits";
  if (mode == Mode::QD && inputs.message_b.size() != config.n) return "Bob's message must have n bits";
  return std::nullopt;
}

RunReport& abort_with(RunReport& report, AbortReason reason, std::string detail = {}) {
  report.abort = reason;
  report.abort_detail = std::move(detail);
  return report;
}

// First CHSH gate, shared by both modes. Returns false when the run aborted.
bool first_check_stage(RunReport& report, BobPreparation& prep, Transcript& log, Streams& rng) {
  CheckResult first;
  try {
    first = first_security_check(prep, report.config, rng.check);
  } catch (const ProtocolError& e) {
    if (e.code() != ErrorCode::InsufficientRounds) throw;
    report.usage.first_check = report.config.d;
    abort_with(report, AbortReason::ChshFirstFailed, e.what());
    return false;
  }
  report.usage.first_check = first.estimate.rounds_total;
  log.add("Alice", "first-check", "first_check_positions", first.announced_positions);
  log.add("Alice+Bob", "first-check", "first_check_statistics", check_json(first));
  report.chsh_first = CheckSummary{first.estimate, first.verdict};
  if (first.verdict != Verdict::Continue) {
    abort_with(report, AbortReason::ChshFirstFailed);
    return false;
  }
  return true;
}

// Authentication and second CHSH gate. Returns false when the run aborted.
bool authentication_stage(RunReport& report, BobPreparation& prep, const AliceEncoding& enc, Transcript& log,
                          Streams& rng) {
  const auto& config = report.config;
  const AttackKind kind = report.adversary.kind;

  log.add("Alice", "receiver-auth", "identity_positions", enc.q_prime.announced_positions);
  const auto announced = bell_measure_pairs(prep.registry, prep.identity, rng.measure);
  report.usage.identity = announced.size();
  log.add("Bob", "receiver-auth", "identity_results", labels_json(announced));
  if (kind == AttackKind::ImpersonateAlice) {
    // Waived: the impersonator holds no Id_B.
    report.receiver_auth = AuthResult{0, 0, Verdict::Waived};
  } else {
    report.receiver_auth = verify_receiver(report.inputs.id_b, enc.covers, announced, config.auth_tolerance);
  }
  if (report.receiver_auth->verdict == Verdict::Abort) {
    abort_with(report, AbortReason::ReceiverAuthFailed);
    return false;
  }

  CheckResult second;
  try {
    second = second_security_check(prep, enc, config, rng.check);
  } catch (const ProtocolError& e) {
    if (e.code() != ErrorCode::InsufficientRounds) throw;
    report.usage.second_check = enc.second_check.size();
    abort_with(report, AbortReason::ChshSecondFailed, e.what());
    return false;
  }
  report.usage.second_check = second.estimate.rounds_total;
  log.add("Alice", "second-check", "second_check_positions", second.announced_positions);
  log.add("Bob", "second-check", "second_check_statistics", check_json(second));
  report.chsh_second = CheckSummary{second.estimate, second.verdict};
  if (second.verdict != Verdict::Continue) {
    abort_with(report, AbortReason::ChshSecondFailed);
    return false;
  }

  std::vector<BellLabel> prepared;
  for (PairId id : enc.sender_id) prepared.push_back(prep.registry.record(id).prepared);
  log.add("Alice", "sender-auth", "sender_id_positions", enc.q_prime.positions_of(enc.sender_id));
  const auto measured = bell_measure_pairs(prep.registry, enc.sender_id, rng.measure);
  report.usage.sender_id = measured.size();
  if (kind == AttackKind::ImpersonateBob) {
    report.sender_auth = AuthResult{0, 0, Verdict::Waived};
  } else {
    report.sender_auth = verify_sender(prepared, measured, report.inputs.id_a, config.auth_tolerance);
  }
  if (report.sender_auth->verdict == Verdict::Abort) {
    abort_with(report, AbortReason::SenderAuthFailed);
    return false;
  }
  return true;
}

nlohmann::json check_bits_json(const CheckedMessage& m) {
  return {{"positions", m.check_positions}, {"values", bits_to_string(m.check_values)}};
}

}  // namespace

std::string_view name(AbortReason reason) { return kAbortNames[static_cast<std::size_t>(reason)]; }

std::optional<AbortReason> abort_reason_from_name(std::string_view text) {
  for (std::size_t i = 0; i < kAbortNames.size(); ++i)
    if (kAbortNames[i] == text) return static_cast<AbortReason>(i);
  return std::nullopt;
}

RunInputs complete_inputs(const ProtocolConfig& config, RunInputs inputs) {
  RandomSource rng = RandomSource(config.seed).substream("inputs");
  // All four are drawn even when supplied.
  BitString id_a = random_bits(2 * config.k, rng);
  BitString id_b = random_bits(2 * config.k, rng);
  BitString m = random_bits(config.n, rng);
  BitString m_b = random_bits(config.n, rng);
  if (inputs.id_a.empty()) inputs.id_a = std::move(id_a);
  if (inputs.id_b.empty()) inputs.id_b = std::move(id_b);
  if (inputs.message.empty()) inputs.message = std::move(m);
  if (inputs.message_b.empty() && config.mode == Mode::QD) inputs.message_b = std::move(m_b);
  return inputs;
}

RunReport run_qsdc(const ProtocolConfig& config, const RunInputs& inputs, const AdversarySpec& spec) {
  RunReport report;
  report.config = config;
  report.adversary = spec;
  report.inputs = inputs;
  if (auto problem = input_problem(config, inputs, Mode::QSDC)) {
    return abort_with(report, AbortReason::ConfigInvalid, *problem);
  }
  Streams rng(config.seed);
  Transcript log(report.transcript);
  const ChannelModel channel = ChannelModel::from(config);
  const bool eve_alice = spec.kind == AttackKind::ImpersonateAlice;
  const bool eve_bob = spec.kind == AttackKind::ImpersonateBob;

  // Check bits. An impersonating sender sends a message of her own.
  const CheckedMessage m_prime = eve_alice ? insert_check_bits(random_bits(config.n, rng.eve), config.c, rng.eve)
                                           : insert_check_bits(inputs.message, config.c, rng.alice);

  // Preparation and first transmission.
  BobPreparation prep = eve_bob ? adversary::impersonate_bob_prepare(config, rng.eve)
                                : bob_prepare(config, inputs.id_b, rng.bob);
  report.usage.prepared = prep.registry.size();
  transmit(prep.registry, prep.q_a, Transmission::First, channel, spec, rng.channel);
  log.add("Bob", "first-transmission", "identity_positions", prep.q_a.announced_positions);

  if (!first_check_stage(report, prep, log, rng)) return report;
  storage_epoch(prep.registry, channel, rng.channel);

  // Encoding and second transmission.
  const AliceEncoding enc = eve_alice ? adversary::impersonate_alice_encode(prep, m_prime, rng.eve)
                                      : alice_encode(prep, m_prime, inputs.id_a, rng.alice);
  transmit(prep.registry, enc.q_prime, Transmission::Second, channel, spec, rng.channel);

  if (!authentication_stage(report, prep, enc, log, rng)) return report;

  const BitString decoded = bob_decode(prep.registry, enc.message, rng.measure);
  report.usage.message = enc.message.size();

  log.add("Alice", "integrity", "check_bits", check_bits_json(m_prime));
  report.integrity = verify_integrity(decoded, m_prime.check_positions, m_prime.check_values,
                                      config.integrity_tolerance);
  if (report.integrity->verdict == Verdict::Abort) return abort_with(report, AbortReason::IntegrityFailed);
  report.delivered_message = report.integrity->message;
  return report;
}

RunReport run_qd(const ProtocolConfig& config, const RunInputs& inputs, const AdversarySpec& spec) {
  RunReport report;
  report.config = config;
  report.adversary = spec;
  report.inputs = inputs;
  if (auto problem = input_problem(config, inputs, Mode::QD)) {
    return abort_with(report, AbortReason::ConfigInvalid, *problem);
  }
  Streams rng(config.seed);
  Transcript log(report.transcript);
  const ChannelModel channel = ChannelModel::from(config);
  const bool eve_alice = spec.kind == AttackKind::ImpersonateAlice;
  const bool eve_bob = spec.kind == AttackKind::ImpersonateBob;

  // Each side inserts its own check bits; one bit per pair, no evenness requirement.
  const CheckedMessage a_prime = eve_alice
      ? insert_check_bits(random_bits(config.n, rng.eve), config.c, rng.eve, false)
      : insert_check_bits(inputs.message, config.c, rng.alice, false);
  const CheckedMessage b_prime = eve_bob
      ? insert_check_bits(random_bits(config.n, rng.eve), config.c, rng.eve, false)
      : insert_check_bits(inputs.message_b, config.c, rng.bob, false);

  BobPreparation prep = eve_bob ? adversary::impersonate_bob_prepare_qd(config, b_prime.bits, rng.eve)
                                : qd_bob_prepare(config, inputs.id_b, b_prime.bits, rng.bob);
  report.usage.prepared = prep.registry.size();
  transmit(prep.registry, prep.q_a, Transmission::First, channel, spec, rng.channel);
  {
    auto extra_positions = prep.q_a.positions_of(prep.checkable);
    std::sort(extra_positions.begin(), extra_positions.end());
    log.add("Bob", "first-transmission", "check_pair_positions", extra_positions);
  }
  log.add("Bob", "first-transmission", "identity_positions", prep.q_a.announced_positions);

  if (!first_check_stage(report, prep, log, rng)) return report;
  storage_epoch(prep.registry, channel, rng.channel);

  const AliceEncoding enc = eve_alice ? adversary::impersonate_alice_encode_qd(prep, a_prime, rng.eve)
                                      : qd_alice_encode(prep, a_prime, inputs.id_a, rng.alice);
  transmit(prep.registry, enc.q_prime, Transmission::Second, channel, spec, rng.channel);

  if (!authentication_stage(report, prep, enc, log, rng)) return report;

  // Bob measures and announces the final states so both sides can decode.
  std::vector<BellLabel> prepared;
  for (PairId id : enc.message) prepared.push_back(prep.registry.record(id).prepared);
  const auto finals = bell_measure_pairs(prep.registry, enc.message, rng.measure);
  report.usage.message = finals.size();
  log.add("Bob", "decode", "final_states", labels_json(finals));

  BitString bob_view;    // Alice's bits as Bob decodes them
  BitString alice_view;  // Bob's bits as Alice decodes them
  for (std::size_t i = 0; i < finals.size(); ++i) {
    bob_view.push_back(qd_decode(prepared[i], finals[i], std::nullopt).alice_bit);
    alice_view.push_back(qd_decode(std::nullopt, finals[i], enc.message_ops[i]).bob_bit);
  }

  log.add("Alice", "integrity", "check_bits", check_bits_json(a_prime));
  log.add("Bob", "integrity", "check_bits", check_bits_json(b_prime));
  report.integrity = verify_integrity(bob_view, a_prime.check_positions, a_prime.check_values,
                                      config.integrity_tolerance);
  report.integrity_b = verify_integrity(alice_view, b_prime.check_positions, b_prime.check_values,
                                        config.integrity_tolerance);
  if (report.integrity->verdict == Verdict::Abort || report.integrity_b->verdict == Verdict::Abort) {
    return abort_with(report, AbortReason::IntegrityFailed);
  }
  report.delivered_message = report.integrity->message;
  report.delivered_message_b = report.integrity_b->message;
  return report;
}

RunReport run_protocol(const ProtocolConfig& config, const RunInputs& inputs, const AdversarySpec& spec) {
  return config.mode == Mode::QD ? run_qd(config, inputs, spec) : run_qsdc(config, inputs, spec);
}

}  // namespace diqsdc::protocol
