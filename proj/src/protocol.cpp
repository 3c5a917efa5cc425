#include "diqsdc/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace diqsdc::protocol {

namespace {

constexpr std::size_t kNoPosition = static_cast<std::size_t>(-1);

BellLabel random_bell_label(RandomSource& rng) { return qcore::kBellLabels[rng.below(4)]; }

bool is_pauli(SingleQubitOp op) {
  return std::find(qcore::kPaulis.begin(), qcore::kPaulis.end(), op) != qcore::kPaulis.end();
}

// [label][pauli index] -> label, computed once from the simulator.
const std::array<std::array<BellLabel, 4>, 4>& transition_table() {
  static const auto table = [] {
    std::array<std::array<BellLabel, 4>, 4> t{};
    for (BellLabel initial : qcore::kBellLabels) {
      for (std::size_t p = 0; p < 4; ++p) {
        const PairState out = qcore::apply_to_side(qcore::bell_state(initial), Side::A, qcore::kPaulis[p]);
        BellLabel final{};
        if (!qcore::is_bell_state(out, &final)) {
          throw std::logic_error("Pauli did not map a Bell state to a Bell state");
        }
        t[static_cast<std::size_t>(initial)][p] = final;
      }
    }
    return t;
  }();
  return table;
}

std::vector<std::size_t> inverse_positions(std::span<const PairId> order, std::size_t registry_size) {
  std::vector<std::size_t> pos(registry_size, kNoPosition);
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  return pos;
}

std::vector<PairId> live_unassigned(const PairRegistry& registry, std::span<const PairId> candidates) {
  std::vector<PairId> out;
  for (PairId id : candidates) {
    const auto& rec = registry.record(id);
    if (rec.state && rec.partition == Partition::Unassigned) out.push_back(id);
  }
  return out;
}

CheckResult run_check(PairRegistry& registry, std::span<const PairId> ids, double threshold,
                      RandomSource& rng) {
  std::vector<PreparedPair> pairs;
  pairs.reserve(ids.size());
  for (PairId id : ids) {
    pairs.push_back({registry.consume(id), registry.record(id).prepared});
    registry.set_lifecycle(id, Lifecycle::Discarded);
  }
  CheckResult result{chsh_estimate(pairs, rng), Verdict::Abort, {}};
  result.verdict = result.estimate.s_value > threshold ? Verdict::Continue : Verdict::Abort;
  return result;
}

// Splits the remaining checkable pairs into C_A and D_A, encodes Id_A on C_A,
// covers the identity pairs, and builds Q'_A. `encoding.message` must already
// be set.
void finish_alice_encoding(BobPreparation& prep, std::vector<PairId> remaining, const Identity& id_a,
                           AliceEncoding& encoding, RandomSource& rng) {
  auto& registry = prep.registry;
  const std::size_t k = prep.identity.size();
  const auto sender_idx = rng.choose_sorted(remaining.size(), k);
  std::vector<bool> taken(remaining.size(), false);
  for (std::size_t i : sender_idx) {
    taken[i] = true;
    encoding.sender_id.push_back(remaining[i]);
  }
  for (std::size_t i = 0; i < remaining.size(); ++i) {
    if (!taken[i]) encoding.second_check.push_back(remaining[i]);
  }

  for (PairId id : encoding.message) registry.set_partition(id, Partition::Message);
  for (std::size_t i = 0; i < encoding.sender_id.size(); ++i) {
    const PairId id = encoding.sender_id[i];
    registry.set_partition(id, Partition::SenderId);
    registry.set_state(id, qcore::apply_to_side(registry.state(id), Side::A, pauli_for_bits(bit_pair(id_a, i))));
  }
  for (PairId id : encoding.second_check) registry.set_partition(id, Partition::SecondCheck);

  encoding.covers.reserve(k);
  for (PairId id : prep.identity) {
    const SingleQubitOp cover = qcore::kCoverOps[rng.below(4)];
    encoding.covers.push_back(cover);
    registry.set_state(id, qcore::apply_to_side(registry.state(id), Side::A, cover));
  }

  std::vector<PairId> s_prime;
  for (PairId id : prep.s_sequence) {
    if (registry.live(id)) s_prime.push_back(id);
  }
  encoding.q_prime = interleave(s_prime, prep.identity, Side::A, rng);
}

void require_identity_length(const Identity& id, std::size_t k, ErrorCode code, const char* who) {
  if (id.size() != 2 * k) {
    throw ProtocolError(code, std::string(who) + " must have 2k = " + std::to_string(2 * k) + " bits, got " +
                                  std::to_string(id.size()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view name(ErrorCode code) {
  switch (code) {
    case ErrorCode::OddLength: return "OddLength";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::InsufficientRounds: return "InsufficientRounds";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::InconsistentTransition: return "InconsistentTransition";
  }
  return "?";
}

ProtocolError::ProtocolError(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(name(code)) + ": " + what), code_(code) {}

std::string_view name(Mode mode) { return mode == Mode::QSDC ? "qsdc" : "qd"; }

std::string_view name(PairRole role) {
  return role == PairRole::Transport ? "Transport" : "IdentityCarrier";
}

std::string_view name(Partition partition) {
  switch (partition) {
    case Partition::Unassigned: return "Unassigned";
    case Partition::FirstCheck: return "FirstCheck";
    case Partition::Message: return "Message";
    case Partition::SenderId: return "SenderId";
    case Partition::SecondCheck: return "SecondCheck";
  }
  return "?";
}

std::string_view name(Lifecycle lifecycle) {
  switch (lifecycle) {
    case Lifecycle::Held: return "Held";
    case Lifecycle::InTransitFirst: return "InTransitFirst";
    case Lifecycle::InTransitSecond: return "InTransitSecond";
    case Lifecycle::Measured: return "Measured";
    case Lifecycle::Discarded: return "Discarded";
  }
  return "?";
}

std::string_view name(Verdict verdict) {
  switch (verdict) {
    case Verdict::Continue: return "continue";
    case Verdict::Abort: return "abort";
    case Verdict::Waived: return "waived";
  }
  return "?";
}

// ---------------------------------------------------------------------------

BitString bits_from_string(std::string_view text) {
  BitString bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw std::invalid_argument("bit string may contain only 0 and 1");
    bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return bits;
}

std::string bits_to_string(const BitString& bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits) out.push_back(b ? '1' : '0');
  return out;
}

std::string bits_to_hex(const BitString& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    unsigned nibble = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      nibble <<= 1;
      if (i + j < bits.size()) nibble |= bits[i + j] & 1u;
    }
    out.push_back(kDigits[nibble]);
  }
  return out;
}

BitString bits_from_hex(std::string_view hex, std::size_t nbits) {
  if (hex.size() != (nbits + 3) / 4) {
    throw std::invalid_argument("hex string needs " + std::to_string((nbits + 3) / 4) + " digits for " +
                                std::to_string(nbits) + " bits");
  }
  BitString bits;
  bits.reserve(hex.size() * 4);
  for (char ch : hex) {
    unsigned v;
    if (ch >= '0' && ch <= '9') v = static_cast<unsigned>(ch - '0');
    else if (ch >= 'a' && ch <= 'f') v = static_cast<unsigned>(ch - 'a' + 10);
    else if (ch >= 'A' && ch <= 'F') v = static_cast<unsigned>(ch - 'A' + 10);
    else throw std::invalid_argument(std::string("invalid hex digit '") + ch + "'");
    for (int j = 3; j >= 0; --j) bits.push_back(static_cast<std::uint8_t>((v >> j) & 1u));
  }
  for (std::size_t i = nbits; i < bits.size(); ++i) {
    if (bits[i]) throw std::invalid_argument("hex padding bits must be zero");
  }
  bits.resize(nbits);
  return bits;
}

BitString random_bits(std::size_t count, RandomSource& rng) {
  BitString bits(count);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(2));
  return bits;
}

// ---------------------------------------------------------------------------

void ProtocolConfig::validate() const {
  auto fail = [](const std::string& why) { throw ProtocolError(ErrorCode::ConfigInvalid, why); };
  auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if ((n + c) % 2 != 0) fail("n + c must be even");
  if (k < 1) fail("k must be at least 1");
  if (d < 1) fail("d must be at least 1");
  if (!unit(noise_p)) fail("noise_p must lie in [0, 1]");
  if (!unit(storage_noise_p)) fail("storage_noise_p must lie in [0, 1]");
  if (!unit(auth_tolerance)) fail("auth_tolerance must lie in [0, 1]");
  if (!unit(integrity_tolerance)) fail("integrity_tolerance must lie in [0, 1]");
  if (!std::isfinite(s_threshold)) fail("s_threshold must be finite");
}

// ---------------------------------------------------------------------------

BitString CheckedMessage::strip() const {
  BitString out;
  out.reserve(bits.size() - check_positions.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (next < check_positions.size() && check_positions[next] == i) {
      ++next;
      continue;
    }
    out.push_back(bits[i]);
  }
  return out;
}

CheckedMessage insert_check_bits(const MessageBits& m, std::size_t c, RandomSource& rng, bool require_even) {
  const std::size_t total = m.size() + c;
  if (require_even && total % 2 != 0) {
    throw ProtocolError(ErrorCode::OddLength, "n + c = " + std::to_string(total) + " is odd");
  }
  CheckedMessage out;
  out.check_positions = rng.choose_sorted(total, c);
  out.check_values = random_bits(c, rng);
  out.bits.reserve(total);
  std::size_t next_check = 0;
  std::size_t next_msg = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (next_check < c && out.check_positions[next_check] == i) {
      out.bits.push_back(out.check_values[next_check++]);
    } else {
      out.bits.push_back(m[next_msg++]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

SingleQubitOp pauli_for_bits(std::uint8_t value) {
  if (value > 3) throw std::invalid_argument("pauli_for_bits: value must be a 2-bit integer");
  return qcore::kPaulis[value];
}

BellLabel bell_for_id_bits(std::uint8_t value) {
  if (value > 3) throw std::invalid_argument("bell_for_id_bits: value must be a 2-bit integer");
  return qcore::kBellLabels[value];
}

BellLabel bell_transition(BellLabel initial, SingleQubitOp pauli) {
  const auto it = std::find(qcore::kPaulis.begin(), qcore::kPaulis.end(), pauli);
  if (it == qcore::kPaulis.end()) {
    throw std::invalid_argument("bell_transition: " + std::string(qcore::name(pauli)) + " is not a Pauli");
  }
  return transition_table()[static_cast<std::size_t>(initial)][static_cast<std::size_t>(it - qcore::kPaulis.begin())];
}

SingleQubitOp transition_pauli(BellLabel initial, BellLabel final) {
  return pauli_for_bits(bits_for_transition(initial, final));
}

std::uint8_t bits_for_transition(BellLabel initial, BellLabel final) {
  const auto& row = transition_table()[static_cast<std::size_t>(initial)];
  for (std::uint8_t v = 0; v < 4; ++v) {
    if (row[v] == final) return v;
  }
  throw std::logic_error("transition table is not a permutation");
}

// ---------------------------------------------------------------------------

PairId PairRegistry::add(BellLabel prepared, PairRole role) {
  pairs_.push_back(PairRecord{qcore::bell_state(prepared), prepared, role});
  return pairs_.size() - 1;
}

const PairRecord& PairRegistry::record(PairId id) const {
  if (id >= pairs_.size()) throw std::out_of_range("PairRegistry: unknown pair id");
  return pairs_[id];
}

PairRecord& PairRegistry::mutable_record(PairId id) {
  if (id >= pairs_.size()) throw std::out_of_range("PairRegistry: unknown pair id");
  return pairs_[id];
}

const PairState& PairRegistry::state(PairId id) const {
  const auto& rec = record(id);
  if (!rec.state) throw std::logic_error("PairRegistry: pair " + std::to_string(id) + " was already consumed");
  return *rec.state;
}

void PairRegistry::set_state(PairId id, const PairState& state) {
  auto& rec = mutable_record(id);
  if (!rec.state) throw std::logic_error("PairRegistry: pair " + std::to_string(id) + " was already consumed");
  rec.state = state;
}

PairState PairRegistry::consume(PairId id) {
  auto& rec = mutable_record(id);
  if (!rec.state) throw std::logic_error("PairRegistry: pair " + std::to_string(id) + " was already consumed");
  PairState out = *rec.state;
  rec.state.reset();
  rec.lifecycle = Lifecycle::Measured;
  return out;
}

void PairRegistry::set_partition(PairId id, Partition partition) { mutable_record(id).partition = partition; }

void PairRegistry::set_lifecycle(PairId id, Lifecycle lifecycle) { mutable_record(id).lifecycle = lifecycle; }

std::vector<PairId> PairRegistry::ids(PairRole role) const {
  std::vector<PairId> out;
  for (PairId i = 0; i < pairs_.size(); ++i)
    if (pairs_[i].role == role) out.push_back(i);
  return out;
}

std::vector<PairId> PairRegistry::ids(Partition partition) const {
  std::vector<PairId> out;
  for (PairId i = 0; i < pairs_.size(); ++i)
    if (pairs_[i].partition == partition) out.push_back(i);
  return out;
}

std::size_t PairRegistry::live_count() const {
  return static_cast<std::size_t>(
      std::count_if(pairs_.begin(), pairs_.end(), [](const PairRecord& r) { return r.state.has_value(); }));
}

std::size_t SequenceLayout::position_of(PairId pair) const {
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (slots[i].pair == pair) return i;
  throw std::out_of_range("SequenceLayout: pair not in layout");
}

std::vector<std::size_t> SequenceLayout::positions_of(std::span<const PairId> pairs) const {
  PairId max_id = 0;
  for (const auto& slot : slots) max_id = std::max(max_id, slot.pair);
  std::vector<std::size_t> where(max_id + 1, kNoPosition);
  for (std::size_t i = 0; i < slots.size(); ++i) where[slots[i].pair] = i;
  std::vector<std::size_t> out;
  out.reserve(pairs.size());
  for (PairId id : pairs) {
    if (id > max_id || where[id] == kNoPosition) throw std::out_of_range("SequenceLayout: pair not in layout");
    out.push_back(where[id]);
  }
  return out;
}

SequenceLayout interleave(std::span<const PairId> base, std::span<const PairId> inserted, Side side,
                          RandomSource& rng) {
  SequenceLayout layout;
  const std::size_t total = base.size() + inserted.size();
  layout.announced_positions = rng.choose_sorted(total, inserted.size());
  layout.slots.reserve(total);
  std::size_t next_ins = 0;
  std::size_t next_base = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (next_ins < inserted.size() && layout.announced_positions[next_ins] == i) {
      layout.slots.push_back({inserted[next_ins++], side});
    } else {
      layout.slots.push_back({base[next_base++], side});
    }
  }
  return layout;
}

// ---------------------------------------------------------------------------

BobPreparation bob_prepare(const ProtocolConfig& config, const Identity& id_b, RandomSource& rng) {
  config.validate();
  require_identity_length(id_b, config.k, ErrorCode::ConfigInvalid, "Id_B");
  BobPreparation prep;
  const std::size_t transport = config.half_length() + config.k + 2 * config.d;
  prep.s_sequence.reserve(transport);
  for (std::size_t i = 0; i < transport; ++i) {
    prep.s_sequence.push_back(prep.registry.add(random_bell_label(rng), PairRole::Transport));
  }
  for (std::size_t i = 0; i < config.k; ++i) {
    prep.identity.push_back(prep.registry.add(bell_for_id_bits(bit_pair(id_b, i)), PairRole::IdentityCarrier));
  }
  prep.q_a = interleave(prep.s_sequence, prep.identity, Side::A, rng);
  prep.checkable = prep.s_sequence;
  return prep;
}

BobPreparation qd_bob_prepare(const ProtocolConfig& config, const Identity& id_b,
                              const BitString& bob_checked_bits, RandomSource& rng) {
  config.validate();
  require_identity_length(id_b, config.k, ErrorCode::ConfigInvalid, "Id_B");
  if (bob_checked_bits.size() != config.n + config.c) {
    throw ProtocolError(ErrorCode::SizeMismatch, "Bob's checked message must have n + c bits");
  }
  BobPreparation prep;
  for (auto bit : bob_checked_bits) {
    prep.message.push_back(prep.registry.add(qd_prepare_bit(bit, rng), PairRole::Transport));
  }
  std::vector<PairId> extras;
  for (std::size_t i = 0; i < config.k + 2 * config.d; ++i) {
    extras.push_back(prep.registry.add(random_bell_label(rng), PairRole::Transport));
  }
  for (std::size_t i = 0; i < config.k; ++i) {
    prep.identity.push_back(prep.registry.add(bell_for_id_bits(bit_pair(id_b, i)), PairRole::IdentityCarrier));
  }
  const SequenceLayout s_layout = interleave(prep.message, extras, Side::A, rng);
  for (const auto& slot : s_layout.slots) prep.s_sequence.push_back(slot.pair);
  prep.checkable = extras;
  prep.q_a = interleave(prep.s_sequence, prep.identity, Side::A, rng);
  return prep;
}

// ---------------------------------------------------------------------------

int frame_sign(BellLabel prepared) {
  return prepared == BellLabel::PhiMinus || prepared == BellLabel::PsiMinus ? -1 : 1;
}

PairState frame_correct(const PairState& state, BellLabel prepared) {
  if (prepared == BellLabel::PhiPlus || prepared == BellLabel::PhiMinus) {
    return qcore::apply_to_side(state, Side::B, SingleQubitOp::SigmaX);
  }
  return state;
}

double chsh_analytic(const PairState& state, BellLabel prepared) {
  const PairState corrected = frame_correct(state, prepared);
  auto e = [&](std::size_t a, std::size_t b) { return qcore::correlator(corrected, kAliceAngles[a], kBobAngles[b]); };
  return frame_sign(prepared) * (e(1, 0) + e(2, 0) + e(1, 1) - e(2, 1));
}

double ChshEstimate::correlator(std::size_t alice_basis, std::size_t bob_basis) const {
  const auto& cell = counts[alice_basis][bob_basis];
  const std::size_t total = cell[0] + cell[1];
  if (total == 0) {
    throw ProtocolError(ErrorCode::InsufficientRounds, "no rounds for a" + std::to_string(alice_basis) + "b" +
                                                           std::to_string(bob_basis + 1));
  }
  return (static_cast<double>(cell[0]) - static_cast<double>(cell[1])) / static_cast<double>(total);
}

ChshEstimate chsh_estimate(std::span<const PreparedPair> pairs, RandomSource& rng) {
  ChshEstimate est;
  for (const auto& pair : pairs) {
    const std::size_t a = static_cast<std::size_t>(rng.below(kAliceAngles.size()));
    const std::size_t b = static_cast<std::size_t>(rng.below(kBobAngles.size()));
    const PairState corrected = frame_correct(pair.state, pair.prepared);
    const auto [oa, post] = qcore::measure_rotated(corrected, Side::A, {kAliceAngles[a]}, rng);
    const auto ob = qcore::measure_rotated(post, Side::B, {kBobAngles[b]}, rng).first;
    const int product = qcore::sign(oa) * qcore::sign(ob) * frame_sign(pair.prepared);
    ++est.counts[a][b][product > 0 ? 0 : 1];
  }
  est.rounds_total = pairs.size();
  for (std::size_t a = 1; a < 3; ++a)
    for (std::size_t b = 0; b < 2; ++b) est.rounds_used += est.counts[a][b][0] + est.counts[a][b][1];
  // a1 = angle 0, a2 = angle pi/2, b1 = pi/4, b2 = -pi/4.
  est.s_value = est.correlator(1, 0) + est.correlator(2, 0) + est.correlator(1, 1) - est.correlator(2, 1);
  const auto& qcell = est.counts[0][0];
  if (qcell[0] + qcell[1] > 0) {
    est.qber = static_cast<double>(qcell[1]) / static_cast<double>(qcell[0] + qcell[1]);
  }
  return est;
}

CheckResult first_security_check(BobPreparation& prep, const ProtocolConfig& config, RandomSource& rng) {
  const auto candidates = live_unassigned(prep.registry, prep.checkable);
  if (config.d > candidates.size()) {
    throw ProtocolError(ErrorCode::ConfigInvalid, "d = " + std::to_string(config.d) + " exceeds the " +
                                                      std::to_string(candidates.size()) + " available pairs");
  }
  const auto chosen_idx = rng.choose_sorted(candidates.size(), config.d);
  const auto s_pos = inverse_positions(prep.s_sequence, prep.registry.size());
  std::vector<PairId> chosen;
  std::vector<std::size_t> announced;
  for (std::size_t i : chosen_idx) {
    chosen.push_back(candidates[i]);
    announced.push_back(s_pos[candidates[i]]);
    prep.registry.set_partition(candidates[i], Partition::FirstCheck);
  }
  CheckResult result = run_check(prep.registry, chosen, config.s_threshold, rng);
  result.announced_positions = std::move(announced);
  return result;
}

CheckResult second_security_check(BobPreparation& prep, const AliceEncoding& encoding,
                                  const ProtocolConfig& config, RandomSource& rng) {
  std::vector<std::size_t> announced = encoding.q_prime.positions_of(encoding.second_check);
  CheckResult result = run_check(prep.registry, encoding.second_check, config.s_threshold, rng);
  result.announced_positions = std::move(announced);
  return result;
}

// ---------------------------------------------------------------------------

AliceEncoding alice_encode(BobPreparation& prep, const CheckedMessage& m_prime, const Identity& id_a,
                           RandomSource& rng) {
  const std::size_t k = prep.identity.size();
  if (m_prime.bits.size() % 2 != 0) throw ProtocolError(ErrorCode::SizeMismatch, "m' has odd length");
  require_identity_length(id_a, k, ErrorCode::SizeMismatch, "Id_A");
  const std::size_t big_n = m_prime.bits.size() / 2;
  const auto pool = live_unassigned(prep.registry, prep.checkable);
  // S holds N + k + 2d pairs and the first check consumed d of them, so the
  // pool must hold exactly N + k + d.
  const std::size_t consumed = prep.s_sequence.size() - pool.size();
  if (pool.size() != big_n + k + consumed) {
    throw ProtocolError(ErrorCode::SizeMismatch, "m' length does not match the prepared pairs");
  }

  AliceEncoding encoding;
  const auto msg_idx = rng.choose_sorted(pool.size(), big_n);
  std::vector<bool> taken(pool.size(), false);
  for (std::size_t i : msg_idx) {
    taken[i] = true;
    encoding.message.push_back(pool[i]);
  }
  std::vector<PairId> remaining;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (!taken[i]) remaining.push_back(pool[i]);

  auto& registry = prep.registry;
  for (std::size_t i = 0; i < encoding.message.size(); ++i) {
    const PairId id = encoding.message[i];
    registry.set_state(id, qcore::apply_to_side(registry.state(id), Side::A, pauli_for_bits(bit_pair(m_prime.bits, i))));
  }
  finish_alice_encoding(prep, std::move(remaining), id_a, encoding, rng);
  return encoding;
}

AliceEncoding qd_alice_encode(BobPreparation& prep, const CheckedMessage& a_prime, const Identity& id_a,
                              RandomSource& rng) {
  const std::size_t k = prep.identity.size();
  require_identity_length(id_a, k, ErrorCode::SizeMismatch, "Id_A");
  if (a_prime.bits.size() != prep.message.size()) {
    throw ProtocolError(ErrorCode::SizeMismatch, "Alice's checked message must cover every message pair");
  }
  auto& registry = prep.registry;
  AliceEncoding encoding;
  encoding.message = prep.message;
  for (std::size_t i = 0; i < prep.message.size(); ++i) {
    const SingleQubitOp op = qd_alice_op(a_prime.bits[i], rng);
    encoding.message_ops.push_back(op);
    registry.set_state(prep.message[i], qcore::apply_to_side(registry.state(prep.message[i]), Side::A, op));
  }
  finish_alice_encoding(prep, live_unassigned(registry, prep.checkable), id_a, encoding, rng);
  return encoding;
}

// ---------------------------------------------------------------------------

Verdict tolerance_verdict(std::size_t failures, std::size_t total, double tolerance) {
  if (total == 0) return Verdict::Continue;
  const double fraction = static_cast<double>(failures) / static_cast<double>(total);
  return fraction <= tolerance ? Verdict::Continue : Verdict::Abort;
}

std::vector<BellLabel> allowed_receiver_outcomes(BellLabel truth, SingleQubitOp cover) {
  const auto dist = qcore::bell_probabilities(qcore::apply_to_side(qcore::bell_state(truth), Side::A, cover));
  std::vector<BellLabel> out;
  for (BellLabel label : qcore::kBellLabels)
    if (dist[label] > qcore::kTolerance) out.push_back(label);
  return out;
}

AuthResult verify_receiver(const Identity& id_b, std::span<const SingleQubitOp> covers,
                           std::span<const BellLabel> announced, double tolerance) {
  if (covers.size() != announced.size() || id_b.size() != 2 * covers.size()) {
    throw ProtocolError(ErrorCode::SizeMismatch, "verify_receiver: Id_B, covers and announcements disagree in length");
  }
  AuthResult result;
  for (std::size_t i = 0; i < covers.size(); ++i) {
    const auto allowed = allowed_receiver_outcomes(bell_for_id_bits(bit_pair(id_b, i)), covers[i]);
    const bool ok = std::find(allowed.begin(), allowed.end(), announced[i]) != allowed.end();
    ++(ok ? result.pass_count : result.fail_count);
  }
  result.verdict = tolerance_verdict(result.fail_count, covers.size(), tolerance);
  return result;
}

AuthResult verify_sender(std::span<const BellLabel> prepared, std::span<const BellLabel> measured,
                         const Identity& id_a, double tolerance) {
  if (prepared.size() != measured.size() || id_a.size() != 2 * prepared.size()) {
    throw ProtocolError(ErrorCode::SizeMismatch, "verify_sender: Id_A and pair lists disagree in length");
  }
  AuthResult result;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const BellLabel expected = bell_transition(prepared[i], pauli_for_bits(bit_pair(id_a, i)));
    ++(expected == measured[i] ? result.pass_count : result.fail_count);
  }
  result.verdict = tolerance_verdict(result.fail_count, prepared.size(), tolerance);
  return result;
}

std::vector<BellLabel> bell_measure_pairs(PairRegistry& registry, std::span<const PairId> ids, RandomSource& rng) {
  std::vector<BellLabel> out;
  out.reserve(ids.size());
  for (PairId id : ids) out.push_back(qcore::measure_bell(registry.consume(id), rng));
  return out;
}

BitString decode_transitions(std::span<const BellLabel> prepared, std::span<const BellLabel> measured) {
  if (prepared.size() != measured.size()) throw ProtocolError(ErrorCode::SizeMismatch, "decode: length mismatch");
  BitString bits;
  bits.reserve(2 * prepared.size());
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const std::uint8_t v = bits_for_transition(prepared[i], measured[i]);
    bits.push_back(static_cast<std::uint8_t>(v >> 1));
    bits.push_back(static_cast<std::uint8_t>(v & 1));
  }
  return bits;
}

BitString bob_decode(PairRegistry& registry, std::span<const PairId> message_pairs, RandomSource& rng) {
  std::vector<BellLabel> prepared;
  prepared.reserve(message_pairs.size());
  for (PairId id : message_pairs) prepared.push_back(registry.record(id).prepared);
  const auto measured = bell_measure_pairs(registry, message_pairs, rng);
  return decode_transitions(prepared, measured);
}

IntegrityResult verify_integrity(const BitString& decoded, std::span<const std::size_t> check_positions,
                                 const BitString& check_values, double tolerance) {
  if (check_positions.size() != check_values.size()) {
    throw ProtocolError(ErrorCode::SizeMismatch, "check positions and values disagree in length");
  }
  IntegrityResult result;
  result.checked = check_positions.size();
  std::vector<bool> is_check(decoded.size(), false);
  for (std::size_t i = 0; i < check_positions.size(); ++i) {
    const std::size_t pos = check_positions[i];
    if (pos >= decoded.size()) throw ProtocolError(ErrorCode::SizeMismatch, "check position out of range");
    is_check[pos] = true;
    if (decoded[pos] != check_values[i]) ++result.mismatches;
  }
  for (std::size_t i = 0; i < decoded.size(); ++i)
    if (!is_check[i]) result.message.push_back(decoded[i]);
  result.verdict = tolerance_verdict(result.mismatches, result.checked, tolerance);
  return result;
}

// ---------------------------------------------------------------------------

std::array<BellLabel, 2> qd_prepare_family(std::uint8_t bit) {
  if (bit > 1) throw std::invalid_argument("qd_prepare_family: bit must be 0 or 1");
  if (bit == 0) return {BellLabel::PhiPlus, BellLabel::PsiPlus};
  return {BellLabel::PhiMinus, BellLabel::PsiMinus};
}

std::array<SingleQubitOp, 2> qd_op_family(std::uint8_t bit) {
  if (bit > 1) throw std::invalid_argument("qd_op_family: bit must be 0 or 1");
  if (bit == 0) return {SingleQubitOp::Id, SingleQubitOp::SigmaZ};
  return {SingleQubitOp::SigmaX, SingleQubitOp::ISigmaY};
}

BellLabel qd_prepare_bit(std::uint8_t bit, RandomSource& rng) {
  const auto family = qd_prepare_family(bit);
  return family[rng.below(2)];
}

SingleQubitOp qd_alice_op(std::uint8_t bit, RandomSource& rng) {
  const auto family = qd_op_family(bit);
  return family[rng.below(2)];
}

namespace {

std::uint8_t bob_bit_of(BellLabel prepared) {
  return prepared == BellLabel::PhiPlus || prepared == BellLabel::PsiPlus ? 0 : 1;
}

std::uint8_t alice_bit_of(SingleQubitOp pauli) {
  return pauli == SingleQubitOp::Id || pauli == SingleQubitOp::SigmaZ ? 0 : 1;
}

}  // namespace

QdBits qd_decode(std::optional<BellLabel> prepared, BellLabel final, std::optional<SingleQubitOp> alice_op) {
  if (alice_op && !is_pauli(*alice_op)) {
    throw ProtocolError(ErrorCode::InconsistentTransition,
                        std::string(qcore::name(*alice_op)) + " is not a dialogue encoding operation");
  }
  if (prepared) {
    const SingleQubitOp pauli = transition_pauli(*prepared, final);
    if (alice_op && *alice_op != pauli) {
      throw ProtocolError(ErrorCode::InconsistentTransition, "announced final state does not match Alice's operation");
    }
    return {alice_bit_of(pauli), bob_bit_of(*prepared)};
  }
  if (!alice_op) {
    throw ProtocolError(ErrorCode::InconsistentTransition, "qd_decode needs the prepared state or Alice's operation");
  }
  // Every Pauli is its own inverse up to a global phase.
  const BellLabel recovered = bell_transition(final, *alice_op);
  return {alice_bit_of(*alice_op), bob_bit_of(recovered)};
}

}  // namespace diqsdc::protocol
