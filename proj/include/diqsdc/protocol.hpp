#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "diqsdc/qcore.hpp"
#include "diqsdc/random.hpp"

namespace diqsdc::protocol {

using qcore::BellLabel;
using qcore::PairState;
using qcore::Side;
using qcore::SingleQubitOp;

// ---------------------------------------------------------------------------
// Errors

enum class ErrorCode { OddLength, ConfigInvalid, InsufficientRounds, SizeMismatch, InconsistentTransition };

std::string_view name(ErrorCode code);

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Bit strings. One element per bit, each 0 or 1.

using BitString = std::vector<std::uint8_t>;
using MessageBits = BitString;
using Identity = BitString;  // 2k bits

BitString bits_from_string(std::string_view text);
std::string bits_to_string(const BitString& bits);
// Most significant bit first; a trailing partial nibble is zero-padded on the right.
std::string bits_to_hex(const BitString& bits);
// Reads exactly `nbits` bits; the hex string must have ceil(nbits/4) digits and
// any padding bits must be zero.
BitString bits_from_hex(std::string_view hex, std::size_t nbits);
BitString random_bits(std::size_t count, RandomSource& rng);

// ---------------------------------------------------------------------------
// Configuration

enum class Mode : std::uint8_t { QSDC, QD };
std::string_view name(Mode mode);

struct ProtocolConfig {
  std::size_t n = 64;
  std::size_t c = 16;
  std::size_t k = 16;
  std::size_t d = 6000;
  double s_threshold = 2.0;
  double auth_tolerance = 0.0;
  double integrity_tolerance = 0.0;
  double noise_p = 0.0;
  double storage_noise_p = 0.0;
  Mode mode = Mode::QSDC;
  std::uint64_t seed = 0;

  // N: message pairs in QSDC mode.
  std::size_t half_length() const { return (n + c) / 2; }

  // Throws ProtocolError(ConfigInvalid).
  void validate() const;
};

// ---------------------------------------------------------------------------
// Check bits

struct CheckedMessage {
  BitString bits;
  std::vector<std::size_t> check_positions;  // ascending
  BitString check_values;

  // Removes the check positions.
  BitString strip() const;
};

// Throws ProtocolError(OddLength) when len(m)+c is odd and `require_even`.
CheckedMessage insert_check_bits(const MessageBits& m, std::size_t c, RandomSource& rng,
                                 bool require_even = true);

// ---------------------------------------------------------------------------
// Encoding tables

// `value` is the two-bit integer with the first bit as the high bit.
SingleQubitOp pauli_for_bits(std::uint8_t value);
BellLabel bell_for_id_bits(std::uint8_t value);

// Final Bell label after `pauli` acts on side A of bell_state(initial).
// Throws std::invalid_argument for a non-Pauli op.
BellLabel bell_transition(BellLabel initial, SingleQubitOp pauli);

// The Pauli (one of qcore::kPaulis) taking `initial` to `final`.
SingleQubitOp transition_pauli(BellLabel initial, BellLabel final);
std::uint8_t bits_for_transition(BellLabel initial, BellLabel final);

inline std::uint8_t bit_pair(const BitString& bits, std::size_t i) {
  return static_cast<std::uint8_t>((bits[2 * i] << 1) | bits[2 * i + 1]);
}

// ---------------------------------------------------------------------------
// Pair bookkeeping

using PairId = std::size_t;

enum class PairRole : std::uint8_t { Transport, IdentityCarrier };
enum class Partition : std::uint8_t { Unassigned, FirstCheck, Message, SenderId, SecondCheck };
enum class Lifecycle : std::uint8_t { Held, InTransitFirst, InTransitSecond, Measured, Discarded };

std::string_view name(PairRole role);
std::string_view name(Partition partition);
std::string_view name(Lifecycle lifecycle);

struct PairRecord {
  std::optional<PairState> state;  // empty once consumed
  BellLabel prepared;
  PairRole role;
  Partition partition = Partition::Unassigned;
  Lifecycle lifecycle = Lifecycle::Held;
};

class PairRegistry {
 public:
  PairId add(BellLabel prepared, PairRole role);

  std::size_t size() const { return pairs_.size(); }
  const PairRecord& record(PairId id) const;
  bool live(PairId id) const { return record(id).state.has_value(); }

  // Throws std::logic_error when the pair was already consumed.
  const PairState& state(PairId id) const;
  void set_state(PairId id, const PairState& state);
  PairState consume(PairId id);

  void set_partition(PairId id, Partition partition);
  void set_lifecycle(PairId id, Lifecycle lifecycle);

  std::vector<PairId> ids(PairRole role) const;
  std::vector<PairId> ids(Partition partition) const;
  std::size_t count(PairRole role) const { return ids(role).size(); }
  std::size_t count(Partition partition) const { return ids(partition).size(); }
  std::size_t live_count() const;

 private:
  PairRecord& mutable_record(PairId id);
  std::vector<PairRecord> pairs_;
};

struct Slot {
  PairId pair;
  Side side;
  bool operator==(const Slot&) const = default;
};

struct SequenceLayout {
  std::vector<Slot> slots;
  // Slot indices of the inserted subsequence, ascending.
  std::vector<std::size_t> announced_positions;

  std::size_t position_of(PairId pair) const;
  // Slot index of each pair, in the order given.
  std::vector<std::size_t> positions_of(std::span<const PairId> pairs) const;
};

// Random interleave of `inserted` into `base`; relative order of each input
// is kept and every (pair, side) appears in exactly one slot.
SequenceLayout interleave(std::span<const PairId> base, std::span<const PairId> inserted, Side side,
                          RandomSource& rng);

// Everything Bob produced during preparation.
struct BobPreparation {
  PairRegistry registry;
  SequenceLayout q_a;
  std::vector<PairId> s_sequence;  // S_A / S_B order
  std::vector<PairId> identity;    // I_A / I_B order
  // Transport pairs that can be drawn for the checks and for C_A. All of S in
  // QSDC mode; the k+2d non-message pairs in QD mode.
  std::vector<PairId> checkable;
  // QD only: the n+c message pairs, in message order.
  std::vector<PairId> message;
};

BobPreparation bob_prepare(const ProtocolConfig& config, const Identity& id_b, RandomSource& rng);

// QD preparation: message pairs from qd_prepare_bit over Bob's checked message.
BobPreparation qd_bob_prepare(const ProtocolConfig& config, const Identity& id_b,
                              const BitString& bob_checked_bits, RandomSource& rng);

// ---------------------------------------------------------------------------
// CHSH estimation

inline constexpr std::array<double, 3> kAliceAngles = {std::numbers::pi / 4, 0.0, std::numbers::pi / 2};
inline constexpr std::array<double, 2> kBobAngles = {std::numbers::pi / 4, -std::numbers::pi / 4};

// Brings a pair prepared as `prepared` into the Psi+ correlation frame:
// sigma_x on side B for Phi+/Phi-, and a side-B outcome sign of -1 for
// Phi-/Psi-.
PairState frame_correct(const PairState& state, BellLabel prepared);
int frame_sign(BellLabel prepared);

// Sampling-free frame-corrected CHSH value.
double chsh_analytic(const PairState& state, BellLabel prepared);

struct PreparedPair {
  PairState state;
  BellLabel prepared;
};

struct ChshEstimate {
  double s_value = 0.0;
  // counts[alice basis][bob basis][0 = agree, 1 = disagree]
  std::array<std::array<std::array<std::size_t, 2>, 2>, 3> counts{};
  std::size_t rounds_used = 0;   // rounds feeding S
  std::size_t rounds_total = 0;  // pairs measured
  std::optional<double> qber;    // from (A0, B1) rounds

  double correlator(std::size_t alice_basis, std::size_t bob_basis) const;
};

// Throws ProtocolError(InsufficientRounds) if a correlator cell is empty.
ChshEstimate chsh_estimate(std::span<const PreparedPair> pairs, RandomSource& rng);

enum class Verdict : std::uint8_t { Continue, Abort, Waived };
std::string_view name(Verdict verdict);

struct CheckResult {
  ChshEstimate estimate;
  Verdict verdict;
  std::vector<std::size_t> announced_positions;
};

// Draws d pairs from prep.checkable, estimates S, and discards them.
CheckResult first_security_check(BobPreparation& prep, const ProtocolConfig& config, RandomSource& rng);

// ---------------------------------------------------------------------------
// Alice's encoding

struct AliceEncoding {
  SequenceLayout q_prime;
  std::vector<SingleQubitOp> covers;  // per identity pair, I_A order
  std::vector<PairId> message;        // M_A, encoding order
  std::vector<PairId> sender_id;      // C_A
  std::vector<PairId> second_check;   // D_A
  std::vector<SingleQubitOp> message_ops;  // QD only: Alice's op per message pair
};

// Throws ProtocolError(SizeMismatch) if m' is not 2N bits or Id_A is not 2k bits.
AliceEncoding alice_encode(BobPreparation& prep, const CheckedMessage& m_prime, const Identity& id_a,
                           RandomSource& rng);

// QD: message pairs are fixed by Bob; Alice applies qd_alice_op per checked bit.
AliceEncoding qd_alice_encode(BobPreparation& prep, const CheckedMessage& a_prime, const Identity& id_a,
                              RandomSource& rng);

// ---------------------------------------------------------------------------
// Authentication and decoding

struct AuthResult {
  std::size_t pass_count = 0;
  std::size_t fail_count = 0;
  Verdict verdict = Verdict::Continue;
};

Verdict tolerance_verdict(std::size_t failures, std::size_t total, double tolerance);

// Bell labels with nonzero probability after `cover` hits side A of `truth`.
std::vector<BellLabel> allowed_receiver_outcomes(BellLabel truth, SingleQubitOp cover);

AuthResult verify_receiver(const Identity& id_b, std::span<const SingleQubitOp> covers,
                           std::span<const BellLabel> announced, double tolerance);

AuthResult verify_sender(std::span<const BellLabel> prepared, std::span<const BellLabel> measured,
                         const Identity& id_a, double tolerance);

// Bell-measures and consumes the given pairs.
std::vector<BellLabel> bell_measure_pairs(PairRegistry& registry, std::span<const PairId> ids,
                                          RandomSource& rng);

CheckResult second_security_check(BobPreparation& prep, const AliceEncoding& encoding,
                                  const ProtocolConfig& config, RandomSource& rng);

BitString decode_transitions(std::span<const BellLabel> prepared, std::span<const BellLabel> measured);

// Measures the M_A pairs and decodes m' via the transition table.
BitString bob_decode(PairRegistry& registry, std::span<const PairId> message_pairs, RandomSource& rng);

struct IntegrityResult {
  BitString message;
  std::size_t mismatches = 0;
  std::size_t checked = 0;
  Verdict verdict = Verdict::Continue;
};

IntegrityResult verify_integrity(const BitString& decoded, std::span<const std::size_t> check_positions,
                                 const BitString& check_values, double tolerance);

// ---------------------------------------------------------------------------
// Quantum dialogue

// The two preparations Bob may pick for a bit, and the two operations Alice
// may pick for hers.
std::array<BellLabel, 2> qd_prepare_family(std::uint8_t bit);
std::array<SingleQubitOp, 2> qd_op_family(std::uint8_t bit);

BellLabel qd_prepare_bit(std::uint8_t bit, RandomSource& rng);
SingleQubitOp qd_alice_op(std::uint8_t bit, RandomSource& rng);

struct QdBits {
  std::uint8_t alice_bit;
  std::uint8_t bob_bit;
  bool operator==(const QdBits&) const = default;
};

// Bob knows `prepared`; Alice knows `alice_op`. Supply at least one. Throws
// ProtocolError(InconsistentTransition) if the inputs fit no table row.
QdBits qd_decode(std::optional<BellLabel> prepared, BellLabel final,
                 std::optional<SingleQubitOp> alice_op);

}  // namespace diqsdc::protocol
