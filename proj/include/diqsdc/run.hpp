#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "diqsdc/adversary.hpp"
#include "diqsdc/protocol.hpp"

namespace diqsdc::protocol {

// Declared in protocol order; comparisons between reasons follow it.
enum class AbortReason : std::uint8_t {
  ConfigInvalid,
  ChshFirstFailed,
  ReceiverAuthFailed,
  ChshSecondFailed,
  SenderAuthFailed,
  IntegrityFailed,
};

std::string_view name(AbortReason reason);
std::optional<AbortReason> abort_reason_from_name(std::string_view text);

// One public message on the classical channel.
struct Announcement {
  std::size_t seq = 0;
  std::string party;  // "Alice", "Bob"
  std::string step;   // protocol phase, e.g. "first-check"
  std::string event;
  nlohmann::json data;
};

struct RunInputs {
  Identity id_a;
  Identity id_b;
  MessageBits message;    // Alice's message
  MessageBits message_b;  // Bob's message, QD only
};

struct CheckSummary {
  ChshEstimate estimate;
  Verdict verdict = Verdict::Continue;
};

// Pairs by the stage that consumed them.
struct PairUsage {
  std::size_t prepared = 0;
  std::size_t first_check = 0;
  std::size_t identity = 0;
  std::size_t second_check = 0;
  std::size_t sender_id = 0;
  std::size_t message = 0;

  std::size_t consumed() const { return first_check + identity + second_check + sender_id + message; }
};

struct RunReport {
  ProtocolConfig config;
  adversary::AdversarySpec adversary;
  RunInputs inputs;

  std::optional<CheckSummary> chsh_first;
  std::optional<CheckSummary> chsh_second;
  std::optional<AuthResult> receiver_auth;
  std::optional<AuthResult> sender_auth;
  std::optional<IntegrityResult> integrity;    // Alice's check bits, verified on Bob's decode
  std::optional<IntegrityResult> integrity_b;  // QD: Bob's check bits, verified on Alice's decode
  std::optional<MessageBits> delivered_message;
  std::optional<MessageBits> delivered_message_b;
  std::optional<AbortReason> abort;
  std::string abort_detail;
  PairUsage usage;
  std::vector<Announcement> transcript;
};

// Full two-transmission protocol. The seed is config.seed. Invalid
// configurations or inputs yield a report with abort = ConfigInvalid.
RunReport run_qsdc(const ProtocolConfig& config, const RunInputs& inputs,
                   const adversary::AdversarySpec& adversary = {});

RunReport run_qd(const ProtocolConfig& config, const RunInputs& inputs,
                 const adversary::AdversarySpec& adversary = {});

// Dispatches on config.mode.
RunReport run_protocol(const ProtocolConfig& config, const RunInputs& inputs,
                       const adversary::AdversarySpec& adversary = {});

// Fills any empty identity or message with seeded random bits of the
// configured length.
RunInputs complete_inputs(const ProtocolConfig& config, RunInputs inputs);

}  // namespace diqsdc::protocol
