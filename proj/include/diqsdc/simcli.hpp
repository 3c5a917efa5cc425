#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diqsdc/adversary.hpp"
#include "diqsdc/protocol.hpp"
#include "diqsdc/run.hpp"

namespace diqsdc::simcli {

enum class Subcommand { Run, Trials, Tables, Selftest };
enum class Format { Json, Csv };

struct CliConfig {
  Subcommand subcommand = Subcommand::Run;
  protocol::ProtocolConfig protocol;
  adversary::AdversarySpec adversary;
  // Empty optional means "random" (seeded).
  std::optional<std::string> message_hex;
  std::optional<std::string> message_b_hex;
  std::optional<std::string> id_a;
  std::optional<std::string> id_b;
  std::size_t trials = 1;
  std::size_t threads = 1;
  std::string out;  // empty: standard output
  Format format = Format::Json;
};

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exit codes: 0 delivered, then one per abort reason.
inline constexpr int kExitConfigInvalid = 1;
int exit_code(const std::optional<protocol::AbortReason>& abort);

// Throws CliError on unknown flags or values that violate the protocol
// configuration invariants. --help is reported as CliError with an empty
// message after the help text has been written to `out`.
CliConfig parse_args(const std::vector<std::string>& args, std::ostream& out);

// Resolves --message/--id-* flags for one run.
protocol::RunInputs resolve_inputs(const CliConfig& cli, const protocol::ProtocolConfig& config);

struct TrialRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::optional<protocol::AbortReason> abort;
  std::optional<double> s_first, s_second, qber_first, qber_second;
  std::size_t rounds_first = 0, rounds_second = 0;
  std::size_t receiver_pass = 0, receiver_fail = 0, sender_pass = 0, sender_fail = 0;
  std::optional<std::size_t> bit_errors;  // delivered runs only
  std::size_t message_bits = 0;
};

TrialRow trial_row(std::size_t trial, const protocol::RunReport& report);

struct TrialSummary {
  protocol::ProtocolConfig config;
  adversary::AdversarySpec adversary;
  std::vector<TrialRow> rows;  // ordered by trial index
};

TrialSummary run_trials(const CliConfig& cli);

// Aggregates, keyed in a fixed order. Missing values are null.
nlohmann::ordered_json aggregates(const TrialSummary& summary);
nlohmann::json summary_json(const TrialSummary& summary);
// "metric,value" rows carrying exactly the aggregates above.
std::string summary_csv(const TrialSummary& summary);

std::string tables_text();

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// The fast invariant suites.
std::vector<SuiteResult> run_selftest();

int cmd_run(const CliConfig& cli, std::ostream& out, std::ostream& err);
int cmd_trials(const CliConfig& cli, std::ostream& out, std::ostream& err);
int cmd_tables(std::ostream& out);
int cmd_selftest(std::ostream& out);

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace diqsdc::simcli
