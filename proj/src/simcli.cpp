#include "diqsdc/simcli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "diqsdc/report.hpp"

namespace diqsdc::simcli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
using protocol::AbortReason;

constexpr int kExitIoFailure = 10;

const std::map<std::string, adversary::AttackKind> kAttackNames = {
    {"none", adversary::AttackKind::None},
    {"intercept-resend", adversary::AttackKind::InterceptResend},
    {"impersonate-alice", adversary::AttackKind::ImpersonateAlice},
    {"impersonate-bob", adversary::AttackKind::ImpersonateBob},
};

const std::map<std::string, adversary::AppliesTo> kAppliesNames = {
    {"first", adversary::AppliesTo::FirstTransmission},
    {"second", adversary::AppliesTo::SecondTransmission},
    {"both", adversary::AppliesTo::Both},
};

const std::map<std::string, protocol::Mode> kModeNames = {{"qsdc", protocol::Mode::QSDC},
                                                           {"qd", protocol::Mode::QD}};

const std::map<std::string, Format> kFormatNames = {{"json", Format::Json}, {"csv", Format::Csv}};

void add_protocol_options(CLI::App& sub, CliConfig& cli) {
  auto& p = cli.protocol;
  sub.add_option("--n", p.n, "message length in bits")->capture_default_str();
  sub.add_option("--c", p.c, "number of check bits")->capture_default_str();
  sub.add_option("--k", p.k, "identity length in bit pairs")->capture_default_str();
  sub.add_option("--d", p.d, "pairs per CHSH security check")->capture_default_str();
  sub.add_option("--noise-p", p.noise_p, "depolarizing probability per transmitted qubit")->capture_default_str();
  sub.add_option("--storage-noise-p", p.storage_noise_p, "depolarizing probability per stored qubit")
      ->capture_default_str();
  sub.add_option("--s-threshold", p.s_threshold, "abort when the CHSH estimate is at or below this")
      ->capture_default_str();
  sub.add_option("--auth-tolerance", p.auth_tolerance, "tolerated authentication failure fraction")
      ->capture_default_str();
  sub.add_option("--integrity-tolerance", p.integrity_tolerance, "tolerated check-bit mismatch fraction")
      ->capture_default_str();
  sub.add_option("--mode", p.mode, "protocol variant (default qsdc)")->transform(CLI::CheckedTransformer(kModeNames, CLI::ignore_case).description("{qsdc,qd}"));
  sub.add_option("--seed", p.seed, "64-bit seed")->capture_default_str();
  sub.add_option("--adversary", cli.adversary.kind, "attack model (default none)")
      ->transform(CLI::CheckedTransformer(kAttackNames, CLI::ignore_case).description("{none,intercept-resend,impersonate-alice,impersonate-bob}"));
  sub.add_option("--intercept-basis-mix", cli.adversary.intercept_basis_mix,
                 "probability that an intercept uses the Z basis")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub.add_option("--intercept-on", cli.adversary.applies_to, "transmissions the interceptor attacks (default both)")
      ->transform(CLI::CheckedTransformer(kAppliesNames, CLI::ignore_case).description("{first,second,both}"));
  sub.add_option("--message", cli.message_hex, "Alice's message as hex, or 'random'");
  sub.add_option("--message-b", cli.message_b_hex, "Bob's message (qd mode) as hex, or 'random'");
  sub.add_option("--id-a", cli.id_a, "Alice's identity as a 2k-bit string, or 'random'");
  sub.add_option("--id-b", cli.id_b, "Bob's identity as a 2k-bit string, or 'random'");
  sub.add_option("--out", cli.out, "output path (default: standard output)");
  sub.add_option("--format", cli.format, "output format (default json)")->transform(CLI::CheckedTransformer(kFormatNames, CLI::ignore_case).description("{json,csv}"));
}

std::optional<std::string> explicit_value(const std::optional<std::string>& v) {
  if (!v || *v == "random") return std::nullopt;
  return v;
}

bool write_output(const CliConfig& cli, const std::string& text, std::ostream& out, std::ostream& err) {
  if (cli.out.empty() || cli.out == "-") {
    out << text;
    return static_cast<bool>(out);
  }
  std::ofstream file(cli.out, std::ios::binary | std::ios::trunc);
  if (!file) {
    err << "error: cannot open " << cli.out << " for writing\n";
    return false;
  }
  file << text;
  file.close();
  if (!file) {
    err << "error: failed writing " << cli.out << "\n";
    return false;
  }
  return true;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

constexpr std::string_view kRowHeader =
    "trial,seed,abort,s_first,rounds_first,qber_first,s_second,rounds_second,qber_second,"
    "receiver_pass,receiver_fail,sender_pass,sender_fail,bit_errors,message_bits";

std::string csv_field(const json& v) { return v.is_null() ? std::string() : (v.is_string() ? v.get<std::string>() : v.dump()); }

json row_json(const TrialRow& r) {
  return {{"trial", r.trial},
          {"seed", r.seed},
          {"abort", r.abort ? std::string(protocol::name(*r.abort)) : std::string("none")},
          {"s_first", optional_number(r.s_first)},
          {"rounds_first", r.rounds_first},
          {"qber_first", optional_number(r.qber_first)},
          {"s_second", optional_number(r.s_second)},
          {"rounds_second", r.rounds_second},
          {"qber_second", optional_number(r.qber_second)},
          {"receiver_pass", r.receiver_pass},
          {"receiver_fail", r.receiver_fail},
          {"sender_pass", r.sender_pass},
          {"sender_fail", r.sender_fail},
          {"bit_errors", r.bit_errors ? json(*r.bit_errors) : json(nullptr)},
          {"message_bits", r.message_bits}};
}

std::string row_csv(const TrialRow& r) {
  const json j = row_json(r);
  std::string line;
  std::istringstream header{std::string(kRowHeader)};
  std::string key;
  bool first = true;
  while (std::getline(header, key, ',')) {
    if (!first) line += ',';
    line += csv_field(j.at(key));
    first = false;
  }
  return line;
}

struct Moments {
  std::size_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(const std::optional<double>& v) {
    if (!v) return;
    ++count;
    sum += *v;
    sum_sq += *v * *v;
  }
  json mean() const { return count ? json(sum / static_cast<double>(count)) : json(nullptr); }
  json stddev() const {
    if (count < 2) return count ? json(0.0) : json(nullptr);
    const double n = static_cast<double>(count);
    const double var = (sum_sq - sum * sum / n) / (n - 1.0);
    return json(std::sqrt(std::max(var, 0.0)));
  }
};

json ratio(std::size_t num, std::size_t den) {
  return den ? json(static_cast<double>(num) / static_cast<double>(den)) : json(nullptr);
}

std::size_t hamming(const protocol::BitString& a, const protocol::BitString& b) {
  std::size_t errors = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) errors += a[i] != b[i];
  return errors + (a.size() > b.size() ? a.size() - b.size() : b.size() - a.size());
}

}  // namespace

int exit_code(const std::optional<AbortReason>& abort) {
  if (!abort) return 0;
  switch (*abort) {
    case AbortReason::ConfigInvalid: return 1;
    case AbortReason::ChshFirstFailed: return 2;
    case AbortReason::ReceiverAuthFailed: return 3;
    case AbortReason::ChshSecondFailed: return 4;
    case AbortReason::SenderAuthFailed: return 5;
    case AbortReason::IntegrityFailed: return 6;
  }
  return 1;
}

protocol::RunInputs resolve_inputs(const CliConfig& cli, const protocol::ProtocolConfig& config) {
  protocol::RunInputs inputs;
  try {
    if (auto v = explicit_value(cli.message_hex)) inputs.message = protocol::bits_from_hex(*v, config.n);
    if (auto v = explicit_value(cli.message_b_hex)) inputs.message_b = protocol::bits_from_hex(*v, config.n);
    if (auto v = explicit_value(cli.id_a)) inputs.id_a = protocol::bits_from_string(*v);
    if (auto v = explicit_value(cli.id_b)) inputs.id_b = protocol::bits_from_string(*v);
  } catch (const std::invalid_argument& e) {
    throw CliError(e.what());
  }
  if (!inputs.id_a.empty() && inputs.id_a.size() != 2 * config.k) throw CliError("--id-a must have 2k bits");
  if (!inputs.id_b.empty() && inputs.id_b.size() != 2 * config.k) throw CliError("--id-b must have 2k bits");
  return protocol::complete_inputs(config, std::move(inputs));
}

CliConfig parse_args(const std::vector<std::string>& args, std::ostream& out) {
  CliConfig cli;
  CLI::App app{"Simulator for device-independent quantum secure direct communication with user authentication"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand all help");

  auto* run = app.add_subcommand("run", "execute one protocol run and write its report");
  auto* trials = app.add_subcommand("trials", "execute a batch of independent runs and write a summary");
  auto* tables = app.add_subcommand("tables", "print the encoding tables computed by the simulator");
  auto* selftest = app.add_subcommand("selftest", "run the fast invariant suites");
  add_protocol_options(*run, cli);
  add_protocol_options(*trials, cli);
  trials->add_option("--trials", cli.trials, "number of trials")->check(CLI::PositiveNumber)->capture_default_str();
  trials->add_option("--threads", cli.threads, "worker threads (output does not depend on this)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::vector<const char*> argv;
  argv.push_back("diqsdc");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    throw CliError("");
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    throw CliError("");
  } catch (const CLI::ParseError& e) {
    throw CliError(e.what());
  }

  if (run->parsed()) cli.subcommand = Subcommand::Run;
  else if (trials->parsed()) cli.subcommand = Subcommand::Trials;
  else if (tables->parsed()) cli.subcommand = Subcommand::Tables;
  else if (selftest->parsed()) cli.subcommand = Subcommand::Selftest;

  if (cli.subcommand == Subcommand::Run || cli.subcommand == Subcommand::Trials) {
    try {
      cli.protocol.validate();
    } catch (const protocol::ProtocolError& e) {
      throw CliError(e.what());
    }
    resolve_inputs(cli, cli.protocol);
  }
  return cli;
}

TrialRow trial_row(std::size_t trial, const protocol::RunReport& report) {
  TrialRow row;
  row.trial = trial;
  row.seed = report.config.seed;
  row.abort = report.abort;
  if (report.chsh_first) {
    row.s_first = report.chsh_first->estimate.s_value;
    row.rounds_first = report.chsh_first->estimate.rounds_used;
    row.qber_first = report.chsh_first->estimate.qber;
  }
  if (report.chsh_second) {
    row.s_second = report.chsh_second->estimate.s_value;
    row.rounds_second = report.chsh_second->estimate.rounds_used;
    row.qber_second = report.chsh_second->estimate.qber;
  }
  if (report.receiver_auth) {
    row.receiver_pass = report.receiver_auth->pass_count;
    row.receiver_fail = report.receiver_auth->fail_count;
  }
  if (report.sender_auth) {
    row.sender_pass = report.sender_auth->pass_count;
    row.sender_fail = report.sender_auth->fail_count;
  }
  row.message_bits = report.inputs.message.size();
  if (report.delivered_message) {
    std::size_t errors = hamming(*report.delivered_message, report.inputs.message);
    if (report.delivered_message_b) {
      errors += hamming(*report.delivered_message_b, report.inputs.message_b);
      row.message_bits += report.inputs.message_b.size();
    }
    row.bit_errors = errors;
  }
  return row;
}

TrialSummary run_trials(const CliConfig& cli) {
  TrialSummary summary{cli.protocol, cli.adversary, std::vector<TrialRow>(cli.trials)};
  auto work = [&](std::size_t worker, std::size_t workers) {
    for (std::size_t i = worker; i < cli.trials; i += workers) {
      protocol::ProtocolConfig config = cli.protocol;
      config.seed = derive_seed(cli.protocol.seed, i);
      const auto inputs = resolve_inputs(cli, config);
      summary.rows[i] = trial_row(i, protocol::run_protocol(config, inputs, cli.adversary));
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(cli.threads, cli.trials));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  return summary;
}

ordered_json aggregates(const TrialSummary& summary) {
  std::array<std::size_t, 7> histogram{};  // [0] = none, then AbortReason + 1
  Moments s_first, s_second, qber_first, qber_second;
  std::size_t rx_pass = 0, rx_total = 0, tx_pass = 0, tx_total = 0;
  std::size_t delivered = 0, bit_errors = 0, bits = 0;
  for (const auto& r : summary.rows) {
    ++histogram[r.abort ? static_cast<std::size_t>(*r.abort) + 1 : 0];
    s_first.add(r.s_first);
    s_second.add(r.s_second);
    qber_first.add(r.qber_first);
    qber_second.add(r.qber_second);
    rx_pass += r.receiver_pass;
    rx_total += r.receiver_pass + r.receiver_fail;
    tx_pass += r.sender_pass;
    tx_total += r.sender_pass + r.sender_fail;
    if (r.bit_errors) {
      ++delivered;
      bit_errors += *r.bit_errors;
      bits += r.message_bits;
    }
  }
  ordered_json agg;
  agg["trials"] = summary.rows.size();
  agg["abort_none"] = histogram[0];
  for (std::size_t i = 0; i < 6; ++i) {
    agg["abort_" + std::string(protocol::name(static_cast<AbortReason>(i)))] = histogram[i + 1];
  }
  agg["s_first_count"] = s_first.count;
  agg["s_first_mean"] = s_first.mean();
  agg["s_first_stddev"] = s_first.stddev();
  agg["s_second_count"] = s_second.count;
  agg["s_second_mean"] = s_second.mean();
  agg["s_second_stddev"] = s_second.stddev();
  agg["qber_first_mean"] = qber_first.mean();
  agg["qber_second_mean"] = qber_second.mean();
  agg["receiver_auth_pass_rate"] = ratio(rx_pass, rx_total);
  agg["sender_auth_pass_rate"] = ratio(tx_pass, tx_total);
  agg["delivered"] = delivered;
  agg["bit_error_rate"] = ratio(bit_errors, bits);
  return agg;
}

json summary_json(const TrialSummary& summary) {
  json rows = json::array();
  for (const auto& r : summary.rows) rows.push_back(row_json(r));
  return {{"schema_version", report::kSchemaVersion},
          {"kind", "trial_summary"},
          {"config", report::config_json(summary.config)},
          {"adversary", report::adversary_json(summary.adversary)},
          {"aggregates", json::parse(aggregates(summary).dump())},
          {"rows", rows}};
}

std::string summary_csv(const TrialSummary& summary) {
  std::string out = "metric,value\n";
  const auto agg = aggregates(summary);
  for (const auto& [key, value] : agg.items()) {
    out += key;
    out += ',';
    out += value.is_null() ? std::string() : value.dump();
    out += '\n';
  }
  return out;
}

std::string tables_text() {
  using protocol::BellLabel;
  std::ostringstream out;
  out << "# QSDC encoding and decoding rules\n";
  out << std::left << std::setw(10) << "initial" << std::setw(6) << "bits" << std::setw(9) << "unitary"
      << std::setw(10) << "final" << "decoded\n";
  for (BellLabel initial : qcore::kBellLabels) {
    for (std::uint8_t v = 0; v < 4; ++v) {
      const auto op = protocol::pauli_for_bits(v);
      const auto final = protocol::bell_transition(initial, op);
      const auto decoded = protocol::bits_for_transition(initial, final);
      out << std::setw(10) << qcore::name(initial) << std::setw(6)
          << protocol::bits_to_string({static_cast<std::uint8_t>(v >> 1), static_cast<std::uint8_t>(v & 1)})
          << std::setw(9) << qcore::name(op) << std::setw(10) << qcore::name(final)
          << protocol::bits_to_string({static_cast<std::uint8_t>(decoded >> 1), static_cast<std::uint8_t>(decoded & 1)})
          << "\n";
    }
  }
  out << "\n# Dialogue encoding rules\n";
  out << std::setw(7) << "alice" << std::setw(5) << "bob" << std::setw(10) << "prepared" << std::setw(9)
      << "unitary" << std::setw(10) << "final" << "decoded(alice,bob)\n";
  for (std::uint8_t alice = 0; alice < 2; ++alice) {
    for (std::uint8_t bob = 0; bob < 2; ++bob) {
      for (BellLabel prepared : protocol::qd_prepare_family(bob)) {
        for (auto op : protocol::qd_op_family(alice)) {
          const auto final = protocol::bell_transition(prepared, op);
          const auto bob_view = protocol::qd_decode(prepared, final, std::nullopt);
          const auto alice_view = protocol::qd_decode(std::nullopt, final, op);
          out << std::setw(7) << int(alice) << std::setw(5) << int(bob) << std::setw(10) << qcore::name(prepared)
              << std::setw(9) << qcore::name(op) << std::setw(10) << qcore::name(final) << int(bob_view.alice_bit)
              << "," << int(alice_view.bob_bit) << "\n";
        }
      }
    }
  }
  return out.str();
}

int cmd_run(const CliConfig& cli, std::ostream& out, std::ostream& err) {
  const auto inputs = resolve_inputs(cli, cli.protocol);
  const auto report = protocol::run_protocol(cli.protocol, inputs, cli.adversary);
  std::string text;
  if (cli.format == Format::Csv) {
    text = std::string(kRowHeader) + "\n" + row_csv(trial_row(0, report)) + "\n";
  } else {
    text = report::to_json(report).dump(2) + "\n";
  }
  if (!write_output(cli, text, out, err)) return kExitIoFailure;
  if (report.abort == AbortReason::ConfigInvalid) err << "error: " << report.abort_detail << "\n";
  return exit_code(report.abort);
}

int cmd_trials(const CliConfig& cli, std::ostream& out, std::ostream& err) {
  const TrialSummary summary = run_trials(cli);
  const std::string text = cli.format == Format::Csv ? summary_csv(summary) : summary_json(summary).dump(2) + "\n";
  return write_output(cli, text, out, err) ? 0 : kExitIoFailure;
}

int cmd_tables(std::ostream& out) {
  out << tables_text();
  return 0;
}

int cmd_selftest(std::ostream& out) {
  bool all = true;
  for (const auto& suite : run_selftest()) {
    out << (suite.passed ? "PASS " : "FAIL ") << suite.name;
    if (!suite.detail.empty()) out << "  (" << suite.detail << ")";
    out << "\n";
    all = all && suite.passed;
  }
  return all ? 0 : 1;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig cli;
  try {
    cli = parse_args(args, out);
  } catch (const CliError& e) {
    if (std::string_view(e.what()).empty()) return 0;  // help
    err << "error: " << e.what() << "\n";
    return kExitConfigInvalid;
  }
  try {
    switch (cli.subcommand) {
      case Subcommand::Run: return cmd_run(cli, out, err);
      case Subcommand::Trials: return cmd_trials(cli, out, err);
      case Subcommand::Tables: return cmd_tables(out);
      case Subcommand::Selftest: return cmd_selftest(out);
    }
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigInvalid;
  }
  return kExitConfigInvalid;
}

}  // namespace diqsdc::simcli
