#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "diqsdc/protocol.hpp"
#include "diqsdc/report.hpp"
#include "diqsdc/run.hpp"
#include "diqsdc/simcli.hpp"

namespace py = pybind11;
using namespace diqsdc;

namespace {

protocol::ProtocolConfig make_config(std::size_t n, std::size_t c, std::size_t k, std::size_t d, double noise_p,
                                     double storage_noise_p, double s_threshold, double auth_tolerance,
                                     double integrity_tolerance, const std::string& mode, std::uint64_t seed) {
  protocol::ProtocolConfig cfg;
  cfg.n = n;
  cfg.c = c;
  cfg.k = k;
  cfg.d = d;
  cfg.noise_p = noise_p;
  cfg.storage_noise_p = storage_noise_p;
  cfg.s_threshold = s_threshold;
  cfg.auth_tolerance = auth_tolerance;
  cfg.integrity_tolerance = integrity_tolerance;
  if (mode == "qsdc") cfg.mode = protocol::Mode::QSDC;
  else if (mode == "qd") cfg.mode = protocol::Mode::QD;
  else throw py::value_error("mode must be 'qsdc' or 'qd'");
  cfg.seed = seed;
  return cfg;
}

adversary::AttackKind attack_from(const std::string& text) {
  for (auto kind : {adversary::AttackKind::None, adversary::AttackKind::InterceptResend,
                    adversary::AttackKind::ImpersonateAlice, adversary::AttackKind::ImpersonateBob}) {
    if (adversary::name(kind) == text) return kind;
  }
  throw py::value_error("unknown adversary: " + text);
}

adversary::AppliesTo applies_from(const std::string& text) {
  for (auto a : {adversary::AppliesTo::FirstTransmission, adversary::AppliesTo::SecondTransmission,
                 adversary::AppliesTo::Both}) {
    if (adversary::name(a) == text) return a;
  }
  throw py::value_error("intercept_on must be 'first', 'second' or 'both'");
}

qcore::BellLabel label_from(const std::string& text) {
  for (auto l : qcore::kBellLabels)
    if (qcore::name(l) == text) return l;
  throw py::value_error("unknown Bell label: " + text);
}

qcore::SingleQubitOp op_from(const std::string& text) {
  for (auto op : qcore::kAllOps)
    if (qcore::name(op) == text) return op;
  throw py::value_error("unknown operator: " + text);
}

std::string run_json(std::size_t n, std::size_t c, std::size_t k, std::size_t d, double noise_p,
                     double storage_noise_p, double s_threshold, double auth_tolerance, double integrity_tolerance,
                     const std::string& mode, std::uint64_t seed, const std::string& adversary,
                     double intercept_basis_mix, const std::string& intercept_on, const std::string& message,
                     const std::string& message_b, const std::string& id_a, const std::string& id_b,
                     bool transcript) {
  const auto cfg = make_config(n, c, k, d, noise_p, storage_noise_p, s_threshold, auth_tolerance,
                               integrity_tolerance, mode, seed);
  const adversary::AdversarySpec spec{attack_from(adversary), intercept_basis_mix, applies_from(intercept_on)};
  protocol::RunInputs inputs;
  try {
    if (!message.empty()) inputs.message = protocol::bits_from_hex(message, n);
    if (!message_b.empty()) inputs.message_b = protocol::bits_from_hex(message_b, n);
    if (!id_a.empty()) inputs.id_a = protocol::bits_from_string(id_a);
    if (!id_b.empty()) inputs.id_b = protocol::bits_from_string(id_b);
  } catch (const std::invalid_argument& e) {
    throw py::value_error(e.what());
  }
  const auto report = protocol::run_protocol(cfg, protocol::complete_inputs(cfg, std::move(inputs)), spec);
  return report::to_json(report, transcript).dump();
}

py::tuple cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = simcli::main_entry(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_diqsdc, m) {
  m.doc() = "Device-independent QSDC simulator core";

  m.def("run_json", &run_json, py::arg("n") = 64, py::arg("c") = 16, py::arg("k") = 16, py::arg("d") = 6000,
        py::arg("noise_p") = 0.0, py::arg("storage_noise_p") = 0.0, py::arg("s_threshold") = 2.0,
        py::arg("auth_tolerance") = 0.0, py::arg("integrity_tolerance") = 0.0, py::arg("mode") = "qsdc",
        py::arg("seed") = 0, py::arg("adversary") = "none", py::arg("intercept_basis_mix") = 0.5,
        py::arg("intercept_on") = "both", py::arg("message") = "", py::arg("message_b") = "",
        py::arg("id_a") = "", py::arg("id_b") = "", py::arg("transcript") = true,
        "Runs one protocol instance and returns the report as a JSON string.");

  m.def("bell_transition",
        [](const std::string& initial, const std::string& op) {
          return std::string(qcore::name(protocol::bell_transition(label_from(initial), op_from(op))));
        },
        py::arg("initial"), py::arg("op"));

  m.def("bits_for_transition",
        [](const std::string& initial, const std::string& final) {
          const auto v = protocol::bits_for_transition(label_from(initial), label_from(final));
          return std::to_string(v >> 1) + std::to_string(v & 1);
        },
        py::arg("initial"), py::arg("final"));

  m.def("qd_decode",
        [](std::optional<std::string> prepared, const std::string& final, std::optional<std::string> alice_op) {
          std::optional<qcore::BellLabel> p;
          std::optional<qcore::SingleQubitOp> op;
          if (prepared) p = label_from(*prepared);
          if (alice_op) op = op_from(*alice_op);
          try {
            const auto bits = protocol::qd_decode(p, label_from(final), op);
            return py::make_tuple(int(bits.alice_bit), int(bits.bob_bit));
          } catch (const protocol::ProtocolError& e) {
            throw py::value_error(e.what());
          }
        },
        py::arg("prepared"), py::arg("final"), py::arg("alice_op"));

  m.def("chsh_analytic",
        [](const std::string& label) {
          const auto l = label_from(label);
          return protocol::chsh_analytic(qcore::bell_state(l), l);
        },
        py::arg("label"), "Frame-corrected CHSH value of an ideal Bell pair.");

  m.def("tables", &simcli::tables_text);

  m.def("selftest", [] {
    std::vector<std::tuple<std::string, bool, std::string>> out;
    for (const auto& s : simcli::run_selftest()) out.emplace_back(s.name, s.passed, s.detail);
    return out;
  });

  m.def("cli", &cli, py::arg("args"), "Runs the command-line front end; returns (exit_code, stdout, stderr).");
}
