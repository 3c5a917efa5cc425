#include "diqsdc/report.hpp"

namespace diqsdc::report {

using nlohmann::json;
using protocol::name;

json config_json(const protocol::ProtocolConfig& config) {
  return {{"n", config.n},
          {"c", config.c},
          {"k", config.k},
          {"d", config.d},
          {"s_threshold", config.s_threshold},
          {"auth_tolerance", config.auth_tolerance},
          {"integrity_tolerance", config.integrity_tolerance},
          {"noise_p", config.noise_p},
          {"storage_noise_p", config.storage_noise_p},
          {"mode", name(config.mode)},
          {"seed", config.seed}};
}

json adversary_json(const adversary::AdversarySpec& spec) {
  return {{"kind", adversary::name(spec.kind)},
          {"intercept_basis_mix", spec.intercept_basis_mix},
          {"applies_to", adversary::name(spec.applies_to)}};
}

json chsh_json(const protocol::CheckSummary& check) {
  const auto& est = check.estimate;
  json counts = json::object();
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const std::string key = "a" + std::to_string(a) + "b" + std::to_string(b + 1);
      counts[key] = {{"agree", est.counts[a][b][0]}, {"disagree", est.counts[a][b][1]}};
    }
  }
  return {{"s_value", est.s_value},
          {"rounds_used", est.rounds_used},
          {"rounds_total", est.rounds_total},
          {"qber", est.qber ? json(*est.qber) : json(nullptr)},
          {"counts", counts},
          {"verdict", name(check.verdict)}};
}

json auth_json(const protocol::AuthResult& auth) {
  return {{"pass_count", auth.pass_count}, {"fail_count", auth.fail_count}, {"verdict", name(auth.verdict)}};
}

namespace {

json integrity_json(const protocol::IntegrityResult& r) {
  return {{"checked", r.checked}, {"mismatches", r.mismatches}, {"verdict", name(r.verdict)}};
}

}  // namespace

json to_json(const protocol::RunReport& report, bool include_transcript) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["config"] = config_json(report.config);
  out["adversary"] = adversary_json(report.adversary);

  json inputs = {{"id_a", protocol::bits_to_string(report.inputs.id_a)},
                 {"id_b", protocol::bits_to_string(report.inputs.id_b)},
                 {"message", protocol::bits_to_hex(report.inputs.message)}};
  if (report.config.mode == protocol::Mode::QD) inputs["message_b"] = protocol::bits_to_hex(report.inputs.message_b);
  out["inputs"] = inputs;

  if (report.chsh_first) out["chsh_first"] = chsh_json(*report.chsh_first);
  if (report.chsh_second) out["chsh_second"] = chsh_json(*report.chsh_second);
  if (report.receiver_auth) out["receiver_auth"] = auth_json(*report.receiver_auth);
  if (report.sender_auth) out["sender_auth"] = auth_json(*report.sender_auth);
  if (report.integrity) out["integrity"] = integrity_json(*report.integrity);
  if (report.integrity_b) out["integrity_b"] = integrity_json(*report.integrity_b);
  if (report.delivered_message) out["delivered_message"] = protocol::bits_to_hex(*report.delivered_message);
  if (report.delivered_message_b) out["delivered_message_b"] = protocol::bits_to_hex(*report.delivered_message_b);

  out["abort"] = report.abort ? std::string(name(*report.abort)) : std::string("none");
  if (!report.abort_detail.empty()) out["abort_detail"] = report.abort_detail;

  const auto& u = report.usage;
  out["pair_usage"] = {{"prepared", u.prepared},
                       {"first_check", u.first_check},
                       {"identity", u.identity},
                       {"second_check", u.second_check},
                       {"sender_id", u.sender_id},
                       {"message", u.message}};

  if (include_transcript) {
    json log = json::array();
    for (const auto& a : report.transcript) {
      log.push_back({{"seq", a.seq}, {"party", a.party}, {"step", a.step}, {"event", a.event}, {"data", a.data}});
    }
    out["transcript"] = std::move(log);
  }
  return out;
}

}  // namespace diqsdc::report
