#pragma once

#include <nlohmann/json.hpp>

#include "diqsdc/run.hpp"

// JSON rendering of run reports. Schema changes bump kSchemaVersion; see
// docs/report-schema.md.
namespace diqsdc::report {

inline constexpr int kSchemaVersion = 1;

nlohmann::json config_json(const protocol::ProtocolConfig& config);
nlohmann::json adversary_json(const adversary::AdversarySpec& spec);
nlohmann::json chsh_json(const protocol::CheckSummary& check);
nlohmann::json auth_json(const protocol::AuthResult& auth);

nlohmann::json to_json(const protocol::RunReport& report, bool include_transcript = true);

}  // namespace diqsdc::report
