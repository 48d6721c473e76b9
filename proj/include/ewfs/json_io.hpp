#pragma once

#include <string>

#include "json.hpp"

#include "ewfs/betting.hpp"
#include "ewfs/polytope.hpp"
#include "ewfs/prescriptions.hpp"
#include "ewfs/scenario.hpp"
#include "ewfs/violation.hpp"

namespace ewfs {

using nlohmann::json;

// Complex numbers are serialized as [re, im]; bare numbers are accepted on
// input as purely real. Setting indices are 0-based everywhere on the wire;
// index 0 is the always-performed friend interrogation (1-based elsewhere
// maps to index + 1).
inline constexpr const char* kIndexingNote = "0-based settings; x = index + 1";

json complex_to_json(const cdouble& z);
cdouble complex_from_json(const json& j);

json table_to_json(const CorrelationTable& t);
CorrelationTable table_from_json(const json& j);

json ns_report_to_json(const NoSignallingReport& r);

json inequality_to_json(const Inequality& iq);
Inequality inequality_from_json(const json& j);

json certificate_to_json(const MembershipCertificate& cert);
json vertex_set_to_json(const VertexSet& vs);

BubbleScenario scenario_from_json(const json& j);

OptimizeConfig optimize_config_from_json(const json& j);
json violation_result_to_json(const ViolationResult& r);

json settlement_to_json(const SettlementReport& rep);
json audit_to_json(const AuditReport& rep);
json retro_report_to_json(const RetroReport& rep);

json load_json_file(const std::string& path);

}  // namespace ewfs
