#pragma once

#include "medbt/exec.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace medbt {

using Json = nlohmann::ordered_json;

Json value_to_json(const Value& value);
/// `hint` selects int vs real for numbers; without it integers stay integers.
Value value_from_json(const Json& json, std::optional<ValueType> hint = std::nullopt);

/// One flat object: tick, node, phase, then status (exit only) and delta
/// (only when the node wrote the blackboard).
Json trace_event_to_json(const TraceEvent& event);
std::string trace_line(const TraceEvent& event);
void write_trace(std::ostream& out, const std::vector<TraceEvent>& trace);

/// Script files map leaf ids to arrays of attempts. An attempt is a status
/// string ("success", "failure", "running", or S/F/R), an integer option
/// index (Select), or an object {"status"?, "choice"?, "set"?: {key: value}}.
///   {"laryngoscopy": ["F", "F", "S"], "choose_plan": [2]}
/// Writes are typed against `schema` when the key is declared there.
ResolutionScript script_from_json(const Json& json, const BlackboardSchema& schema = {});

Json report_to_json(const SimulationReport& report);

Json blackboard_to_json(const Blackboard& blackboard);
/// Overlays the entries of `json` onto `base`, typing values by base's schema.
Blackboard blackboard_from_json(const Json& json, Blackboard base);

Json prompt_to_json(const Prompt& prompt);
/// {"leaf": id, "status"?: ..., "choice"?: n, "set"?: {...}}
Answer answer_from_json(const Json& json, const BlackboardSchema& schema = {});

} // namespace medbt
