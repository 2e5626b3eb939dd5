#include "medbt/json_io.hpp"

#include <ostream>

namespace medbt {

namespace {

std::vector<BlackboardWrite> writes_from_json(const Json& json, const BlackboardSchema& schema)
{
    if (!json.is_object()) throw Error("\"set\" must be an object of key: value");
    std::vector<BlackboardWrite> writes;
    for (const auto& [key, value] : json.items()) {
        std::optional<ValueType> hint;
        if (auto it = schema.find(key); it != schema.end()) hint = it->second.type;
        writes.emplace_back(key, value_from_json(value, hint));
    }
    return writes;
}

Status status_from_json(const Json& json)
{
    if (!json.is_string()) throw Error("status must be a string");
    auto s = parse_status(json.get<std::string>());
    if (!s) throw Error("unknown status '" + json.get<std::string>() + "'");
    return *s;
}

std::size_t index_from_json(const Json& json)
{
    if (!json.is_number_integer() || json.get<std::int64_t>() < 0)
        throw Error("option index must be a non-negative integer");
    return json.get<std::size_t>();
}

} // namespace

Json value_to_json(const Value& value)
{
    return std::visit([](const auto& v) -> Json { return Json(v); }, value);
}

Value value_from_json(const Json& json, std::optional<ValueType> hint)
{
    Value value;
    if (json.is_boolean()) {
        value = json.get<bool>();
    } else if (json.is_number_integer()) {
        value = json.get<std::int64_t>();
    } else if (json.is_number()) {
        value = json.get<double>();
    } else if (json.is_string()) {
        value = json.get<std::string>();
    } else if (json.is_array()) {
        StringList list;
        for (const auto& item : json) {
            if (!item.is_string()) throw Error("list values must contain only strings");
            list.push_back(item.get<std::string>());
        }
        value = std::move(list);
    } else {
        throw Error("unsupported blackboard value " + json.dump());
    }
    if (hint) {
        auto converted = coerce(value, *hint);
        if (!converted)
            throw Error("value " + json.dump() + " is not a " + std::string(to_string(*hint)));
        return *converted;
    }
    return value;
}

Json trace_event_to_json(const TraceEvent& event)
{
    Json j;
    j["tick"] = event.tick;
    j["node"] = event.node_id;
    j["phase"] = to_string(event.phase);
    if (event.status) j["status"] = to_string(*event.status);
    if (!event.delta.empty()) {
        Json delta = Json::array();
        for (const auto& d : event.delta) {
            Json entry;
            entry["key"] = d.key;
            entry["old"] = d.old_value ? value_to_json(*d.old_value) : Json(nullptr);
            entry["new"] = value_to_json(d.new_value);
            delta.push_back(std::move(entry));
        }
        j["delta"] = std::move(delta);
    }
    return j;
}

std::string trace_line(const TraceEvent& event)
{
    return trace_event_to_json(event).dump();
}

void write_trace(std::ostream& out, const std::vector<TraceEvent>& trace)
{
    for (const auto& event : trace) out << trace_line(event) << '\n';
}

ResolutionScript script_from_json(const Json& json, const BlackboardSchema& schema)
{
    if (!json.is_object()) throw Error("script must be a JSON object mapping leaf ids to attempt lists");
    ResolutionScript script;
    for (const auto& [leaf, attempts] : json.items()) {
        if (!attempts.is_array()) throw Error("script entry for '" + leaf + "' must be an array");
        auto& list = script.entries[leaf];
        for (const auto& a : attempts) {
            ScriptEntry entry;
            if (a.is_string()) {
                entry.status = status_from_json(a);
            } else if (a.is_number_integer()) {
                entry.choice = index_from_json(a);
            } else if (a.is_object()) {
                if (a.contains("status")) entry.status = status_from_json(a["status"]);
                if (a.contains("choice")) entry.choice = index_from_json(a["choice"]);
                if (a.contains("set")) entry.writes = writes_from_json(a["set"], schema);
            } else {
                throw Error("unsupported attempt for '" + leaf + "': " + a.dump());
            }
            list.push_back(std::move(entry));
        }
    }
    return script;
}

Json report_to_json(const SimulationReport& report)
{
    Json j;
    j["tree"] = report.tree;
    j["seed"] = report.seed;
    j["runs"] = report.runs;
    j["success_rate"] = report.success_rate;
    j["mean_ticks"] = report.mean_ticks;
    Json stats = Json::object();
    for (const auto& [leaf, s] : report.leaf_stats) {
        Json entry;
        entry["attempts"] = s.attempts;
        entry["runs_ticked"] = s.runs_ticked;
        entry["ticked_fraction"] = report.ticked_fraction(leaf);
        stats[leaf] = std::move(entry);
    }
    j["leaf_stats"] = std::move(stats);
    j["rng"] = report.rng;
    j["successes"] = report.successes;
    j["failures"] = report.failures;
    j["budget_exhausted"] = report.budget_exhausted;
    return j;
}

Json blackboard_to_json(const Blackboard& blackboard)
{
    Json j = Json::object();
    for (const auto& [key, value] : blackboard.entries()) j[key] = value_to_json(value);
    return j;
}

Blackboard blackboard_from_json(const Json& json, Blackboard base)
{
    if (!json.is_object()) throw Error("blackboard must be a JSON object");
    for (const auto& [key, value] : json.items()) {
        std::optional<ValueType> hint;
        if (auto it = base.schema().find(key); it != base.schema().end()) hint = it->second.type;
        try {
            base.set(key, value_from_json(value, hint));
        } catch (const BlackboardError& e) {
            throw Error(e.what());
        }
    }
    return base;
}

Json prompt_to_json(const Prompt& prompt)
{
    Json j;
    j["leaf"] = prompt.leaf_id;
    j["kind"] = keyword(prompt.kind);
    j["label"] = prompt.label;
    if (prompt.kind == NodeKind::Select) j["options"] = prompt.options;
    return j;
}

Answer answer_from_json(const Json& json, const BlackboardSchema& schema)
{
    if (!json.is_object() || !json.contains("leaf") || !json["leaf"].is_string())
        throw Error("answer must be an object with a \"leaf\" id");
    Answer a;
    a.leaf_id = json["leaf"].get<std::string>();
    if (json.contains("status")) a.status = status_from_json(json["status"]);
    if (json.contains("choice")) a.choice = index_from_json(json["choice"]);
    if (json.contains("set")) a.writes = writes_from_json(json["set"], schema);
    return a;
}

} // namespace medbt
