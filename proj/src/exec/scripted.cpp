#include "medbt/exec.hpp"

namespace medbt {

ResolutionScript& ResolutionScript::add(const std::string& leaf, Status status)
{
    entries[leaf].push_back(ScriptEntry{status, std::nullopt, {}});
    return *this;
}

ResolutionScript& ResolutionScript::add(const std::string& leaf, std::initializer_list<Status> statuses)
{
    for (Status s : statuses) add(leaf, s);
    return *this;
}

ResolutionScript& ResolutionScript::choose(const std::string& leaf, std::size_t option)
{
    entries[leaf].push_back(ScriptEntry{Status::Success, option, {}});
    return *this;
}

std::optional<Resolution> ScriptedResolver::resolve(const LeafQuery& query)
{
    const Node& node = query.node;
    auto it = m_script.entries.find(node.id);
    if (it == m_script.entries.end()) return std::nullopt;

    std::size_t& cursor = m_cursor[node.id];
    if (cursor >= it->second.size())
        throw ScriptUnderrun(node.id, "script underrun: leaf '" + node.id + "' ticked more than " +
                                          std::to_string(it->second.size()) + " time(s)");
    const ScriptEntry& entry = it->second[cursor++];

    if (node.kind == NodeKind::Select && entry.status == Status::Success) {
        if (!entry.choice)
            throw ExecutionError(node.id, "script gives select '" + node.id + "' success without a choice");
        return Resolution::chose(*entry.choice);
    }
    return Resolution::outcome(entry.status, entry.writes);
}

std::size_t ScriptedResolver::consumed(const std::string& leaf) const
{
    auto it = m_cursor.find(leaf);
    return it == m_cursor.end() ? 0 : it->second;
}

} // namespace medbt
