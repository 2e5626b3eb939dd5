#pragma once

#include "medbt/dsl.hpp"
#include "medbt/engine.hpp"

#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace testing_support {

inline medbt::Tree parse_ok(const std::string& text)
{
    auto result = medbt::parse(text);
    if (!result.ok()) {
        std::string message = "test tree does not parse:";
        for (const auto& d : result.diagnostics) message += "\n  " + medbt::format_diagnostic(d, "test");
        throw std::runtime_error(message);
    }
    return std::move(*result.tree);
}

/// Hands out queued resolutions per leaf; nullopt once a queue is empty.
class QueueResolver : public medbt::LeafResolver
{
public:
    QueueResolver& push(const std::string& leaf, medbt::Resolution r)
    {
        queues[leaf].push_back(std::move(r));
        return *this;
    }
    QueueResolver& push(const std::string& leaf, std::initializer_list<medbt::Status> statuses)
    {
        for (auto s : statuses) push(leaf, medbt::Resolution::outcome(s));
        return *this;
    }

    std::optional<medbt::Resolution> resolve(const medbt::LeafQuery& query) override
    {
        asked.push_back(query.node.id);
        auto it = queues.find(query.node.id);
        if (it == queues.end() || it->second.empty()) return std::nullopt;
        auto r = it->second.front();
        it->second.pop_front();
        return r;
    }
    void halted(const medbt::Node& node) override { halted_leaves.push_back(node.id); }

    std::map<std::string, std::deque<medbt::Resolution>> queues;
    std::vector<std::string> asked;
    std::vector<std::string> halted_leaves;
};

/// (node id, status) of every exit event, in order.
inline std::vector<std::pair<std::string, medbt::Status>> exits(const std::vector<medbt::TraceEvent>& trace)
{
    std::vector<std::pair<std::string, medbt::Status>> out;
    for (const auto& e : trace)
        if (e.phase == medbt::TracePhase::Exit) out.emplace_back(e.node_id, *e.status);
    return out;
}

inline std::size_t count_events(const std::vector<medbt::TraceEvent>& trace, const std::string& node,
                                medbt::TracePhase phase)
{
    std::size_t n = 0;
    for (const auto& e : trace)
        if (e.node_id == node && e.phase == phase) ++n;
    return n;
}

} // namespace testing_support
