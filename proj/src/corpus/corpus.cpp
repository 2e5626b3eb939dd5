#include "medbt/corpus.hpp"
#include "medbt/dsl.hpp"
#include "medbt/error.hpp"

#include "corpus_data.hpp"

#include <json.hpp>

namespace medbt {

const std::string& CorpusEntry::landmark(std::string_view landmark_name) const
{
    auto it = landmarks.find(std::string(landmark_name));
    if (it == landmarks.end())
        throw Error("corpus entry '" + name + "' has no landmark '" + std::string(landmark_name) + "'");
    return it->second;
}

std::vector<std::string> example_names()
{
    std::vector<std::string> names;
    for (const auto& e : corpus::detail::kEmbedded) names.emplace_back(e.name);
    return names;
}

CorpusEntry load_example(std::string_view name)
{
    for (const auto& embedded : corpus::detail::kEmbedded) {
        if (embedded.name != name) continue;

        CorpusEntry entry;
        entry.name = std::string(name);
        entry.source = std::string(embedded.source);
        auto parsed = parse(entry.source);
        if (!parsed.ok()) {
            std::string message = "corpus file '" + entry.name + ".bt' does not parse:";
            for (const auto& d : parsed.diagnostics) message += "\n  " + format_diagnostic(d, entry.name + ".bt");
            throw Error(message);
        }
        entry.tree = std::move(*parsed.tree);

        const auto landmarks = nlohmann::json::parse(embedded.landmarks);
        for (const auto& [key, value] : landmarks.items()) {
            const auto id = value.get<std::string>();
            if (!find_node(entry.tree, id))
                throw Error("corpus landmark '" + key + "' refers to missing node '" + id + "'");
            entry.landmarks.emplace(key, id);
        }
        return entry;
    }
    throw Error("unknown corpus example '" + std::string(name) + "' (blood_draw, airway, tumor_ablation)");
}

} // namespace medbt
