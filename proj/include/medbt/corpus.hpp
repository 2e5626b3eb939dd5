#pragma once

#include "medbt/error.hpp"
#include "medbt/node.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace medbt {

/// One of the checked-in procedure trees with its named landmarks.
struct CorpusEntry
{
    std::string name;
    std::string source;
    Tree tree;
    std::map<std::string, std::string> landmarks; // landmark name -> node id

    /// Node id of a landmark; throws Error for unknown names.
    const std::string& landmark(std::string_view name) const;
};

/// blood_draw, airway, tumor_ablation
std::vector<std::string> example_names();

/// Parses, validates and resolves landmarks. Throws Error for unknown names
/// and for corpus files that fail to parse or reference missing nodes.
CorpusEntry load_example(std::string_view name);

} // namespace medbt
