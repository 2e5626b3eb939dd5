#pragma once

#include "medbt/node.hpp"

#include <string>
#include <vector>

namespace medbt {

struct Violation
{
    std::string node_id;
    std::string rule;

    bool operator==(const Violation&) const = default;
};

/// Structural checks. Empty result iff every node and tree invariant holds.
std::vector<Violation> validate(const Tree& tree);

} // namespace medbt
