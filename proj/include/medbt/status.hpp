#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string_view>

namespace medbt {

/// Result of ticking a node. Instantaneous leaves only ever produce Success or
/// Failure; Running comes from long-running leaves, pending human input, or
/// composites waiting on such a leaf.
enum class Status : std::uint8_t { Success, Failure, Running };

std::string_view to_string(Status status);

/// Accepts "success"/"failure"/"running" in any case and the short forms S/F/R.
std::optional<Status> parse_status(std::string_view text);

inline std::ostream& operator<<(std::ostream& os, Status status)
{
    return os << to_string(status);
}

} // namespace medbt
