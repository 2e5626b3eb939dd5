#include "medbt/status.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace medbt {

std::string_view to_string(Status status)
{
    switch (status) {
    case Status::Success: return "success";
    case Status::Failure: return "failure";
    case Status::Running: return "running";
    }
    return "?";
}

std::optional<Status> parse_status(std::string_view text)
{
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "success" || lower == "s") return Status::Success;
    if (lower == "failure" || lower == "f") return Status::Failure;
    if (lower == "running" || lower == "r") return Status::Running;
    return std::nullopt;
}

} // namespace medbt
