#pragma once

#include <array>
#include <string_view>

namespace medbt::corpus::detail {

struct EmbeddedEntry
{
    std::string_view name;
    std::string_view source;
    std::string_view landmarks;
};

extern const std::array<EmbeddedEntry, 3> kEmbedded;

} // namespace medbt::corpus::detail
