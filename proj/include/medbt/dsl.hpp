#pragma once

#include "medbt/node.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace medbt {

/// 1-based position in the source; columns and lengths count UTF-8 code points.
struct SourceSpan
{
    int line = 1;
    int column = 1;
    int length = 1;

    bool operator==(const SourceSpan&) const = default;
};

enum class Severity : std::uint8_t { Error, Warning };

struct ParseDiagnostic
{
    SourceSpan span;
    Severity severity = Severity::Error;
    std::string message;
};

struct ParseResult
{
    /// Present iff no error diagnostics were produced.
    std::optional<Tree> tree;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return tree.has_value(); }
    std::size_t error_count() const;
};

/// Parses a `.bt` program. On success the tree has every id assigned and
/// passes validate(); structural violations are reported as positioned
/// errors. Never throws on malformed input.
ParseResult parse(std::string_view text);

/// Parses `key op literal` on its own, e.g. the value of a check= parameter.
std::optional<Predicate> parse_predicate(std::string_view text);

/// Canonical text: two-space indentation, one node header per line, fixed
/// parameter order. Ids are written only where they differ from the ones
/// parse() would derive. parse(serialize(t)) reproduces t.
std::string serialize(const Tree& tree);

/// "name:line:col: error: message"
std::string format_diagnostic(const ParseDiagnostic& diagnostic, std::string_view source_name);

} // namespace medbt
