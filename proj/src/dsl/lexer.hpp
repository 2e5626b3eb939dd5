#pragma once

#include "medbt/dsl.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace medbt::dsl {

enum class TokenKind : std::uint8_t {
    Ident,
    String,
    Int,
    Real,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Equals,
    Greater,
    Less,
    Colon,
    Comma,
    End,
};

struct Token
{
    TokenKind kind = TokenKind::End;
    std::string text; // identifier, decoded string, or numeric spelling
    SourceSpan span;
};

std::string_view describe(TokenKind kind);

/// Tokenizes the whole input. Lexical problems are appended to `diagnostics`
/// and the offending bytes skipped, so the result always ends with End.
std::vector<Token> tokenize(std::string_view text, std::vector<ParseDiagnostic>& diagnostics);

} // namespace medbt::dsl
