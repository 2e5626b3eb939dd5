#include "lexer.hpp"

#include <cctype>

namespace medbt::dsl {

namespace {

bool is_word_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_digit(char c)
{
    return c >= '0' && c <= '9';
}

class Lexer
{
public:
    Lexer(std::string_view text, std::vector<ParseDiagnostic>& diagnostics)
        : m_text(text), m_diagnostics(diagnostics)
    {}

    std::vector<Token> run()
    {
        std::vector<Token> tokens;
        for (;;) {
            skip_space_and_comments();
            if (m_pos >= m_text.size()) break;
            if (auto token = next()) tokens.push_back(std::move(*token));
        }
        Token end;
        end.kind = TokenKind::End;
        end.span = end_span();
        tokens.push_back(std::move(end));
        return tokens;
    }

private:
    char peek(std::size_t ahead = 0) const
    {
        return m_pos + ahead < m_text.size() ? m_text[m_pos + ahead] : '\0';
    }

    void advance()
    {
        const char c = m_text[m_pos++];
        if (c == '\n') {
            ++m_line;
            m_column = 1;
        } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++m_column;
        }
    }

    SourceSpan span_from(int line, int column) const
    {
        SourceSpan span{line, column, 1};
        if (line == m_line) span.length = std::max(1, m_column - column);
        return span;
    }

    // Position of the last character, used for "unexpected end of input".
    SourceSpan end_span() const
    {
        int line = 1, column = 1, last_line = 1, last_column = 1;
        for (char c : m_text) {
            if ((static_cast<unsigned char>(c) & 0xC0) == 0x80) continue;
            last_line = line;
            last_column = column;
            if (c == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        return SourceSpan{last_line, last_column, 1};
    }

    void error(SourceSpan span, std::string message)
    {
        m_diagnostics.push_back({span, Severity::Error, std::move(message)});
    }

    void skip_space_and_comments()
    {
        while (m_pos < m_text.size()) {
            const char c = peek();
            if (c == '#') {
                while (m_pos < m_text.size() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::optional<Token> next()
    {
        const int line = m_line, column = m_column;
        const char c = peek();
        Token token;

        auto single = [&](TokenKind kind) {
            advance();
            token.kind = kind;
            token.text = std::string(1, c);
            token.span = span_from(line, column);
            return token;
        };

        switch (c) {
        case '{': return single(TokenKind::LBrace);
        case '}': return single(TokenKind::RBrace);
        case '(': return single(TokenKind::LParen);
        case ')': return single(TokenKind::RParen);
        case '[': return single(TokenKind::LBracket);
        case ']': return single(TokenKind::RBracket);
        case '=': return single(TokenKind::Equals);
        case '>': return single(TokenKind::Greater);
        case '<': return single(TokenKind::Less);
        case ':': return single(TokenKind::Colon);
        case ',': return single(TokenKind::Comma);
        case '"': return string_literal(line, column);
        default: break;
        }

        if (is_digit(c) || (c == '-' && is_digit(peek(1)))) return number(line, column);
        if (is_word_char(c)) {
            token.kind = TokenKind::Ident;
            while (m_pos < m_text.size() && is_word_char(peek())) {
                token.text += peek();
                advance();
            }
            token.span = span_from(line, column);
            return token;
        }

        advance();
        while (m_pos < m_text.size() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) advance();
        error(span_from(line, column), "unexpected character");
        return std::nullopt;
    }

    std::optional<Token> string_literal(int line, int column)
    {
        Token token;
        token.kind = TokenKind::String;
        advance(); // opening quote
        for (;;) {
            if (m_pos >= m_text.size() || peek() == '\n') {
                error(span_from(line, column), "unterminated string literal");
                return std::nullopt;
            }
            const char c = peek();
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                if (m_pos >= m_text.size()) continue;
                const char e = peek();
                switch (e) {
                case 'n': token.text += '\n'; break;
                case 't': token.text += '\t'; break;
                case '"': token.text += '"'; break;
                case '\\': token.text += '\\'; break;
                default: {
                    const int el = m_line, ec = m_column - 1;
                    error(SourceSpan{el, ec, 2}, "unknown escape sequence");
                    token.text += e;
                }
                }
                advance();
                continue;
            }
            token.text += c;
            advance();
        }
        token.span = span_from(line, column);
        return token;
    }

    std::optional<Token> number(int line, int column)
    {
        Token token;
        token.kind = TokenKind::Int;
        if (peek() == '-') {
            token.text += '-';
            advance();
        }
        while (is_digit(peek())) {
            token.text += peek();
            advance();
        }
        if (peek() == '.' && is_digit(peek(1))) {
            token.kind = TokenKind::Real;
            token.text += '.';
            advance();
            while (is_digit(peek())) {
                token.text += peek();
                advance();
            }
            if ((peek() == 'e' || peek() == 'E') &&
                (is_digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && is_digit(peek(2))))) {
                token.text += peek();
                advance();
                if (peek() == '+' || peek() == '-') {
                    token.text += peek();
                    advance();
                }
                while (is_digit(peek())) {
                    token.text += peek();
                    advance();
                }
            }
        } else if (token.text[0] != '-' && is_word_char(peek())) {
            // Words such as 12abc are identifiers (ids may start with a digit).
            token.kind = TokenKind::Ident;
            while (is_word_char(peek())) {
                token.text += peek();
                advance();
            }
        }
        token.span = span_from(line, column);
        return token;
    }

    std::string_view m_text;
    std::vector<ParseDiagnostic>& m_diagnostics;
    std::size_t m_pos = 0;
    int m_line = 1;
    int m_column = 1;
};

} // namespace

std::string_view describe(TokenKind kind)
{
    switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::String: return "string";
    case TokenKind::Int: return "integer";
    case TokenKind::Real: return "number";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Equals: return "'='";
    case TokenKind::Greater: return "'>'";
    case TokenKind::Less: return "'<'";
    case TokenKind::Colon: return "':'";
    case TokenKind::Comma: return "','";
    case TokenKind::End: return "end of input";
    }
    return "?";
}

std::vector<Token> tokenize(std::string_view text, std::vector<ParseDiagnostic>& diagnostics)
{
    return Lexer(text, diagnostics).run();
}

} // namespace medbt::dsl
