#include "lexer.hpp"

#include "medbt/validate.hpp"

#include <charconv>
#include <limits>
#include <map>
#include <set>

namespace medbt {

namespace {

using dsl::Token;
using dsl::TokenKind;

constexpr int kMaxDepth = 200;

struct SyntaxError
{
    SourceSpan span;
    std::string message;
};

struct NodeSpans
{
    SourceSpan keyword;
    SourceSpan brace; // opening brace for nodes with a body, else the keyword
};

class Parser
{
public:
    Parser(std::vector<Token> tokens, std::vector<ParseDiagnostic>& diagnostics)
        : m_tokens(std::move(tokens)), m_diagnostics(diagnostics)
    {}

    std::optional<Tree> run()
    {
        try {
            Tree tree = program();
            return tree;
        } catch (const SyntaxError& e) {
            error(e.span, e.message);
            return std::nullopt;
        }
    }

    std::optional<Predicate> standalone_predicate()
    {
        try {
            Predicate p = predicate();
            if (!at(TokenKind::End)) return std::nullopt;
            return p;
        } catch (const SyntaxError&) {
            return std::nullopt;
        }
    }

    const std::map<std::vector<std::size_t>, NodeSpans>& spans() const { return m_spans; }
    SourceSpan name_span() const { return m_name_span; }
    const std::vector<std::pair<std::string, SourceSpan>>& predicate_keys() const { return m_predicate_keys; }

private:
    const Token& peek(std::size_t ahead = 0) const
    {
        const std::size_t i = std::min(m_pos + ahead, m_tokens.size() - 1);
        return m_tokens[i];
    }

    const Token& take() { return m_tokens[std::min(m_pos++, m_tokens.size() - 1)]; }

    bool at(TokenKind kind) const { return peek().kind == kind; }
    bool at_word(std::string_view word) const { return at(TokenKind::Ident) && peek().text == word; }

    [[noreturn]] void fail(const Token& token, const std::string& message) const
    {
        throw SyntaxError{token.span, message};
    }

    [[noreturn]] void unexpected(std::string_view wanted) const
    {
        const Token& t = peek();
        std::string got = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
        fail(t, "expected " + std::string(wanted) + ", found " + got);
    }

    const Token& expect(TokenKind kind)
    {
        if (!at(kind)) unexpected(dsl::describe(kind));
        return take();
    }

    const Token& expect_word(std::string_view word)
    {
        if (!at_word(word)) unexpected("'" + std::string(word) + "'");
        return take();
    }

    void error(SourceSpan span, std::string message)
    {
        m_diagnostics.push_back({span, Severity::Error, std::move(message)});
    }

    void warning(SourceSpan span, std::string message)
    {
        m_diagnostics.push_back({span, Severity::Warning, std::move(message)});
    }

    Tree program()
    {
        Tree tree;
        expect_word("tree");
        const Token& name = expect(TokenKind::String);
        tree.name = name.text;
        m_name_span = name.span;
        const Token& open = expect(TokenKind::LBrace);
        tree.root = make_root();
        m_spans[{}] = NodeSpans{open.span, open.span};

        if (at_word("blackboard")) tree.schema = blackboard();

        std::vector<std::size_t> path;
        while (!at(TokenKind::RBrace)) {
            if (at(TokenKind::End)) unexpected("'}'");
            path.push_back(tree.root.children.size());
            tree.root.children.push_back(node(path, 1));
            path.pop_back();
        }
        take();
        if (!at(TokenKind::End)) unexpected("end of input after the tree");
        return tree;
    }

    BlackboardSchema blackboard()
    {
        take();
        expect(TokenKind::LBrace);
        BlackboardSchema schema;
        while (!at(TokenKind::RBrace)) {
            const Token& key = expect(TokenKind::Ident);
            expect(TokenKind::Colon);
            const Token& type_token = expect(TokenKind::Ident);
            auto type = parse_value_type(type_token.text);
            if (!type) fail(type_token, "unknown blackboard type '" + type_token.text + "' (bool, int, real, string, list)");
            SchemaEntry entry{*type, std::nullopt};
            if (at(TokenKind::Equals)) {
                take();
                const Token& first = peek();
                Value value = literal();
                auto converted = coerce(value, *type);
                if (!converted)
                    fail(first, "initial value of '" + key.text + "' does not match declared type " +
                                    std::string(to_string(*type)));
                entry.initial = std::move(*converted);
            }
            if (!schema.emplace(key.text, std::move(entry)).second)
                error(key.span, "blackboard key '" + key.text + "' declared twice");
        }
        take();
        return schema;
    }

    Value literal()
    {
        const Token& t = peek();
        switch (t.kind) {
        case TokenKind::Int: {
            take();
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec != std::errc() || p != t.text.data() + t.text.size()) fail(t, "integer literal out of range");
            return v;
        }
        case TokenKind::Real: {
            take();
            double v = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec != std::errc() || p != t.text.data() + t.text.size()) fail(t, "real literal out of range");
            return v;
        }
        case TokenKind::String:
            take();
            return t.text;
        case TokenKind::Ident:
            if (t.text == "true" || t.text == "false") {
                take();
                return t.text == "true";
            }
            break;
        case TokenKind::LBracket: {
            take();
            StringList list;
            while (!at(TokenKind::RBracket)) {
                list.push_back(expect(TokenKind::String).text);
                if (!at(TokenKind::Comma)) break;
                take();
            }
            expect(TokenKind::RBracket);
            return list;
        }
        default:
            break;
        }
        unexpected("a literal");
    }

    Predicate predicate()
    {
        Predicate p;
        const Token& key = expect(TokenKind::Ident);
        p.key = key.text;
        m_predicate_keys.emplace_back(key.text, key.span);
        switch (peek().kind) {
        case TokenKind::Equals: p.op = Comparison::Equal; break;
        case TokenKind::Greater: p.op = Comparison::Greater; break;
        case TokenKind::Less: p.op = Comparison::Less; break;
        default: unexpected("'=', '>' or '<'");
        }
        take();
        p.literal = literal();
        return p;
    }

    int positive_int(const Token& t)
    {
        int v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size()) fail(t, "integer out of range");
        return v;
    }

    Node node(const std::vector<std::size_t>& path, int depth)
    {
        if (depth > kMaxDepth) fail(peek(), "nesting deeper than " + std::to_string(kMaxDepth) + " levels");
        const Token& word = peek();
        if (word.kind != TokenKind::Ident) unexpected("a node keyword");
        auto kind = kind_from_keyword(word.text);
        if (!kind) fail(word, "unknown node keyword '" + word.text + "'");
        take();

        Node n;
        n.kind = *kind;
        NodeSpans spans{word.span, word.span};

        if (is_leaf(*kind)) {
            n.label = expect(TokenKind::String).text;
            if (*kind == NodeKind::Select) {
                expect_word("options");
                expect(TokenKind::Equals);
                n.params.options_key = expect(TokenKind::Ident).text;
                expect_word("into");
                n.params.into_key = expect(TokenKind::Ident).text;
            }
            kv_params(n);
            m_spans[path] = spans;
            return n;
        }

        header_params(n);
        if (at(TokenKind::String)) n.label = take().text;
        kv_params(n);

        const Token& open = expect(TokenKind::LBrace);
        spans.brace = open.span;
        std::vector<std::size_t> child_path = path;
        while (!at(TokenKind::RBrace)) {
            if (at(TokenKind::End)) unexpected("'}'");
            child_path.push_back(n.children.size());
            n.children.push_back(node(child_path, depth + 1));
            child_path.pop_back();
        }
        take();
        m_spans[path] = spans;
        return n;
    }

    // The parenthesised part of parallel(...), retry(N) and repeat(...).
    void header_params(Node& n)
    {
        switch (n.kind) {
        case NodeKind::Retry:
            expect(TokenKind::LParen);
            n.params.bound = positive_int(expect(TokenKind::Int));
            expect(TokenKind::RParen);
            break;
        case NodeKind::Repeat:
            expect(TokenKind::LParen);
            if (at_word("until")) {
                take();
                n.params.until = predicate();
            } else {
                n.params.bound = positive_int(expect(TokenKind::Int));
            }
            expect(TokenKind::RParen);
            break;
        case NodeKind::Parallel:
            if (!at(TokenKind::LParen)) break;
            take();
            while (!at(TokenKind::RParen)) {
                const Token& key = expect(TokenKind::Ident);
                expect(TokenKind::Equals);
                const int value = positive_int(expect(TokenKind::Int));
                if (key.text == "success") {
                    if (n.params.success_threshold) fail(key, "success threshold given twice");
                    n.params.success_threshold = value;
                } else if (key.text == "failure") {
                    if (n.params.failure_threshold) fail(key, "failure threshold given twice");
                    n.params.failure_threshold = value;
                } else {
                    fail(key, "unknown parallel parameter '" + key.text + "' (success, failure)");
                }
                if (!at(TokenKind::Comma)) break;
                take();
            }
            expect(TokenKind::RParen);
            break;
        default:
            break;
        }
    }

    void kv_params(Node& n)
    {
        std::set<std::string> seen;
        while (at(TokenKind::Ident) && peek(1).kind == TokenKind::Equals) {
            const Token& key = take();
            take();
            const Token& value = peek();
            if (value.kind != TokenKind::Ident && value.kind != TokenKind::String && value.kind != TokenKind::Int &&
                value.kind != TokenKind::Real)
                unexpected("a parameter value");
            take();
            if (!seen.insert(key.text).second) fail(key, "parameter '" + key.text + "' given twice");
            apply_param(n, key, value);
        }
    }

    void apply_param(Node& n, const Token& key, const Token& value)
    {
        const bool leaf = is_leaf(n.kind);
        const std::string& k = key.text;
        if (k == "id") {
            if (!is_valid_id(value.text)) fail(value, "id must match [A-Za-z0-9_]+");
            if (!m_explicit_ids.insert(value.text).second) fail(value, "duplicate id '" + value.text + "'");
            n.id = value.text;
        } else if (k == "mode" && leaf) {
            auto mode = parse_leaf_mode(value.text);
            if (!mode) fail(value, "mode must be auto, interactive or scripted");
            n.params.mode = *mode;
        } else if (k == "long_running" && leaf) {
            if (value.text != "true" && value.text != "false") fail(value, "long_running must be true or false");
            n.params.long_running = value.text == "true";
        } else if (k == "check" && n.kind == NodeKind::Condition) {
            if (value.kind != TokenKind::String) fail(value, "check expects a quoted predicate");
            auto p = parse_predicate(value.text);
            if (!p) fail(value, "malformed check predicate (expected: key =|>|< literal)");
            m_predicate_keys.emplace_back(p->key, value.span);
            n.params.check = std::move(*p);
        } else if (k == "appends" && n.kind == NodeKind::Action) {
            if (!is_valid_id(value.text)) fail(value, "appends expects a blackboard key");
            n.params.appends = value.text;
        } else if (k == "mode" || k == "long_running" || k == "check" || k == "appends") {
            fail(key, "parameter '" + k + "' is not allowed on " + std::string(keyword(n.kind)));
        } else {
            warning(key.span, "unknown parameter '" + k + "' kept verbatim");
            n.params.extra[k] = value.text;
        }
    }

    std::vector<Token> m_tokens;
    std::size_t m_pos = 0;
    std::vector<ParseDiagnostic>& m_diagnostics;
    std::map<std::vector<std::size_t>, NodeSpans> m_spans;
    std::set<std::string> m_explicit_ids;
    std::vector<std::pair<std::string, SourceSpan>> m_predicate_keys;
    SourceSpan m_name_span;
};

bool is_arity_rule(const std::string& rule)
{
    return rule.find("child") != std::string::npos && rule.find("threshold") == std::string::npos;
}

void collect_ids(const Node& node, std::vector<std::size_t>& path,
                 std::map<std::string, std::vector<std::size_t>>& out)
{
    out.emplace(node.id, path);
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        path.push_back(i);
        collect_ids(node.children[i], path, out);
        path.pop_back();
    }
}

} // namespace

std::size_t ParseResult::error_count() const
{
    std::size_t n = 0;
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Error) ++n;
    return n;
}

std::optional<Predicate> parse_predicate(std::string_view text)
{
    std::vector<ParseDiagnostic> diagnostics;
    auto tokens = dsl::tokenize(text, diagnostics);
    if (!diagnostics.empty()) return std::nullopt;
    Parser parser(std::move(tokens), diagnostics);
    return parser.standalone_predicate();
}

ParseResult parse(std::string_view text)
{
    ParseResult result;
    auto tokens = dsl::tokenize(text, result.diagnostics);
    Parser parser(std::move(tokens), result.diagnostics);
    auto tree = parser.run();
    if (!tree) return result;

    assign_ids(*tree);

    for (const auto& [key, span] : parser.predicate_keys())
        if (!tree->schema.count(key))
            result.diagnostics.push_back(
                {span, Severity::Warning, "predicate reads undeclared blackboard key '" + key + "'"});

    std::map<std::string, std::vector<std::size_t>> paths;
    std::vector<std::size_t> scratch;
    collect_ids(tree->root, scratch, paths);

    for (const auto& v : validate(*tree)) {
        if (v.rule == "duplicate id") continue; // explicit duplicates are reported by the parser
        SourceSpan span;
        if (v.rule == "tree name must not be empty") {
            span = parser.name_span();
        } else if (auto it = paths.find(v.node_id); it != paths.end()) {
            auto s = parser.spans().find(it->second);
            if (s != parser.spans().end()) span = is_arity_rule(v.rule) ? s->second.brace : s->second.keyword;
        }
        result.diagnostics.push_back({span, Severity::Error, v.rule});
    }

    if (result.error_count() == 0) result.tree = std::move(*tree);
    return result;
}

std::string format_diagnostic(const ParseDiagnostic& d, std::string_view source_name)
{
    return std::string(source_name) + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) +
           ": " + (d.severity == Severity::Error ? "error" : "warning") + ": " + d.message;
}

} // namespace medbt
