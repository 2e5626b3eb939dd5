#include "medbt/blackboard.hpp"
#include "medbt/error.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace medbt {

namespace {

std::string quote(std::string_view text)
{
    std::string out = "\"";
    for (char c : text) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string format_real(double value)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    std::string text(buf, end);
    if (text.find('.') != std::string::npos) return text;
    if (auto e = text.find('e'); e != std::string::npos) return text.insert(e, ".0");
    return text + ".0";
}

std::optional<double> as_number(const Value& v)
{
    if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (auto d = std::get_if<double>(&v)) return *d;
    return std::nullopt;
}

} // namespace

ValueType type_of(const Value& value)
{
    return static_cast<ValueType>(value.index());
}

std::string_view to_string(ValueType type)
{
    switch (type) {
    case ValueType::Bool: return "bool";
    case ValueType::Int: return "int";
    case ValueType::Real: return "real";
    case ValueType::String: return "string";
    case ValueType::List: return "list";
    }
    return "?";
}

std::optional<ValueType> parse_value_type(std::string_view text)
{
    if (text == "bool") return ValueType::Bool;
    if (text == "int") return ValueType::Int;
    if (text == "real") return ValueType::Real;
    if (text == "string") return ValueType::String;
    if (text == "list") return ValueType::List;
    return std::nullopt;
}

std::string format_value(const Value& value)
{
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                return format_real(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return quote(v);
            } else {
                std::string out = "[";
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (i) out += ", ";
                    out += quote(v[i]);
                }
                return out + "]";
            }
        },
        value);
}

std::optional<Value> coerce(const Value& value, ValueType type)
{
    if (type_of(value) == type) return value;
    if (type == ValueType::Real) {
        if (auto i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
    }
    if (type == ValueType::Int) {
        if (auto d = std::get_if<double>(&value); d && std::trunc(*d) == *d && std::abs(*d) < 9.0e15)
            return static_cast<std::int64_t>(*d);
    }
    return std::nullopt;
}

Blackboard Blackboard::with_defaults(const BlackboardSchema& schema)
{
    Blackboard bb(schema);
    for (const auto& [key, entry] : schema)
        if (entry.initial) bb.set(key, *entry.initial);
    return bb;
}

bool Blackboard::contains(std::string_view key) const
{
    return m_entries.find(key) != m_entries.end();
}

const Value* Blackboard::find(std::string_view key) const
{
    auto it = m_entries.find(key);
    return it == m_entries.end() ? nullptr : &it->second;
}

const Value& Blackboard::get(std::string_view key) const
{
    if (const Value* v = find(key)) return *v;
    throw BlackboardError(std::string(key), "blackboard key '" + std::string(key) + "' is absent");
}

std::optional<Value> Blackboard::set(const std::string& key, Value value)
{
    if (!m_schema.empty()) {
        auto it = m_schema.find(key);
        if (it == m_schema.end())
            throw BlackboardError(key, "blackboard key '" + key + "' is not declared in the schema");
        auto converted = coerce(value, it->second.type);
        if (!converted)
            throw BlackboardError(key, "blackboard key '" + key + "' is declared " +
                                           std::string(to_string(it->second.type)) + " but was written a " +
                                           std::string(to_string(type_of(value))));
        value = std::move(*converted);
    }
    std::optional<Value> previous;
    if (auto it = m_entries.find(key); it != m_entries.end()) {
        previous = std::move(it->second);
        it->second = std::move(value);
    } else {
        m_entries.emplace(key, std::move(value));
    }
    return previous;
}

void Blackboard::erase(std::string_view key)
{
    if (auto it = m_entries.find(key); it != m_entries.end()) m_entries.erase(it);
}

bool Predicate::evaluate(const Blackboard& blackboard) const
{
    const Value& current = blackboard.get(key);
    auto fail = [&]() -> bool {
        throw BlackboardError(key, "cannot compare blackboard key '" + key + "' (" +
                                       std::string(medbt::to_string(type_of(current))) + ") with " +
                                       format_value(literal));
    };

    auto lhs = as_number(current);
    auto rhs = as_number(literal);
    if (lhs && rhs) {
        switch (op) {
        case Comparison::Equal: return *lhs == *rhs;
        case Comparison::Greater: return *lhs > *rhs;
        case Comparison::Less: return *lhs < *rhs;
        }
    }
    if (type_of(current) != type_of(literal)) return fail();
    if (auto s = std::get_if<std::string>(&current)) {
        const auto& l = std::get<std::string>(literal);
        switch (op) {
        case Comparison::Equal: return *s == l;
        case Comparison::Greater: return *s > l;
        case Comparison::Less: return *s < l;
        }
    }
    if (op != Comparison::Equal) return fail();
    return current == literal;
}

std::string Predicate::to_string() const
{
    const char* sym = op == Comparison::Equal ? " = " : op == Comparison::Greater ? " > " : " < ";
    return key + sym + format_value(literal);
}

} // namespace medbt
