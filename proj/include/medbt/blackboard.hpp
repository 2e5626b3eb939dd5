#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace medbt {

enum class ValueType : std::uint8_t { Bool, Int, Real, String, List };

using StringList = std::vector<std::string>;
using Value = std::variant<bool, std::int64_t, double, std::string, StringList>;

ValueType type_of(const Value& value);
std::string_view to_string(ValueType type);
std::optional<ValueType> parse_value_type(std::string_view text);

/// Renders a value as a DSL literal: true, 42, 1.5, "text", ["a", "b"].
std::string format_value(const Value& value);

/// Converts `value` to `type` when the conversion is lossless in intent
/// (int widens to real). Returns nullopt otherwise.
std::optional<Value> coerce(const Value& value, ValueType type);

struct SchemaEntry
{
    ValueType type = ValueType::Bool;
    std::optional<Value> initial;

    bool operator==(const SchemaEntry&) const = default;
};

using BlackboardSchema = std::map<std::string, SchemaEntry>;

/// Typed key/value store shared by every node of a running tree.
///
/// With a non-empty schema, writes must target a declared key and match its
/// type. Reads of absent keys always throw BlackboardError.
class Blackboard
{
public:
    Blackboard() = default;
    explicit Blackboard(BlackboardSchema schema) : m_schema(std::move(schema)) {}

    /// Schema-typed blackboard pre-populated with every declared initial value.
    static Blackboard with_defaults(const BlackboardSchema& schema);

    bool contains(std::string_view key) const;
    const Value* find(std::string_view key) const;
    const Value& get(std::string_view key) const;

    /// Returns the previous value, if any.
    std::optional<Value> set(const std::string& key, Value value);
    void erase(std::string_view key);

    const std::map<std::string, Value, std::less<>>& entries() const { return m_entries; }
    const BlackboardSchema& schema() const { return m_schema; }

    bool operator==(const Blackboard& other) const { return m_entries == other.m_entries; }

private:
    BlackboardSchema m_schema;
    std::map<std::string, Value, std::less<>> m_entries;
};

enum class Comparison : std::uint8_t { Equal, Greater, Less };

/// `key op literal`, evaluated against a blackboard.
struct Predicate
{
    std::string key;
    Comparison op = Comparison::Equal;
    Value literal;

    /// Throws BlackboardError if the key is absent or the types cannot be compared.
    bool evaluate(const Blackboard& blackboard) const;
    std::string to_string() const;

    bool operator==(const Predicate&) const = default;
};

} // namespace medbt
