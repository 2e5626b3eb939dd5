#pragma once

#include <stdexcept>
#include <string>

namespace medbt {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Read of an absent key, write against the declared schema, bad comparison.
class BlackboardError : public Error
{
public:
    BlackboardError(std::string key, const std::string& what)
        : Error(what), m_key(std::move(key))
    {}

    const std::string& key() const { return m_key; }

private:
    std::string m_key;
};

/// Raised while ticking a tree. node_id names the node being ticked when the
/// problem surfaced (empty when not attributable to a node).
class ExecutionError : public Error
{
public:
    ExecutionError(std::string node_id, const std::string& what)
        : Error(what), m_node_id(std::move(node_id))
    {}

    const std::string& node_id() const { return m_node_id; }

private:
    std::string m_node_id;
};

/// A resolver broke the leaf contract, e.g. tried to write from a Condition.
class ContractViolation : public ExecutionError
{
public:
    using ExecutionError::ExecutionError;
};

} // namespace medbt
