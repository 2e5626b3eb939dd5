#include "medbt/validate.hpp"

#include <set>

namespace medbt {

namespace {

class Validator
{
public:
    explicit Validator(const Tree& tree) : m_tree(tree) {}

    std::vector<Violation> run()
    {
        if (m_tree.name.empty()) add(m_tree.root.id, "tree name must not be empty");
        if (m_tree.root.kind != NodeKind::Root) add(m_tree.root.id, "tree root must be a root node");
        if (m_tree.root.children.size() != 1) add(m_tree.root.id, "root must have exactly one child");
        check_node(m_tree.root);
        return std::move(m_violations);
    }

private:
    void add(const std::string& id, std::string rule) { m_violations.push_back({id, std::move(rule)}); }

    const SchemaEntry* declared(const std::string& key) const
    {
        auto it = m_tree.schema.find(key);
        return it == m_tree.schema.end() ? nullptr : &it->second;
    }

    void check_node(const Node& node)
    {
        if (!is_valid_id(node.id)) add(node.id, "id must match [A-Za-z0-9_]+");
        if (!m_ids.insert(node.id).second) add(node.id, "duplicate id");
        if (node.kind == NodeKind::Root && &node != &m_tree.root) add(node.id, "root node may only appear at the top");

        const std::size_t n = node.children.size();
        switch (node.kind) {
        case NodeKind::Root:
            break;
        case NodeKind::Sequence:
        case NodeKind::Selector:
            if (n < 1) add(node.id, "composite requires at least one child");
            break;
        case NodeKind::Parallel: {
            if (n < 1) add(node.id, "composite requires at least one child");
            const int count = static_cast<int>(n);
            const int m = effective_success_threshold(node);
            const int f = effective_failure_threshold(node);
            if (n >= 1 && (m < 1 || m > count)) add(node.id, "parallel success threshold must be in [1, child count]");
            if (n >= 1 && (f < 1 || f > count)) add(node.id, "parallel failure threshold must be in [1, child count]");
            break;
        }
        case NodeKind::Recovery:
            if (n != 2) add(node.id, "recovery requires exactly two children (main, fallback)");
            break;
        case NodeKind::Retry:
            if (n != 1) add(node.id, "decorator requires exactly one child");
            if (!node.params.bound || *node.params.bound < 1) add(node.id, "retry requires a positive attempt bound");
            break;
        case NodeKind::Repeat:
            if (n != 1) add(node.id, "decorator requires exactly one child");
            if (node.params.bound && node.params.until) add(node.id, "repeat takes either a bound or an until predicate");
            else if (node.params.bound && *node.params.bound < 1) add(node.id, "repeat requires a positive bound");
            else if (!node.params.bound && !node.params.until) add(node.id, "repeat requires a bound or an until predicate");
            break;
        case NodeKind::Invert:
            if (n != 1) add(node.id, "decorator requires exactly one child");
            break;
        case NodeKind::Action:
        case NodeKind::Condition:
        case NodeKind::Select:
            if (n != 0) add(node.id, "leaf must not have children");
            break;
        }

        if (node.kind == NodeKind::Select) check_select(node);
        if (node.kind == NodeKind::Action && !node.params.appends.empty()) {
            const SchemaEntry* e = declared(node.params.appends);
            if (e && e->type != ValueType::List) add(node.id, "appends key must be declared as list");
        }
        if (node.params.check && node.kind != NodeKind::Condition) add(node.id, "only conditions may carry a check");
        if (node.params.long_running && !is_leaf(node.kind)) add(node.id, "only leaves may be long_running");

        for (const auto& child : node.children) check_node(child);
    }

    void check_select(const Node& node)
    {
        if (!is_valid_id(node.params.options_key)) add(node.id, "select requires an options key");
        if (!is_valid_id(node.params.into_key)) add(node.id, "select requires an into key");
        if (const SchemaEntry* e = declared(node.params.options_key); e && e->type != ValueType::List)
            add(node.id, "select options key must be declared as list");
        if (const SchemaEntry* e = declared(node.params.into_key); e && e->type != ValueType::String)
            add(node.id, "select into key must be declared as string");
    }

    const Tree& m_tree;
    std::set<std::string> m_ids;
    std::vector<Violation> m_violations;
};

} // namespace

std::vector<Violation> validate(const Tree& tree)
{
    return Validator(tree).run();
}

} // namespace medbt
