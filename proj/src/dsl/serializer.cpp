#include "medbt/dsl.hpp"

#include <set>
#include <sstream>

namespace medbt {

namespace {

std::string quoted(const std::string& text)
{
    return format_value(Value{text});
}

bool is_word(const std::string& text)
{
    return is_valid_id(text);
}

void clear_ids(Node& copy, const Node& original, const std::set<const Node*>& keep)
{
    if (!keep.count(&original) && original.kind != NodeKind::Root) copy.id.clear();
    for (std::size_t i = 0; i < copy.children.size(); ++i) clear_ids(copy.children[i], original.children[i], keep);
}

void mismatches(const Node& derived, const Node& original, std::set<const Node*>& out, bool& changed)
{
    if (derived.id != original.id && !out.count(&original)) {
        out.insert(&original);
        changed = true;
    }
    for (std::size_t i = 0; i < derived.children.size(); ++i)
        mismatches(derived.children[i], original.children[i], out, changed);
}

// Smallest set of nodes whose ids must be written so that id derivation on
// re-parse reproduces every id. Grows monotonically, so it terminates.
std::set<const Node*> explicit_ids(const Tree& tree)
{
    std::set<const Node*> keep;
    for (;;) {
        Tree copy = tree;
        clear_ids(copy.root, tree.root, keep);
        assign_ids(copy);
        bool changed = false;
        mismatches(copy.root, tree.root, keep, changed);
        if (!changed) return keep;
    }
}

class Writer
{
public:
    Writer(const Tree& tree) : m_tree(tree), m_explicit(explicit_ids(tree)) {}

    std::string run()
    {
        m_out << "tree " << quoted(m_tree.name) << " {\n";
        if (!m_tree.schema.empty()) {
            m_out << "  blackboard {\n";
            for (const auto& [key, entry] : m_tree.schema) {
                m_out << "    " << key << ": " << to_string(entry.type);
                if (entry.initial) m_out << " = " << format_value(*entry.initial);
                m_out << "\n";
            }
            m_out << "  }\n";
        }
        for (const auto& child : m_tree.root.children) node(child, 1);
        m_out << "}\n";
        return m_out.str();
    }

private:
    void node(const Node& n, int depth)
    {
        const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
        m_out << indent << keyword(n.kind);

        switch (n.kind) {
        case NodeKind::Parallel: {
            std::vector<std::string> parts;
            if (n.params.success_threshold) parts.push_back("success=" + std::to_string(*n.params.success_threshold));
            if (n.params.failure_threshold) parts.push_back("failure=" + std::to_string(*n.params.failure_threshold));
            if (!parts.empty()) {
                m_out << "(" << parts[0];
                for (std::size_t i = 1; i < parts.size(); ++i) m_out << ", " << parts[i];
                m_out << ")";
            }
            break;
        }
        case NodeKind::Retry:
            m_out << "(" << n.params.bound.value_or(1) << ")";
            break;
        case NodeKind::Repeat:
            if (n.params.until)
                m_out << "(until " << n.params.until->to_string() << ")";
            else
                m_out << "(" << n.params.bound.value_or(1) << ")";
            break;
        default:
            break;
        }

        if (is_leaf(n.kind) || !n.label.empty()) m_out << " " << quoted(n.label);
        if (n.kind == NodeKind::Select)
            m_out << " options=" << n.params.options_key << " into " << n.params.into_key;

        if (m_explicit.count(&n)) m_out << " id=" << n.id;
        if (n.params.mode != LeafMode::Auto) m_out << " mode=" << to_string(n.params.mode);
        if (n.params.long_running) m_out << " long_running=true";
        if (n.params.check) m_out << " check=" << quoted(n.params.check->to_string());
        if (!n.params.appends.empty()) m_out << " appends=" << n.params.appends;
        for (const auto& [key, value] : n.params.extra)
            m_out << " " << key << "=" << (is_word(value) ? value : quoted(value));

        if (is_leaf(n.kind)) {
            m_out << "\n";
            return;
        }
        m_out << " {\n";
        for (const auto& child : n.children) node(child, depth + 1);
        m_out << indent << "}\n";
    }

    const Tree& m_tree;
    std::set<const Node*> m_explicit;
    std::ostringstream m_out;
};

} // namespace

std::string serialize(const Tree& tree)
{
    return Writer(tree).run();
}

} // namespace medbt
