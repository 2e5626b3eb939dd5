#include "medbt/analysis.hpp"

#include <sstream>

namespace medbt {

namespace {

std::string escape(std::string_view text)
{
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

std::string glyph(const Node& node)
{
    switch (node.kind) {
    case NodeKind::Root: return "Φ";
    case NodeKind::Sequence: return "→";
    case NodeKind::Selector: return "?";
    case NodeKind::Parallel: return "⇉";
    case NodeKind::Recovery: return "R";
    case NodeKind::Retry: return "retry(" + std::to_string(node.params.bound.value_or(1)) + ")";
    case NodeKind::Repeat:
        return node.params.until ? "repeat(until " + node.params.until->to_string() + ")"
                                 : "repeat(" + std::to_string(node.params.bound.value_or(1)) + ")";
    case NodeKind::Invert: return "invert";
    case NodeKind::Select: return "select";
    case NodeKind::Action:
    case NodeKind::Condition: return "";
    }
    return "";
}

void emit_node(std::ostringstream& out, const Node& node, const std::string& tree_name)
{
    std::string label = glyph(node);
    const std::string& text = node.kind == NodeKind::Root ? tree_name : node.label;
    if (!text.empty()) label = label.empty() ? text : label + " " + text;
    if (label.empty()) label = node.id;

    out << "  \"" << escape(node.id) << "\" [label=\"" << escape(label) << "\"";
    switch (node.kind) {
    case NodeKind::Condition:
        out << ", shape=ellipse, style=filled, fillcolor=yellow";
        break;
    case NodeKind::Action:
        out << ", shape=box, style=\"rounded,filled\", fillcolor=green";
        break;
    case NodeKind::Select:
        out << ", shape=box, style=\"rounded,filled\", fillcolor=lightskyblue";
        break;
    case NodeKind::Root:
        out << ", shape=box, style=bold";
        break;
    default:
        out << ", shape=box";
    }
    out << "];\n";
    for (const auto& child : node.children) emit_node(out, child, tree_name);
}

void emit_edges(std::ostringstream& out, const Node& node)
{
    for (const auto& child : node.children) {
        out << "  \"" << escape(node.id) << "\" -> \"" << escape(child.id) << "\";\n";
        emit_edges(out, child);
    }
}

} // namespace

std::string export_dot(const Tree& tree)
{
    std::ostringstream out;
    out << "digraph \"" << escape(tree.name) << "\" {\n";
    out << "  node [fontname=\"Helvetica\"];\n";
    emit_node(out, tree.root, tree.name);
    emit_edges(out, tree.root);
    out << "}\n";
    return out.str();
}

std::string export_dot(const Fsm& fsm)
{
    std::ostringstream out;
    out << "digraph \"fsm\" {\n";
    out << "  rankdir=LR;\n";
    for (StateId s = 0; s < fsm.states.size(); ++s) {
        const bool accepting = fsm.accepting.count(s) > 0;
        out << "  s" << s << " [label=\"" << escape(fsm.states[s].label) << "\", shape="
            << (accepting ? "doublecircle" : "circle") << (s == fsm.initial ? ", style=bold" : "") << "];\n";
    }
    for (const auto& t : fsm.transitions)
        out << "  s" << t.from << " -> s" << t.to << " [label=\"" << escape(t.symbol.leaf) << ":"
            << (t.symbol.outcome == Status::Success ? "S" : "F") << "\"];\n";
    out << "}\n";
    return out.str();
}

} // namespace medbt
