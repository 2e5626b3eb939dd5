#include "medbt/node.hpp"
#include "medbt/error.hpp"

#include <array>
#include <cctype>
#include <set>

namespace medbt {

namespace {

struct KindInfo
{
    NodeKind kind;
    std::string_view word;
};

constexpr std::array<KindInfo, 11> kKinds{{
    {NodeKind::Root, "root"},
    {NodeKind::Sequence, "sequence"},
    {NodeKind::Selector, "selector"},
    {NodeKind::Parallel, "parallel"},
    {NodeKind::Recovery, "recovery"},
    {NodeKind::Retry, "retry"},
    {NodeKind::Repeat, "repeat"},
    {NodeKind::Invert, "invert"},
    {NodeKind::Action, "action"},
    {NodeKind::Condition, "condition"},
    {NodeKind::Select, "select"},
}};

bool collect_path(const Node& node, std::string_view id, std::vector<const Node*>& path)
{
    path.push_back(&node);
    if (node.id == id) return true;
    for (const auto& child : node.children)
        if (collect_path(child, id, path)) return true;
    path.pop_back();
    return false;
}

} // namespace

bool is_composite(NodeKind kind)
{
    return kind == NodeKind::Sequence || kind == NodeKind::Selector || kind == NodeKind::Parallel ||
           kind == NodeKind::Recovery;
}

bool is_decorator(NodeKind kind)
{
    return kind == NodeKind::Retry || kind == NodeKind::Repeat || kind == NodeKind::Invert;
}

bool is_leaf(NodeKind kind)
{
    return kind == NodeKind::Action || kind == NodeKind::Condition || kind == NodeKind::Select;
}

std::string_view keyword(NodeKind kind)
{
    for (const auto& info : kKinds)
        if (info.kind == kind) return info.word;
    return "?";
}

std::optional<NodeKind> kind_from_keyword(std::string_view word)
{
    for (const auto& info : kKinds)
        if (info.word == word && info.kind != NodeKind::Root) return info.kind;
    return std::nullopt;
}

std::string_view to_string(LeafMode mode)
{
    switch (mode) {
    case LeafMode::Auto: return "auto";
    case LeafMode::Interactive: return "interactive";
    case LeafMode::Scripted: return "scripted";
    }
    return "?";
}

std::optional<LeafMode> parse_leaf_mode(std::string_view text)
{
    if (text == "auto") return LeafMode::Auto;
    if (text == "interactive") return LeafMode::Interactive;
    if (text == "scripted") return LeafMode::Scripted;
    return std::nullopt;
}

Node make_root(std::vector<Node> children)
{
    Node root;
    root.id = std::string(kRootId);
    root.kind = NodeKind::Root;
    root.children = std::move(children);
    return root;
}

int effective_success_threshold(const Node& parallel)
{
    return parallel.params.success_threshold.value_or(static_cast<int>(parallel.children.size()));
}

int effective_failure_threshold(const Node& parallel)
{
    return parallel.params.failure_threshold.value_or(1);
}

const Node* find_node(const Node& node, std::string_view id)
{
    if (node.id == id) return &node;
    for (const auto& child : node.children)
        if (const Node* found = find_node(child, id)) return found;
    return nullptr;
}

const Node* find_node(const Tree& tree, std::string_view id)
{
    return find_node(tree.root, id);
}

void for_each_node(const Node& node, const std::function<void(const Node&)>& visit)
{
    visit(node);
    for (const auto& child : node.children) for_each_node(child, visit);
}

std::vector<const Node*> leaves(const Node& node)
{
    std::vector<const Node*> out;
    for_each_node(node, [&](const Node& n) {
        if (is_leaf(n.kind)) out.push_back(&n);
    });
    return out;
}

std::vector<const Node*> path_to(const Node& root, std::string_view id)
{
    std::vector<const Node*> path;
    if (!collect_path(root, id, path)) path.clear();
    return path;
}

Tree subtree(const Tree& tree, std::string_view id)
{
    const Node* node = find_node(tree, id);
    if (!node) throw Error("no node with id '" + std::string(id) + "' in tree '" + tree.name + "'");
    if (node->kind == NodeKind::Root) return tree;
    Tree out;
    out.name = tree.name + "/" + std::string(id);
    out.schema = tree.schema;
    out.root = make_root({*node});
    return out;
}

std::string slugify(std::string_view label)
{
    std::string out;
    bool pending_sep = false;
    for (unsigned char c : label) {
        if (std::isalnum(c) && c < 0x80) {
            if (pending_sep && !out.empty()) out += '_';
            pending_sep = false;
            out += static_cast<char>(std::tolower(c));
        } else {
            pending_sep = true;
        }
    }
    return out;
}

bool is_valid_id(std::string_view id)
{
    if (id.empty()) return false;
    for (unsigned char c : id)
        if (!(std::isalnum(c) && c < 0x80) && c != '_') return false;
    return true;
}

void assign_ids(Tree& tree)
{
    std::set<std::string, std::less<>> used;
    for_each_node(tree.root, [&](const Node& n) {
        if (!n.id.empty()) used.insert(n.id);
    });

    std::map<NodeKind, int> counters;
    std::function<void(Node&)> visit = [&](Node& node) {
        if (node.id.empty()) {
            if (node.kind == NodeKind::Root) {
                std::string candidate(kRootId);
                for (int n = 2; used.count(candidate); ++n) candidate = std::string(kRootId) + "_" + std::to_string(n);
                node.id = candidate;
            } else if (std::string base = slugify(node.label); !base.empty()) {
                std::string candidate = base;
                for (int n = 2; used.count(candidate); ++n) candidate = base + "_" + std::to_string(n);
                node.id = candidate;
            } else {
                int& counter = counters[node.kind];
                std::string candidate;
                do {
                    ++counter;
                    candidate = std::string(keyword(node.kind)) + "_" + std::to_string(counter);
                } while (used.count(candidate));
                node.id = candidate;
            }
            used.insert(node.id);
        }
        for (auto& child : node.children) visit(child);
    };
    visit(tree.root);
}

} // namespace medbt
