#pragma once

#include "medbt/blackboard.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace medbt {

enum class NodeKind : std::uint8_t {
    Root,
    Sequence,
    Selector,
    Parallel,
    Recovery,
    Retry,
    Repeat,
    Invert,
    Action,
    Condition,
    Select,
};

bool is_composite(NodeKind kind);
bool is_decorator(NodeKind kind);
bool is_leaf(NodeKind kind);

/// DSL keyword ("sequence", "retry", ...). Root maps to "root".
std::string_view keyword(NodeKind kind);
std::optional<NodeKind> kind_from_keyword(std::string_view word);

/// Who resolves a leaf: the configured resolver (auto), a human (interactive),
/// or only a script / stochastic model (scripted).
enum class LeafMode : std::uint8_t { Auto, Interactive, Scripted };

std::string_view to_string(LeafMode mode);
std::optional<LeafMode> parse_leaf_mode(std::string_view text);

struct NodeParams
{
    // Parallel thresholds; absent means the defaults (all children / 1).
    std::optional<int> success_threshold;
    std::optional<int> failure_threshold;

    // Retry attempts or Repeat iterations.
    std::optional<int> bound;
    // Repeat-until predicate (mutually exclusive with bound).
    std::optional<Predicate> until;

    // Select: options are read from one key, the choice is written to another.
    std::string options_key;
    std::string into_key;

    LeafMode mode = LeafMode::Auto;
    bool long_running = false;
    // Condition evaluated against the blackboard when no resolver answers it.
    std::optional<Predicate> check;
    // Action: on Success the leaf label is appended to this string-list key.
    std::string appends;

    // Unrecognised kv-params, kept verbatim.
    std::map<std::string, std::string> extra;

    bool operator==(const NodeParams&) const = default;
};

struct Node
{
    std::string id;
    NodeKind kind = NodeKind::Action;
    std::string label;
    std::vector<Node> children;
    NodeParams params;

    bool operator==(const Node&) const = default;
};

/// A behavior tree: a dedicated Root node with exactly one child, plus the
/// declared blackboard schema.
struct Tree
{
    std::string name;
    Node root;
    BlackboardSchema schema;

    bool operator==(const Tree&) const = default;
};

inline constexpr std::string_view kRootId = "root";

Node make_root(std::vector<Node> children = {});

int effective_success_threshold(const Node& parallel);
int effective_failure_threshold(const Node& parallel);

const Node* find_node(const Node& node, std::string_view id);
const Node* find_node(const Tree& tree, std::string_view id);

/// Pre-order visit.
void for_each_node(const Node& node, const std::function<void(const Node&)>& visit);

std::vector<const Node*> leaves(const Node& node);

/// Ids of the nodes on the path root -> target (inclusive); empty if absent.
std::vector<const Node*> path_to(const Node& root, std::string_view id);

/// Wraps a copy of the subtree rooted at `id` in a fresh root, keeping the
/// schema. Throws Error if the id is absent.
Tree subtree(const Tree& tree, std::string_view id);

/// Lower-case slug of a label suitable as an id ([a-z0-9_]+), or "" if the
/// label has no alphanumeric characters.
std::string slugify(std::string_view label);

/// Fills every empty id: slug of the label, or keyword_N for unlabelled
/// nodes, suffixed _2, _3... on collision. Non-empty ids are kept.
void assign_ids(Tree& tree);

bool is_valid_id(std::string_view id);

} // namespace medbt
