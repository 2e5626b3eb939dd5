#pragma once

// Random tree generators for property tests.

#include "medbt/node.hpp"

#include <random>
#include <string>
#include <vector>

namespace gen {

struct Options
{
    int max_depth = 4;   // root child is depth 1
    int max_leaves = 10;
    int max_children = 4;
    int max_bound = 3;
    bool parallel = false;
    bool repeat = true;
    bool select = false;
    bool long_running = false; // mark some leaves long_running
    bool fancy = false;        // odd labels, schema, predicates, extras
};

/// Valid tree (validate() is empty) with every id assigned.
medbt::Tree random_tree(std::mt19937_64& rng, const Options& options = {});

/// Sum over leaves of the product of enclosing Retry/Repeat bounds: the
/// number of leaf-attempt positions of the unrolled tree.
int attempt_slots(const medbt::Tree& tree);

/// Random printable text, sometimes multi-byte or with characters that need
/// escaping.
std::string random_label(std::mt19937_64& rng, bool fancy);

/// Random bytes and DSL fragments for parser fuzzing.
std::string random_source(std::mt19937_64& rng, const std::vector<std::string>& seeds);

} // namespace gen
