#pragma once

#include "medbt/exec.hpp"

namespace medbt::detail {

void require_valid(const Tree& tree);

/// run() without the validation pass; used by the batch drivers.
RunResult run_unchecked(const Tree& tree, LeafResolver& resolver, Blackboard initial, std::size_t max_ticks,
                        bool record_trace);

} // namespace medbt::detail
