#pragma once

// Compares FSM acceptance with engine runs on the same outcome sequences.

#include "medbt/analysis.hpp"
#include "medbt/exec.hpp"

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing_support {

/// Feeds a fixed symbol sequence to the engine in order; any deviation (other
/// leaf asked, sequence exhausted) makes the run "stuck".
class SequenceResolver : public medbt::LeafResolver
{
public:
    struct Stuck
    {};

    explicit SequenceResolver(const std::vector<medbt::FsmSymbol>& symbols) : m_symbols(symbols) {}

    std::optional<medbt::Resolution> resolve(const medbt::LeafQuery& query) override
    {
        if (m_pos >= m_symbols.size() || m_symbols[m_pos].leaf != query.node.id) throw Stuck{};
        const auto& s = m_symbols[m_pos++];
        if (query.node.kind == medbt::NodeKind::Select && s.outcome == medbt::Status::Success)
            return medbt::Resolution::chose(0);
        return medbt::Resolution::outcome(s.outcome);
    }

    std::size_t consumed() const { return m_pos; }

private:
    const std::vector<medbt::FsmSymbol>& m_symbols;
    std::size_t m_pos = 0;
};

/// Engine verdict on a symbol sequence: the final status if the run consumes
/// exactly the sequence and terminates, nullopt otherwise.
inline std::optional<medbt::Status> engine_accepts(const medbt::Tree& tree,
                                                   const std::vector<medbt::FsmSymbol>& symbols,
                                                   const std::optional<medbt::Blackboard>& initial)
{
    SequenceResolver resolver(symbols);
    medbt::RunOptions options;
    options.initial_blackboard = initial;
    options.record_trace = false;
    try {
        medbt::RunResult r = medbt::run(tree, resolver, options);
        if (r.outcome != medbt::RunOutcome::Completed || resolver.consumed() != symbols.size()) return std::nullopt;
        return r.final_status;
    } catch (const SequenceResolver::Stuck&) {
        return std::nullopt;
    }
}

struct FsmComparison
{
    std::size_t executions = 0;
    std::size_t sequences = 0;
    std::size_t mismatches = 0;
    std::string first_mismatch;
};

inline std::string render(const std::vector<medbt::FsmSymbol>& symbols)
{
    std::ostringstream out;
    for (const auto& s : symbols) out << s.leaf << ':' << (s.outcome == medbt::Status::Success ? 'S' : 'F') << ' ';
    return out.str();
}

/// Every execution of the tree, plus `mutations` random edits of each
/// (flip, drop, truncate, extend), must get the same verdict from the FSM and
/// from the engine.
inline FsmComparison compare_fsm(const medbt::Tree& tree, std::mt19937_64& rng, int mutations = 3,
                                 const std::optional<medbt::Blackboard>& initial = std::nullopt)
{
    FsmComparison out;
    const medbt::Fsm fsm = medbt::to_fsm(tree);
    std::vector<std::string> leaf_ids;
    for (const medbt::Node* l : medbt::leaves(tree.root)) leaf_ids.push_back(l->id);

    auto compare = [&](const std::vector<medbt::FsmSymbol>& symbols, std::optional<medbt::Status> expected) {
        ++out.sequences;
        const auto by_fsm = fsm.accepts(symbols);
        const auto by_engine = engine_accepts(tree, symbols, initial);
        bool ok = by_fsm == by_engine && (!expected || by_engine == expected);
        if (!ok) {
            if (out.mismatches++ == 0) {
                auto name = [](std::optional<medbt::Status> s) {
                    return s ? std::string(medbt::to_string(*s)) : std::string("rejected");
                };
                out.first_mismatch = tree.name + ": " + render(symbols) + "fsm=" + name(by_fsm) +
                                     " engine=" + name(by_engine);
            }
        }
    };

    medbt::EnumerationLimits limits;
    limits.max_executions = 200'000;
    medbt::enumerate_executions(
        tree,
        [&](const medbt::Execution& e) {
            ++out.executions;
            std::vector<medbt::FsmSymbol> symbols;
            for (const auto& o : e.outcomes) symbols.push_back({o.leaf, o.status});
            compare(symbols, e.final_status);

            for (int m = 0; m < mutations; ++m) {
                auto edited = symbols;
                std::uniform_int_distribution<int> kind(0, 3);
                switch (kind(rng)) {
                case 0:
                    if (!edited.empty()) {
                        auto& s = edited[std::uniform_int_distribution<std::size_t>(0, edited.size() - 1)(rng)];
                        s.outcome = s.outcome == medbt::Status::Success ? medbt::Status::Failure
                                                                        : medbt::Status::Success;
                    }
                    break;
                case 1:
                    if (!edited.empty())
                        edited.erase(edited.begin() +
                                     std::ptrdiff_t(std::uniform_int_distribution<std::size_t>(0, edited.size() - 1)(rng)));
                    break;
                case 2:
                    edited.resize(std::uniform_int_distribution<std::size_t>(0, edited.size())(rng));
                    break;
                default: {
                    const auto& leaf = leaf_ids[std::uniform_int_distribution<std::size_t>(0, leaf_ids.size() - 1)(rng)];
                    edited.push_back({leaf, std::bernoulli_distribution(0.5)(rng) ? medbt::Status::Success
                                                                                  : medbt::Status::Failure});
                    break;
                }
                }
                compare(edited, std::nullopt);
            }
        },
        limits, initial);
    return out;
}

} // namespace testing_support
