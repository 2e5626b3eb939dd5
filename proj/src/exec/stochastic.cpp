#include "run_internal.hpp"

#include <exception>
#include <limits>
#include <random>
#include <thread>
#include <unordered_map>

namespace medbt {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double StochasticModel::probability(const std::string& leaf) const
{
    auto it = p.find(leaf);
    return it == p.end() ? default_p : it->second;
}

double SimulationReport::ticked_fraction(const std::string& leaf) const
{
    auto it = leaf_stats.find(leaf);
    if (it == leaf_stats.end() || runs == 0) return 0.0;
    return static_cast<double>(it->second.runs_ticked) / static_cast<double>(runs);
}

namespace {

struct Shard
{
    std::uint64_t successes = 0;
    std::uint64_t failures = 0;
    std::uint64_t budget_exhausted = 0;
    std::uint64_t total_ticks = 0;
    std::unordered_map<std::string, LeafStats> leaf_stats;
};

class StochasticResolver : public LeafResolver
{
public:
    StochasticResolver(const StochasticModel& model, Shard& shard) : m_model(model), m_shard(shard) {}

    void begin_run(std::uint64_t run_index)
    {
        m_rng.seed(splitmix64(m_model.seed ^ splitmix64(run_index)));
        ++m_run_marker;
    }

    std::optional<Resolution> resolve(const LeafQuery& query) override
    {
        const Node& node = query.node;
        auto& stats = m_shard.leaf_stats[node.id];
        auto& marker = m_seen[node.id];
        ++stats.attempts;
        if (marker != m_run_marker) {
            marker = m_run_marker;
            ++stats.runs_ticked;
        }

        if (node.kind == NodeKind::Select) return Resolution::chose(uniform(query.options.size()));
        if (node.kind == NodeKind::Condition && node.params.check && !m_model.p.count(node.id)) return std::nullopt;
        return Resolution::outcome(bernoulli(m_model.probability(node.id)) ? Status::Success : Status::Failure);
    }

private:
    bool bernoulli(double p)
    {
        const double u = static_cast<double>(m_rng() >> 11) * 0x1.0p-53;
        return u < p;
    }

    std::size_t uniform(std::size_t n)
    {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r;
        do {
            r = m_rng();
        } while (r >= limit);
        return static_cast<std::size_t>(r % bound);
    }

    const StochasticModel& m_model;
    Shard& m_shard;
    std::mt19937_64 m_rng;
    std::uint64_t m_run_marker = 0;
    std::unordered_map<std::string, std::uint64_t> m_seen;
};

void run_shard(const Tree& tree, const StochasticModel& model, const Blackboard& initial, std::uint64_t begin,
               std::uint64_t end, std::size_t max_ticks, Shard& shard)
{
    StochasticResolver resolver(model, shard);
    for (std::uint64_t i = begin; i < end; ++i) {
        resolver.begin_run(i);
        RunResult r = detail::run_unchecked(tree, resolver, initial, max_ticks, false);
        shard.total_ticks += r.ticks_used;
        if (r.outcome == RunOutcome::BudgetExhausted)
            ++shard.budget_exhausted;
        else if (r.final_status == Status::Success)
            ++shard.successes;
        else
            ++shard.failures;
    }
}

} // namespace

SimulationReport simulate(const Tree& tree, const StochasticModel& model, std::uint64_t runs,
                          const SimulateOptions& options)
{
    if (runs < 1) throw Error("runs must be at least 1");
    auto in_range = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in_range(model.default_p)) throw Error("default probability must be in [0, 1]");
    for (const auto& [leaf, p] : model.p)
        if (!in_range(p)) throw Error("probability for '" + leaf + "' must be in [0, 1]");
    detail::require_valid(tree);

    const Blackboard initial = Blackboard::with_defaults(tree.schema);

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    if (runs < 10'000) threads = 1;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, runs));

    std::vector<Shard> shards(threads);
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> workers;
    const std::uint64_t per = runs / threads, extra = runs % threads;
    std::uint64_t begin = 0;
    for (unsigned t = 0; t < threads; ++t) {
        const std::uint64_t end = begin + per + (t < extra ? 1 : 0);
        workers.emplace_back([&, t, begin, end] {
            try {
                run_shard(tree, model, initial, begin, end, options.max_ticks, shards[t]);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    SimulationReport report;
    report.tree = tree.name;
    report.seed = model.seed;
    report.runs = runs;
    for (const Node* leaf : leaves(tree.root)) report.leaf_stats[leaf->id];
    for (const auto& shard : shards) {
        report.successes += shard.successes;
        report.failures += shard.failures;
        report.budget_exhausted += shard.budget_exhausted;
        report.total_ticks += shard.total_ticks;
        for (const auto& [leaf, stats] : shard.leaf_stats) {
            auto& agg = report.leaf_stats[leaf];
            agg.attempts += stats.attempts;
            agg.runs_ticked += stats.runs_ticked;
        }
    }
    report.success_rate = static_cast<double>(report.successes) / static_cast<double>(runs);
    report.mean_ticks = static_cast<double>(report.total_ticks) / static_cast<double>(runs);
    return report;
}

} // namespace medbt
