#include "hexplore/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "hexplore/rng.hpp"
#include "json.hpp"

namespace hexplore::batch {

std::vector<harness::EpisodeConfig> SweepSpec::expand() const {
    auto or_default = [](const auto& axis, auto fallback) {
        using T = std::decay_t<decltype(fallback)>;
        if (axis.empty()) return std::vector<T>{fallback};
        return std::vector<T>(axis.begin(), axis.end());
    };
    const auto modes_ = or_default(modes, base.comm_mode);
    const auto budgets_ = or_default(budgets, base.bit_budget);
    const auto sides_ = or_default(sides, base.maze_side);
    const auto agents_ = or_default(agent_counts, base.n_agents);
    const auto seeds_ = or_default(seeds, base.seed);

    std::vector<harness::EpisodeConfig> cfgs;
    cfgs.reserve(modes_.size() * budgets_.size() * sides_.size() * agents_.size() * seeds_.size());
    for (auto mode : modes_)
        for (int budget : budgets_)
            for (int side : sides_)
                for (int agents : agents_)
                    for (auto seed : seeds_) {
                        harness::EpisodeConfig cfg = base;
                        cfg.comm_mode = mode;
                        cfg.bit_budget = budget;
                        cfg.maze_side = side;
                        cfg.n_agents = agents;
                        cfg.seed = seed;
                        cfgs.push_back(cfg);
                    }
    return cfgs;
}

SweepSpec SweepSpec::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("sweep: invalid JSON: ") + e.what());
    }
    SweepSpec spec;
    if (j.contains("base")) spec.base = harness::EpisodeConfig::from_json_text(j.at("base").dump());
    if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("n_seeds")) {
        const auto n = j.at("n_seeds").get<std::uint64_t>();
        const auto first = j.value<std::uint64_t>("first_seed", 0);
        spec.seeds.clear();
        for (std::uint64_t s = 0; s < n; ++s) spec.seeds.push_back(first + s);
    }
    if (j.contains("comm_modes"))
        for (const auto& name : j.at("comm_modes"))
            spec.modes.push_back(harness::comm_mode_from_name(name.get<std::string>()));
    if (j.contains("bit_budgets")) spec.budgets = j.at("bit_budgets").get<std::vector<int>>();
    if (j.contains("maze_sides")) spec.sides = j.at("maze_sides").get<std::vector<int>>();
    if (j.contains("agent_counts")) spec.agent_counts = j.at("agent_counts").get<std::vector<int>>();
    return spec;
}

std::string config_digest(const harness::EpisodeConfig& cfg) {
    const std::string text = cfg.canonical_json();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

MetricsRow metrics_from_log(const harness::EpisodeLog& log) {
    MetricsRow row;
    row.config_digest = config_digest(log.config);
    row.seed = log.config.seed;
    row.side = log.config.maze_side;
    row.agents = log.config.n_agents;
    row.comm_mode = harness::comm_mode_name(log.config.comm_mode);
    row.bit_budget = log.config.bit_budget;
    row.success = log.success;
    row.steps = log.steps_used;
    row.iou = log.steps.empty() ? 0.0 : log.steps.back().iou;
    row.bits_tx = log.bits_transmitted;
    row.msgs = log.messages_sent;
    return row;
}

std::vector<MetricsRow> run_batch(std::span<const harness::EpisodeConfig> cfgs, int parallelism) {
    if (cfgs.empty()) throw std::invalid_argument("run_batch: empty sweep");
    std::vector<MetricsRow> rows(cfgs.size());
    const int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(cfgs.size())));
    std::atomic<std::size_t> cursor{0};

    auto work = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= cfgs.size()) return;
            rows[i] = metrics_from_log(harness::run_episode(cfgs[i]));
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return rows;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<Aggregate> aggregate_rows(std::span<const MetricsRow> rows,
                                      std::uint64_t bootstrap_seed, int bootstrap_iters) {
    // Group key ignores the seed so that one group = one swept configuration.
    std::map<std::string, std::vector<const MetricsRow*>> groups;
    std::vector<std::string> order;
    for (const MetricsRow& row : rows) {
        const std::string key = row.comm_mode + "|" + std::to_string(row.bit_budget) + "|" +
                                std::to_string(row.side) + "|" + std::to_string(row.agents);
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(&row);
    }

    std::vector<Aggregate> out;
    for (const std::string& key : order) {
        const auto& members = groups[key];
        Aggregate agg;
        agg.group = key;
        agg.comm_mode = members.front()->comm_mode;
        agg.bit_budget = members.front()->bit_budget;
        agg.side = members.front()->side;
        agg.agents = members.front()->agents;
        agg.n = static_cast<int>(members.size());

        std::vector<double> successes, steps, ious;
        for (const MetricsRow* m : members) {
            successes.push_back(m->success ? 1.0 : 0.0);
            steps.push_back(m->steps);
            ious.push_back(m->iou);
            agg.total_bits += m->bits_tx;
            agg.total_msgs += m->msgs;
        }
        auto mean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return v.empty() ? 0.0 : s / v.size();
        };
        agg.success_rate = mean(successes);
        agg.mean_steps = mean(steps);
        agg.median_steps = median(steps);
        agg.mean_iou = mean(ious);

        // Percentile bootstrap over the success mean.
        std::uint64_t key_hash = 0xcbf29ce484222325ULL;
        for (unsigned char c : key) {
            key_hash ^= c;
            key_hash *= 0x100000001b3ULL;
        }
        Rng rng(Rng::split(bootstrap_seed, key_hash));
        std::vector<double> boot(bootstrap_iters);
        for (int b = 0; b < bootstrap_iters; ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < successes.size(); ++k)
                s += successes[rng.uniform_index(successes.size())];
            boot[b] = s / successes.size();
        }
        std::sort(boot.begin(), boot.end());
        agg.success_ci_lo = boot[static_cast<std::size_t>(0.025 * (bootstrap_iters - 1))];
        agg.success_ci_hi = boot[static_cast<std::size_t>(0.975 * (bootstrap_iters - 1))];
        out.push_back(agg);
    }
    return out;
}

double bootstrap_one_sided_p(std::span<const double> a, std::span<const double> b,
                             const std::function<double(std::span<const double>)>& statistic,
                             int iters, std::uint64_t seed) {
    if (a.empty() || b.empty()) throw std::invalid_argument("bootstrap: empty sample");
    Rng rng(seed);
    std::vector<double> ra(a.size()), rb(b.size());
    int not_greater = 0;
    for (int it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < a.size(); ++i) ra[i] = a[rng.uniform_index(a.size())];
        for (std::size_t i = 0; i < b.size(); ++i) rb[i] = b[rng.uniform_index(b.size())];
        if (!(statistic(ra) > statistic(rb))) ++not_greater;
    }
    return (not_greater + 1.0) / (iters + 1.0);
}

}  // namespace hexplore::batch
