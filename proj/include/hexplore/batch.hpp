#pragma once

// Batch evaluation: sweep expansion, parallel episode execution with
// deterministic result ordering, per-group aggregates, and bootstrap
// confidence intervals.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hexplore/episode.hpp"

namespace hexplore::batch {

struct MetricsRow {
    std::string config_digest;
    std::uint64_t seed = 0;
    int side = 0;
    int agents = 0;
    std::string comm_mode;
    int bit_budget = 0;
    bool success = false;
    int steps = 0;
    double iou = 0.0;
    long long bits_tx = 0;
    int msgs = 0;
};

// Cartesian sweep over the listed axes; empty axes fall back to the base
// config's value. Seeds vary fastest.
struct SweepSpec {
    harness::EpisodeConfig base;
    std::vector<std::uint64_t> seeds;
    std::vector<harness::CommMode> modes;
    std::vector<int> budgets;
    std::vector<int> sides;
    std::vector<int> agent_counts;

    std::vector<harness::EpisodeConfig> expand() const;
    static SweepSpec from_json_text(const std::string& text);
};

struct Aggregate {
    std::string group;        // digest of the config with the seed zeroed
    std::string comm_mode;
    int bit_budget = 0;
    int side = 0;
    int agents = 0;
    int n = 0;
    double success_rate = 0.0;
    double success_ci_lo = 0.0;  // bootstrap 95% CI of the mean
    double success_ci_hi = 0.0;
    double mean_steps = 0.0;
    double median_steps = 0.0;
    double mean_iou = 0.0;
    long long total_bits = 0;
    int total_msgs = 0;
};

// FNV-1a of the canonical config JSON, hex-encoded.
std::string config_digest(const harness::EpisodeConfig& cfg);

MetricsRow metrics_from_log(const harness::EpisodeLog& log);

// Runs every config, using up to `parallelism` worker threads; rows come
// back in input order regardless of scheduling.
std::vector<MetricsRow> run_batch(std::span<const harness::EpisodeConfig> cfgs, int parallelism);

// Group rows by configuration (everything except the seed) and aggregate.
std::vector<Aggregate> aggregate_rows(std::span<const MetricsRow> rows,
                                      std::uint64_t bootstrap_seed = 17,
                                      int bootstrap_iters = 1000);

double median(std::vector<double> values);

// One-sided bootstrap p-value for H1: statistic(a) > statistic(b).
double bootstrap_one_sided_p(std::span<const double> a, std::span<const double> b,
                             const std::function<double(std::span<const double>)>& statistic,
                             int iters, std::uint64_t seed);

}  // namespace hexplore::batch
