#pragma once

// File outputs: metrics CSV, PGM images, maze text, config echo, and the
// trajectory-CSV gridness analysis.

#include <string>
#include <vector>

#include "hexplore/batch.hpp"
#include "hexplore/gridness.hpp"

namespace hexplore::outputs {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trajectory CSV: header `t,x,y,dwell,a_1,...,a_U`, one unit per activation
// column.
struct TrajectoryData {
    std::vector<gridness::TrajectorySample> samples;
    std::vector<std::vector<double>> unit_activations;  // [unit][sample]
    std::vector<std::string> unit_names;
};

struct GridnessOptions {
    double bin_size = 1.0;
    double smooth_sigma = 1.0;  // bins
    int min_overlap = 20;
    gridness::AnnulusSearch search;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// 8-bit binary PGM. Missing (NaN) values render as 0; the rest map linearly
// from [lo, hi] onto [1, 255].
void write_pgm(const std::string& path, const Grid2D<double>& values, double lo, double hi);

// Fixed palette: Unknown 0, Wall 64, Free 192, Target 255.
void write_belief_pgm(const std::string& path, const world::BeliefMap& belief);

// metrics.csv (header + one row per episode), maze.txt, config.json echo,
// episode.log, and belief_XXXX.pgm snapshots.
void write_episode_outputs(const harness::EpisodeLog& log, const std::string& out_dir);

void write_metrics_csv(const std::vector<batch::MetricsRow>& rows, const std::string& path);
void write_summary_csv(const std::vector<batch::Aggregate>& aggregates, const std::string& path);

TrajectoryData read_trajectory_csv(const std::string& path);

// Per-unit gridness reports (gridness.csv) plus rate-map and SAC PGMs.
void write_gridness_outputs(const TrajectoryData& data, const GridnessOptions& opts,
                            const std::string& out_dir);

}  // namespace hexplore::outputs
