#include "hexplore/outputs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hexplore::outputs {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_fixed(double v, int digits) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_pgm(const std::string& path, const Grid2D<double>& values, double lo, double hi) {
    std::string out = "P5\n" + std::to_string(values.cols()) + " " +
                      std::to_string(values.rows()) + "\n255\n";
    out.reserve(out.size() + values.size());
    const double span = hi > lo ? hi - lo : 1.0;
    for (double v : values.data()) {
        if (std::isnan(v)) {
            out += '\0';
            continue;
        }
        const double scaled = 1.0 + 254.0 * (v - lo) / span;
        out += static_cast<char>(static_cast<unsigned char>(std::clamp(scaled, 1.0, 255.0)));
    }
    write_text_file(path, out);
}

void write_belief_pgm(const std::string& path, const world::BeliefMap& belief) {
    std::string out = "P5\n" + std::to_string(belief.side) + " " + std::to_string(belief.side) +
                      "\n255\n";
    for (int y = 0; y < belief.side; ++y) {
        for (int x = 0; x < belief.side; ++x) {
            unsigned char px = 0;
            switch (belief.cells(y, x).state) {
                case world::BeliefState::Unknown: px = 0; break;
                case world::BeliefState::Wall: px = 64; break;
                case world::BeliefState::Free: px = 192; break;
                case world::BeliefState::Target: px = 255; break;
            }
            out += static_cast<char>(px);
        }
    }
    write_text_file(path, out);
}

void write_episode_outputs(const harness::EpisodeLog& log, const std::string& out_dir) {
    ensure_dir(out_dir);
    write_text_file(out_dir + "/config.json", log.config.canonical_json());
    write_text_file(out_dir + "/maze.txt", world::serialize_maze(log.maze));
    write_text_file(out_dir + "/episode.log", harness::serialize_episode_log(log));
    write_metrics_csv({batch::metrics_from_log(log)}, out_dir + "/metrics.csv");
    for (const auto& [step, belief] : log.belief_snapshots) {
        char name[48];
        std::snprintf(name, sizeof(name), "/belief_%05d.pgm", step);
        write_belief_pgm(out_dir + name, belief);
    }
}

void write_metrics_csv(const std::vector<batch::MetricsRow>& rows, const std::string& path) {
    std::string out = "seed,side,agents,comm_mode,bit_budget,success,steps,iou,bits_tx,msgs\n";
    for (const auto& r : rows) {
        out += std::to_string(r.seed) + "," + std::to_string(r.side) + "," +
               std::to_string(r.agents) + "," + r.comm_mode + "," +
               std::to_string(r.bit_budget) + "," + (r.success ? "1" : "0") + "," +
               std::to_string(r.steps) + "," + fmt_fixed(r.iou, 6) + "," +
               std::to_string(r.bits_tx) + "," + std::to_string(r.msgs) + "\n";
    }
    write_text_file(path, out);
}

void write_summary_csv(const std::vector<batch::Aggregate>& aggregates, const std::string& path) {
    std::string out =
        "comm_mode,bit_budget,side,agents,n,success_rate,success_ci_lo,success_ci_hi,"
        "mean_steps,median_steps,mean_iou,total_bits,total_msgs\n";
    for (const auto& a : aggregates) {
        out += a.comm_mode + "," + std::to_string(a.bit_budget) + "," + std::to_string(a.side) +
               "," + std::to_string(a.agents) + "," + std::to_string(a.n) + "," +
               fmt_fixed(a.success_rate, 6) + "," + fmt_fixed(a.success_ci_lo, 6) + "," +
               fmt_fixed(a.success_ci_hi, 6) + "," + fmt_fixed(a.mean_steps, 3) + "," +
               fmt_fixed(a.median_steps, 3) + "," + fmt_fixed(a.mean_iou, 6) + "," +
               std::to_string(a.total_bits) + "," + std::to_string(a.total_msgs) + "\n";
    }
    write_text_file(path, out);
}

TrajectoryData read_trajectory_csv(const std::string& path) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("trajectory CSV '" + path + "' is empty");

    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream fs(s);
        while (std::getline(fs, field, ',')) fields.push_back(field);
        return fields;
    };

    const auto header = split(line);
    if (header.size() < 5 || header[0] != "t" || header[1] != "x" || header[2] != "y" ||
        header[3] != "dwell")
        throw IoError("trajectory CSV '" + path + "': expected header t,x,y,dwell,a_1,...");

    TrajectoryData data;
    for (std::size_t u = 4; u < header.size(); ++u) data.unit_names.push_back(header[u]);
    data.unit_activations.resize(data.unit_names.size());

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw IoError("trajectory CSV '" + path + "': line " + std::to_string(line_no) +
                          " has " + std::to_string(fields.size()) + " fields");
        gridness::TrajectorySample s;
        s.position = {std::stod(fields[1]), std::stod(fields[2])};
        s.dwell_seconds = std::stod(fields[3]);
        data.samples.push_back(s);
        for (std::size_t u = 0; u < data.unit_names.size(); ++u)
            data.unit_activations[u].push_back(std::stod(fields[4 + u]));
    }
    if (data.samples.empty()) throw IoError("trajectory CSV '" + path + "' has no samples");
    return data;
}

void write_gridness_outputs(const TrajectoryData& data, const GridnessOptions& opts,
                            const std::string& out_dir) {
    ensure_dir(out_dir);

    gridness::ArenaBounds arena{{1e300, 1e300}, {-1e300, -1e300}};
    for (const auto& s : data.samples) {
        arena.min.x = std::min(arena.min.x, s.position.x);
        arena.min.y = std::min(arena.min.y, s.position.y);
        arena.max.x = std::max(arena.max.x, s.position.x);
        arena.max.y = std::max(arena.max.y, s.position.y);
    }
    // Nudge the upper corner so boundary samples land inside the last bin.
    arena.max.x += 1e-9;
    arena.max.y += 1e-9;

    std::string csv =
        "unit,g60,g90,annulus60_rmin,annulus60_rmax,annulus90_rmin,annulus90_rmax,status\n";
    for (std::size_t u = 0; u < data.unit_names.size(); ++u) {
        const auto raw = gridness::build_rate_map(data.samples, data.unit_activations[u], arena,
                                                  opts.bin_size);
        const auto smoothed = gridness::smooth_rate_map(raw, opts.smooth_sigma);
        const auto sac = gridness::spatial_autocorrelogram(smoothed, {opts.min_overlap});

        char name[64];
        std::snprintf(name, sizeof(name), "/rate_map_%s.pgm", data.unit_names[u].c_str());
        double lo = 1e300, hi = -1e300;
        for (double v : smoothed.bins.data())
            if (!std::isnan(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        write_pgm(out_dir + name, smoothed.bins, lo, hi);
        std::snprintf(name, sizeof(name), "/sac_%s.pgm", data.unit_names[u].c_str());
        write_pgm(out_dir + name, sac.values, -1.0, 1.0);

        try {
            const auto report = gridness::best_gridness(sac, opts.search);
            csv += data.unit_names[u] + "," + fmt_fixed(report.g60, 6) + "," +
                   fmt_fixed(report.g90, 6) + "," + fmt_fixed(report.best_annulus_60.r_min, 1) +
                   "," + fmt_fixed(report.best_annulus_60.r_max, 1) + "," +
                   fmt_fixed(report.best_annulus_90.r_min, 1) + "," +
                   fmt_fixed(report.best_annulus_90.r_max, 1) + ",ok\n";
        } catch (const gridness::InsufficientData&) {
            csv += data.unit_names[u] + ",,,,,,,insufficient_data\n";
        }
    }
    write_text_file(out_dir + "/gridness.csv", csv);
}

}  // namespace hexplore::outputs
