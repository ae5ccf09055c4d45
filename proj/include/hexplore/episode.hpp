#pragma once

// Episode orchestration: configuration, the deterministic simulation loop
// (decide / act / observe / communicate / fuse), and the step-by-step log.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hexplore/coordination.hpp"
#include "hexplore/ib_comm.hpp"
#include "hexplore/planner.hpp"
#include "hexplore/world.hpp"

namespace hexplore::harness {

enum class CommMode : std::uint8_t { None = 0, Periodic = 1, Full = 2, Gated = 3 };

std::string comm_mode_name(CommMode m);
CommMode comm_mode_from_name(const std::string& name);

struct RewardConstants {
    double success = 500.0;
    double step = -0.01;
    double collision = -3.0;
};

struct EpisodeConfig {
    std::uint64_t seed = 0;
    int maze_side = 15;
    int n_agents = 2;
    int bit_budget = 64;
    CommMode comm_mode = CommMode::Gated;
    int periodic_interval = 10;
    int k_interval = 20;  // high-level decision interval
    int max_steps = 400;
    double dt = 1.0;
    RewardConstants rewards;

    // Coordination constants; config keys mirror the usual symbols.
    double d_norm = 10.0;
    double d_min = 3.0;
    double alpha = 0.1;
    int r_local = 2;
    coord::RewardWeights reward_weights;
    double token_initial = 10.0;
    double token_refill = 1.0 / 60.0;
    double d_comm = 5.0;
    std::array<double, 9> gate_weights{-0.5, 1.0, 0.5, 1.0, 1.0, -0.5, 1.0, 0.5, -1.5};
    int summary_g = 4;

    double fov_degrees = 75.0;
    double max_range = 8.0;
    double braid_fraction = 0.1;
    double unknown_cost = 1.5;
    double drop_probability = 0.0;     // per-delivery loss
    double partner_noise = 0.0;        // half-width of uniform noise on distance estimates
    bool estimate_requires_sight = false;

    // Recorded for completeness; the simulator itself does no learning.
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double w_init_loss = 2.0;
    double w_cont = 0.1;

    void validate() const;  // throws std::invalid_argument on bad configs
    std::string canonical_json() const;
    static EpisodeConfig from_json_text(const std::string& text);
};

struct MessageHeader {
    int sender = 0;
    std::uint16_t grid_side = 0;
    int payload_bits = 0;
    std::uint32_t timestamp = 0;
    int recipients = 0;
};

struct AgentStepRecord {
    world::Cell cell;
    world::Heading heading = world::Heading::East;
    planner::ActionStep action = planner::ActionStep::Stay;
    coord::IntrinsicRewardBreakdown intrinsic;
    double tokens = 0.0;
};

struct StepRecord {
    int step = 0;
    std::vector<AgentStepRecord> agents;
    double extrinsic_delta = 0.0;
    std::vector<MessageHeader> messages;
    int fusion_events = 0;
    double iou = 0.0;
};

struct EpisodeLog {
    EpisodeConfig config;
    world::MazeGrid maze;
    std::vector<StepRecord> steps;
    bool success = false;
    int steps_used = 0;
    int collisions = 0;
    double extrinsic_total = 0.0;
    long long bits_transmitted = 0;
    int messages_sent = 0;
    // Team map built from direct observations only, snapshotted at every
    // decision interval and at episode end.
    std::vector<std::pair<int, world::BeliefMap>> belief_snapshots;
    world::BeliefMap final_team_belief;
};

EpisodeLog run_episode(const EpisodeConfig& cfg);

// Canonical text form of a log; identical configs yield identical bytes.
std::string serialize_episode_log(const EpisodeLog& log);

// Occupancy probabilities for the codec: Wall 1, Free/Target 0, Unknown 0.5.
ibcomm::OccupancyImage belief_to_occupancy(const world::BeliefMap& belief);

// Belief overlay from a decoded message. Overlay cells carry low confidence
// and a large negative timestamp offset so that any direct observation
// outranks them while newer messages still replace older ones.
world::BeliefMap overlay_from_decoded(const ibcomm::OccupancyImage& decoded, int message_step);

}  // namespace hexplore::harness
