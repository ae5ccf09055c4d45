#pragma once

// High-level decision stack: regional map summaries, frontier curiosity
// maps, the three intrinsic reward components with their fixed weights, the
// 9-feature logistic communication gate, token accounting, and goal
// selection over map regions.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hexplore/grid2d.hpp"
#include "hexplore/world.hpp"

namespace hexplore::coord {

struct InsufficientTokens : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RegionStats {
    double exploration_ratio = 0.0;  // known cells / region cells
    double walkability_ratio = 0.0;  // believed-free / known (0 when none known)
    double agent_present = 0.0;      // 1 when any agent is inside
};

// g x g tiling of the map (ceiling tiles at the edges). Flattens to a
// 3*g^2-dimensional feature vector, region-major.
struct RegionalSummary {
    int g = 4;
    int side = 0;
    std::vector<RegionStats> regions;  // row-major, g*g entries

    int region_count() const { return g * g; }
    int region_of(world::Cell c) const;
    world::Cell region_center(int region) const;
    std::vector<double> feature_vector() const;
};

// Inputs to the communication gate, in order: exploration progress,
// normalized tokens, local confidence, connectivity, one-hot location type
// (junction, corridor, dead-end, open-area), bias.
struct GatingFeatures {
    std::array<double, 9> values{};

    double dot(std::span<const double> w) const;
};

struct TokenBudget {
    double current = 10.0;
    double initial = 10.0;
    double refill_rate = 1.0 / 60.0;
};

struct RewardWeights {
    double curiosity = 1.0;
    double coordination = 0.5;
    double exploration = 0.3;
};

struct IntrinsicRewardBreakdown {
    double curiosity = 0.0;
    double coordination = 0.0;
    double exploration = 0.0;
    double composite = 0.0;
    RewardWeights weights;
};

// Estimated partner location; stands in for a learned distance head with
// ground-truth geometry plus optional noise injected by the harness.
struct PartnerEstimate {
    int partner_id = 0;
    double distance_cells = 0.0;
    world::Cell position;
};

struct NewlyRevealedCell {
    world::Cell cell;
    bool team_previously_unknown = false;
};

RegionalSummary regional_summary(const world::BeliefMap& belief,
                                 std::span<const world::Cell> agent_positions, int g = 4);

// Frontier saliency: zero off-frontier; on believed-free cells with at least
// one Unknown 4-neighbor, (unknown_neighbors / 4) * exp(-0.1 * distance to
// the agent), max-normalized to 1 when any frontier exists.
Grid2D<double> curiosity_map(const world::BeliefMap& belief, world::Cell agent_pos);

// sum_j min(d_j / d_norm, 1) * [d_j >= d_min].
double coordination_reward(std::span<const PartnerEstimate> estimates, double d_norm = 10.0,
                           double d_min = 3.0);

// sum over newly revealed team-unknown cells within Chebyshev radius r_local
// of exp(-alpha * Euclidean distance).
double exploration_reward(std::span<const NewlyRevealedCell> newly_revealed,
                          world::Cell agent_pos, double alpha = 0.1, int r_local = 2);

IntrinsicRewardBreakdown intrinsic_reward(double curiosity, double coordination,
                                          double exploration, RewardWeights weights = {});

GatingFeatures gating_features(const world::BeliefMap& belief, world::Cell agent_pos,
                               const TokenBudget& tokens, int local_window = 3,
                               int summary_g = 4);

// Transmit iff the partner range gate and token gate are open and
// sigma(w . f) >= 0.5 (inclusive threshold).
bool gate_decision(const GatingFeatures& f, std::span<const double> weights,
                   bool partner_in_range, bool tokens_available);

// current' = clamp(current - [transmitted] + refill, 0, initial). Throws
// InsufficientTokens when asked to transmit with less than one token.
TokenBudget tick_tokens(const TokenBudget& b, bool transmitted);

// Greedy goal selection: argmax over unmasked regions of the composite
// intrinsic reward with the region's curiosity and the coordination reward
// evaluated from the region center to each partner position. A known target
// region is returned unconditionally. Returns nullopt when every region is
// masked and no target is known (exploration complete).
std::optional<int> select_goal(const RegionalSummary& summary,
                               std::span<const double> region_curiosity,
                               std::span<const PartnerEstimate> partners,
                               const std::string& policy = "greedy",
                               std::optional<int> target_region = std::nullopt,
                               RewardWeights weights = {}, double d_norm = 10.0,
                               double d_min = 3.0);

// Mean curiosity per region (0 for empty regions).
std::vector<double> aggregate_curiosity(const Grid2D<double>& curiosity,
                                        const RegionalSummary& summary);

}  // namespace hexplore::coord
