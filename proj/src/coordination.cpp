#include "hexplore/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hexplore::coord {

namespace {

using world::BeliefMap;
using world::BeliefState;
using world::Cell;
using world::CellBelief;

int tile_size(int side, int g) { return (side + g - 1) / g; }

}  // namespace

int RegionalSummary::region_of(Cell c) const {
    const int tile = tile_size(side, g);
    const int rj = std::min(c.x / tile, g - 1);
    const int ri = std::min(c.y / tile, g - 1);
    return ri * g + rj;
}

Cell RegionalSummary::region_center(int region) const {
    const int tile = tile_size(side, g);
    const int ri = region / g, rj = region % g;
    const int r0 = std::min(ri * tile, side - 1), c0 = std::min(rj * tile, side - 1);
    const int r1 = std::min(r0 + tile, side), c1 = std::min(c0 + tile, side);
    return {(c0 + std::max(c0, c1 - 1)) / 2, (r0 + std::max(r0, r1 - 1)) / 2};
}

std::vector<double> RegionalSummary::feature_vector() const {
    std::vector<double> f;
    f.reserve(regions.size() * 3);
    for (const RegionStats& r : regions) {
        f.push_back(r.exploration_ratio);
        f.push_back(r.walkability_ratio);
        f.push_back(r.agent_present);
    }
    return f;
}

double GatingFeatures::dot(std::span<const double> w) const {
    if (w.size() != values.size())
        throw std::invalid_argument("GatingFeatures: weight vector must have 9 entries");
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * w[i];
    return s;
}

RegionalSummary regional_summary(const BeliefMap& belief,
                                 std::span<const Cell> agent_positions, int g) {
    if (g < 1) throw std::invalid_argument("regional_summary: g must be >= 1");
    RegionalSummary summary;
    summary.g = g;
    summary.side = belief.side;
    summary.regions.assign(static_cast<std::size_t>(g) * g, {});

    const int tile = tile_size(belief.side, g);
    std::vector<int> total(summary.regions.size(), 0);
    std::vector<int> known(summary.regions.size(), 0);
    std::vector<int> free(summary.regions.size(), 0);

    for (int y = 0; y < belief.side; ++y) {
        for (int x = 0; x < belief.side; ++x) {
            const int region = std::min(y / tile, g - 1) * g + std::min(x / tile, g - 1);
            ++total[region];
            const CellBelief& b = belief.cells(y, x);
            if (b.state == BeliefState::Unknown) continue;
            ++known[region];
            if (b.state == BeliefState::Free || b.state == BeliefState::Target) ++free[region];
        }
    }
    for (std::size_t k = 0; k < summary.regions.size(); ++k) {
        RegionStats& r = summary.regions[k];
        r.exploration_ratio = total[k] == 0 ? 1.0 : static_cast<double>(known[k]) / total[k];
        r.walkability_ratio = known[k] == 0 ? 0.0 : static_cast<double>(free[k]) / known[k];
    }
    for (Cell pos : agent_positions) {
        if (pos.x < 0 || pos.x >= belief.side || pos.y < 0 || pos.y >= belief.side) continue;
        summary.regions[summary.region_of(pos)].agent_present = 1.0;
    }
    return summary;
}

Grid2D<double> curiosity_map(const BeliefMap& belief, Cell agent_pos) {
    Grid2D<double> map(belief.side, belief.side, 0.0);
    double peak = 0.0;
    for (int y = 0; y < belief.side; ++y) {
        for (int x = 0; x < belief.side; ++x) {
            if (!belief.known_free(x, y)) continue;
            int unknown = 0;
            for (Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
                const int nx = x + d.x, ny = y + d.y;
                if (!belief.cells.in_bounds(ny, nx)) continue;
                if (belief.cells(ny, nx).state == BeliefState::Unknown) ++unknown;
            }
            if (unknown == 0) continue;
            const double dist = std::hypot(static_cast<double>(x - agent_pos.x),
                                           static_cast<double>(y - agent_pos.y));
            const double v = (unknown / 4.0) * std::exp(-0.1 * dist);
            map(y, x) = v;
            peak = std::max(peak, v);
        }
    }
    if (peak > 0.0)
        for (double& v : map.data()) v /= peak;
    return map;
}

double coordination_reward(std::span<const PartnerEstimate> estimates, double d_norm,
                           double d_min) {
    if (!(d_norm > 0.0)) throw std::invalid_argument("coordination_reward: d_norm must be > 0");
    if (d_min < 0.0) throw std::invalid_argument("coordination_reward: d_min must be >= 0");
    double r = 0.0;
    for (const PartnerEstimate& e : estimates) {
        if (e.distance_cells < 0.0)
            throw std::invalid_argument("coordination_reward: negative distance");
        if (e.distance_cells >= d_min) r += std::min(e.distance_cells / d_norm, 1.0);
    }
    return r;
}

double exploration_reward(std::span<const NewlyRevealedCell> newly_revealed, Cell agent_pos,
                          double alpha, int r_local) {
    if (alpha < 0.0) throw std::invalid_argument("exploration_reward: alpha must be >= 0");
    double r = 0.0;
    for (const NewlyRevealedCell& n : newly_revealed) {
        if (!n.team_previously_unknown) continue;
        const int cheb = std::max(std::abs(n.cell.x - agent_pos.x), std::abs(n.cell.y - agent_pos.y));
        if (cheb > r_local) continue;
        const double dist = std::hypot(static_cast<double>(n.cell.x - agent_pos.x),
                                       static_cast<double>(n.cell.y - agent_pos.y));
        r += std::exp(-alpha * dist);
    }
    return r;
}

IntrinsicRewardBreakdown intrinsic_reward(double curiosity, double coordination,
                                          double exploration, RewardWeights weights) {
    IntrinsicRewardBreakdown b;
    b.curiosity = curiosity;
    b.coordination = coordination;
    b.exploration = exploration;
    b.weights = weights;
    b.composite = weights.curiosity * curiosity + weights.coordination * coordination +
                  weights.exploration * exploration;
    return b;
}

GatingFeatures gating_features(const BeliefMap& belief, Cell agent_pos,
                               const TokenBudget& tokens, int local_window, int summary_g) {
    GatingFeatures f;

    const RegionalSummary summary = regional_summary(belief, {}, summary_g);
    double mean_explored = 0.0;
    for (const RegionStats& r : summary.regions) mean_explored += r.exploration_ratio;
    f.values[0] = mean_explored / summary.regions.size();

    f.values[1] = tokens.initial > 0.0 ? tokens.current / tokens.initial : 0.0;

    const int half = local_window / 2;
    double conf = 0.0;
    int count = 0;
    for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
            const int x = agent_pos.x + dx, y = agent_pos.y + dy;
            if (!belief.cells.in_bounds(y, x)) continue;
            conf += belief.cells(y, x).confidence;
            ++count;
        }
    }
    f.values[2] = count > 0 ? conf / count : 0.0;

    // Believed-free 4-neighborhood pattern.
    bool open_dir[4] = {false, false, false, false};  // N, E, S, W
    int n_free = 0;
    int di = 0;
    for (Cell d : {Cell{0, -1}, Cell{1, 0}, Cell{0, 1}, Cell{-1, 0}}) {
        const int x = agent_pos.x + d.x, y = agent_pos.y + d.y;
        if (belief.cells.in_bounds(y, x) && belief.known_free(x, y)) {
            open_dir[di] = true;
            ++n_free;
        }
        ++di;
    }
    f.values[3] = n_free / 4.0;

    int window_free = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            const int x = agent_pos.x + dx, y = agent_pos.y + dy;
            if (belief.cells.in_bounds(y, x) && belief.known_free(x, y)) ++window_free;
        }

    // Location type one-hot: junction, corridor, dead-end, open-area. An open
    // 3x3 window is classified first; otherwise the 4-neighbor pattern decides.
    int type;
    if (window_free >= 7) type = 3;                                      // open-area
    else if (n_free >= 3) type = 0;                                      // junction
    else if (n_free == 2 && (open_dir[0] == open_dir[2])) type = 1;      // corridor (opposite pair)
    else if (n_free == 2) type = 0;                                      // adjacent pair: junction corner
    else if (n_free == 1) type = 2;                                      // dead-end
    else type = 1;                                                       // default corridor
    f.values[4 + type] = 1.0;

    f.values[8] = 1.0;  // bias
    return f;
}

bool gate_decision(const GatingFeatures& f, std::span<const double> weights,
                   bool partner_in_range, bool tokens_available) {
    if (!partner_in_range || !tokens_available) return false;
    const double p = 1.0 / (1.0 + std::exp(-f.dot(weights)));
    return p >= 0.5;
}

TokenBudget tick_tokens(const TokenBudget& b, bool transmitted) {
    if (transmitted && b.current < 1.0)
        throw InsufficientTokens("tick_tokens: transmit requires at least one token");
    TokenBudget out = b;
    out.current = std::clamp(b.current - (transmitted ? 1.0 : 0.0) + b.refill_rate, 0.0, b.initial);
    return out;
}

std::vector<double> aggregate_curiosity(const Grid2D<double>& curiosity,
                                        const RegionalSummary& summary) {
    std::vector<double> sums(static_cast<std::size_t>(summary.region_count()), 0.0);
    std::vector<int> counts(sums.size(), 0);
    const int tile = tile_size(summary.side, summary.g);
    for (int y = 0; y < curiosity.rows(); ++y) {
        for (int x = 0; x < curiosity.cols(); ++x) {
            const int region =
                std::min(y / tile, summary.g - 1) * summary.g + std::min(x / tile, summary.g - 1);
            sums[region] += curiosity(y, x);
            ++counts[region];
        }
    }
    for (std::size_t k = 0; k < sums.size(); ++k)
        if (counts[k] > 0) sums[k] /= counts[k];
    return sums;
}

std::optional<int> select_goal(const RegionalSummary& summary,
                               std::span<const double> region_curiosity,
                               std::span<const PartnerEstimate> partners,
                               const std::string& policy, std::optional<int> target_region,
                               RewardWeights weights, double d_norm, double d_min) {
    if (policy != "greedy")
        throw std::invalid_argument("select_goal: unknown policy '" + policy + "'");
    if (region_curiosity.size() != static_cast<std::size_t>(summary.region_count()))
        throw std::invalid_argument("select_goal: curiosity vector size mismatch");

    if (target_region && *target_region >= 0 && *target_region < summary.region_count())
        return target_region;

    std::optional<int> best;
    double best_score = 0.0;
    for (int k = 0; k < summary.region_count(); ++k) {
        if (summary.regions[k].exploration_ratio >= 1.0 - 1e-12) continue;  // masked
        const Cell center = summary.region_center(k);
        std::vector<PartnerEstimate> at_goal(partners.begin(), partners.end());
        for (PartnerEstimate& e : at_goal)
            e.distance_cells = std::hypot(static_cast<double>(center.x - e.position.x),
                                          static_cast<double>(center.y - e.position.y));
        const double coord = coordination_reward(at_goal, d_norm, d_min);
        const double score =
            intrinsic_reward(region_curiosity[k], coord, 0.0, weights).composite;
        if (!best || score > best_score) {
            best = k;
            best_score = score;
        }
    }
    return best;  // nullopt when everything is masked (exploration complete)
}

}  // namespace hexplore::coord
