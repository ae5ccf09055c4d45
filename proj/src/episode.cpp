#include "hexplore/episode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <stdexcept>

#include "hexplore/rng.hpp"
#include "json.hpp"

namespace hexplore::harness {

namespace {

using world::BeliefMap;
using world::BeliefState;
using world::Cell;
using world::Heading;
using planner::ActionStep;

constexpr int kOverlayStampOffset = 1000000;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct AgentRuntime {
    int id = 0;
    Cell cell;
    Heading heading = Heading::East;
    BeliefMap belief;
    coord::TokenBudget tokens;
    std::deque<ActionStep> plan;
    Cell goal;
    bool has_goal = false;
    Rng rng;
    std::vector<Cell> last_seen;  // per-partner last sighting (sight-gated estimates)

    AgentRuntime(int id_, int side, std::uint64_t seed)
        : id(id_), belief(side), rng(Rng::split(seed, 1000 + static_cast<std::uint64_t>(id_))) {}
};

double euclid(Cell a, Cell b) {
    return std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

}  // namespace

std::string comm_mode_name(CommMode m) {
    switch (m) {
        case CommMode::None: return "none";
        case CommMode::Periodic: return "periodic";
        case CommMode::Full: return "full";
        case CommMode::Gated: return "gated";
    }
    return "none";
}

CommMode comm_mode_from_name(const std::string& name) {
    if (name == "none") return CommMode::None;
    if (name == "periodic") return CommMode::Periodic;
    if (name == "full") return CommMode::Full;
    if (name == "gated") return CommMode::Gated;
    throw std::invalid_argument("unknown comm_mode '" + name + "'");
}

void EpisodeConfig::validate() const {
    if (maze_side < 7 || maze_side % 2 == 0)
        throw std::invalid_argument("config: maze_side must be odd and >= 7");
    if (n_agents < 1 || n_agents > 5)
        throw std::invalid_argument("config: n_agents must be in [1, 5]");
    if (bit_budget < 1) throw std::invalid_argument("config: bit_budget must be >= 1");
    if (periodic_interval < 1) throw std::invalid_argument("config: periodic_interval must be >= 1");
    if (k_interval < 1) throw std::invalid_argument("config: K_interval must be >= 1");
    if (max_steps < 1) throw std::invalid_argument("config: max_steps must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be > 0");
    if (!(d_norm > 0.0)) throw std::invalid_argument("config: d_norm must be > 0");
    if (d_min < 0.0) throw std::invalid_argument("config: d_min must be >= 0");
    if (alpha < 0.0) throw std::invalid_argument("config: alpha must be >= 0");
    if (r_local < 0) throw std::invalid_argument("config: r_local must be >= 0");
    if (!(token_initial >= 0.0)) throw std::invalid_argument("config: token_initial must be >= 0");
    if (!(token_refill >= 0.0)) throw std::invalid_argument("config: token_refill must be >= 0");
    if (!(d_comm > 0.0)) throw std::invalid_argument("config: d_comm must be > 0");
    if (summary_g < 1) throw std::invalid_argument("config: summary_g must be >= 1");
    if (!(fov_degrees > 0.0 && fov_degrees <= 360.0))
        throw std::invalid_argument("config: fov_degrees must be in (0, 360]");
    if (!(max_range >= 1.0)) throw std::invalid_argument("config: max_range must be >= 1");
    if (braid_fraction < 0.0 || braid_fraction > 1.0)
        throw std::invalid_argument("config: braid_fraction must be in [0, 1]");
    if (!(unknown_cost > 0.0)) throw std::invalid_argument("config: unknown_cost must be > 0");
    if (drop_probability < 0.0 || drop_probability > 1.0)
        throw std::invalid_argument("config: drop_probability must be in [0, 1]");
    if (partner_noise < 0.0) throw std::invalid_argument("config: partner_noise must be >= 0");
}

std::string EpisodeConfig::canonical_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["maze_side"] = maze_side;
    j["n_agents"] = n_agents;
    j["bit_budget"] = bit_budget;
    j["comm_mode"] = comm_mode_name(comm_mode);
    j["periodic_interval"] = periodic_interval;
    j["K_interval"] = k_interval;
    j["max_steps"] = max_steps;
    j["dt"] = dt;
    j["reward_success"] = rewards.success;
    j["reward_step"] = rewards.step;
    j["reward_collision"] = rewards.collision;
    j["d_norm"] = d_norm;
    j["d_min"] = d_min;
    j["alpha"] = alpha;
    j["r_local"] = r_local;
    j["w_curiosity"] = reward_weights.curiosity;
    j["w_coord"] = reward_weights.coordination;
    j["w_explore"] = reward_weights.exploration;
    j["token_initial"] = token_initial;
    j["token_refill"] = token_refill;
    j["d_comm"] = d_comm;
    j["gate_weights"] = gate_weights;
    j["summary_g"] = summary_g;
    j["fov_degrees"] = fov_degrees;
    j["max_range"] = max_range;
    j["braid_fraction"] = braid_fraction;
    j["unknown_cost"] = unknown_cost;
    j["drop_probability"] = drop_probability;
    j["partner_noise"] = partner_noise;
    j["estimate_requires_sight"] = estimate_requires_sight;
    j["gamma"] = gamma;
    j["gae_lambda"] = gae_lambda;
    j["w_init_loss"] = w_init_loss;
    j["w_cont"] = w_cont;
    return j.dump(2) + "\n";
}

EpisodeConfig EpisodeConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    EpisodeConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
    };
    get("seed", cfg.seed);
    get("maze_side", cfg.maze_side);
    get("n_agents", cfg.n_agents);
    get("bit_budget", cfg.bit_budget);
    if (j.contains("comm_mode")) cfg.comm_mode = comm_mode_from_name(j.at("comm_mode"));
    get("periodic_interval", cfg.periodic_interval);
    get("K_interval", cfg.k_interval);
    get("max_steps", cfg.max_steps);
    get("dt", cfg.dt);
    get("reward_success", cfg.rewards.success);
    get("reward_step", cfg.rewards.step);
    get("reward_collision", cfg.rewards.collision);
    get("d_norm", cfg.d_norm);
    get("d_min", cfg.d_min);
    get("alpha", cfg.alpha);
    get("r_local", cfg.r_local);
    get("w_curiosity", cfg.reward_weights.curiosity);
    get("w_coord", cfg.reward_weights.coordination);
    get("w_explore", cfg.reward_weights.exploration);
    get("token_initial", cfg.token_initial);
    get("token_refill", cfg.token_refill);
    get("d_comm", cfg.d_comm);
    if (j.contains("gate_weights")) {
        const auto w = j.at("gate_weights").get<std::vector<double>>();
        if (w.size() != 9) throw std::invalid_argument("config: gate_weights must have 9 entries");
        std::copy(w.begin(), w.end(), cfg.gate_weights.begin());
    }
    get("summary_g", cfg.summary_g);
    get("fov_degrees", cfg.fov_degrees);
    get("max_range", cfg.max_range);
    get("braid_fraction", cfg.braid_fraction);
    get("unknown_cost", cfg.unknown_cost);
    get("drop_probability", cfg.drop_probability);
    get("partner_noise", cfg.partner_noise);
    get("estimate_requires_sight", cfg.estimate_requires_sight);
    get("gamma", cfg.gamma);
    get("gae_lambda", cfg.gae_lambda);
    get("w_init_loss", cfg.w_init_loss);
    get("w_cont", cfg.w_cont);
    cfg.validate();
    return cfg;
}

ibcomm::OccupancyImage belief_to_occupancy(const BeliefMap& belief) {
    Grid2D<double> g(belief.side, belief.side, 0.5);
    for (int y = 0; y < belief.side; ++y) {
        for (int x = 0; x < belief.side; ++x) {
            switch (belief.cells(y, x).state) {
                case BeliefState::Wall: g(y, x) = 1.0; break;
                case BeliefState::Free:
                case BeliefState::Target: g(y, x) = 0.0; break;
                case BeliefState::Unknown: g(y, x) = 0.5; break;
            }
        }
    }
    return ibcomm::OccupancyImage(std::move(g));
}

BeliefMap overlay_from_decoded(const ibcomm::OccupancyImage& decoded, int message_step) {
    const int side = decoded.values.rows();
    BeliefMap overlay(side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            world::CellBelief& b = overlay.cells(y, x);
            b.state = decoded.values(y, x) > 0.5 ? BeliefState::Wall : BeliefState::Free;
            b.confidence = 0.3;
            b.timestamp = message_step - kOverlayStampOffset;
        }
    }
    return overlay;
}

EpisodeLog run_episode(const EpisodeConfig& cfg) {
    cfg.validate();

    EpisodeLog log;
    log.config = cfg;
    log.maze = world::generate_maze(cfg.seed, cfg.maze_side,
                                    {.braid_fraction = cfg.braid_fraction});
    const world::MazeGrid& maze = log.maze;
    const int side = cfg.maze_side;

    std::vector<AgentRuntime> agents;
    agents.reserve(cfg.n_agents);
    for (int i = 0; i < cfg.n_agents; ++i) {
        AgentRuntime a(i, side, cfg.seed);
        a.cell = maze.spawn_cells[i % maze.spawn_cells.size()];
        a.heading = Heading::East;
        a.tokens = {cfg.token_initial, cfg.token_initial, cfg.token_refill};
        a.last_seen.assign(cfg.n_agents, a.cell);
        agents.push_back(std::move(a));
    }
    Rng delivery_rng(Rng::split(cfg.seed, 999));

    BeliefMap team_direct(side);

    auto integrate_direct = [&](AgentRuntime& a, int step,
                                std::vector<coord::NewlyRevealedCell>* newly) {
        const auto obs = world::observe(maze, a.cell, a.heading, cfg.fov_degrees, cfg.max_range);
        if (newly) {
            for (const auto& o : obs) {
                const bool fresh = team_direct.at(o.cell).state == BeliefState::Unknown;
                if (fresh) newly->push_back({o.cell, true});
            }
        }
        world::integrate_observation(a.belief, obs, step);
        world::integrate_observation(team_direct, obs, step);
        // Track partner sightings for sight-gated estimates.
        for (const AgentRuntime& other : agents) {
            if (other.id == a.id) continue;
            for (const auto& o : obs)
                if (o.cell == other.cell) a.last_seen[other.id] = other.cell;
        }
    };

    auto partner_estimates = [&](AgentRuntime& a) {
        std::vector<coord::PartnerEstimate> est;
        for (const AgentRuntime& other : agents) {
            if (other.id == a.id) continue;
            coord::PartnerEstimate e;
            e.partner_id = other.id;
            e.position = cfg.estimate_requires_sight ? a.last_seen[other.id] : other.cell;
            double d = euclid(a.cell, e.position);
            if (cfg.partner_noise > 0.0) d += a.rng.uniform(-cfg.partner_noise, cfg.partner_noise);
            e.distance_cells = std::max(0.0, d);
            est.push_back(e);
        }
        return est;
    };

    auto find_target = [&](const BeliefMap& belief) -> std::optional<Cell> {
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x)
                if (belief.cells(y, x).state == BeliefState::Target) return Cell{x, y};
        return std::nullopt;
    };

    // Pick the planning target inside a chosen region: the most salient
    // frontier cell, falling back to the region center.
    auto goal_cell_in_region = [&](const Grid2D<double>& cmap,
                                   const coord::RegionalSummary& summary, int region) {
        Cell best = summary.region_center(region);
        double best_v = 0.0;
        const int tile = (side + summary.g - 1) / summary.g;
        const int ri = region / summary.g, rj = region % summary.g;
        for (int y = ri * tile; y < std::min((ri + 1) * tile, side); ++y)
            for (int x = rj * tile; x < std::min((rj + 1) * tile, side); ++x)
                if (cmap(y, x) > best_v) {
                    best_v = cmap(y, x);
                    best = {x, y};
                }
        return best;
    };

    // Exploration-complete fallback: revisit the stalest believed-free cell.
    auto stalest_free_cell = [&](const BeliefMap& belief, Cell current) -> std::optional<Cell> {
        std::optional<Cell> best;
        int best_age = std::numeric_limits<int>::max();
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) {
                if (!belief.known_free(x, y) || (Cell{x, y} == current)) continue;
                const int ts = belief.cells(y, x).timestamp;
                if (ts < best_age) {
                    best_age = ts;
                    best = Cell{x, y};
                }
            }
        return best;
    };

    auto replan = [&](AgentRuntime& a, int step, coord::IntrinsicRewardBreakdown* breakdown) {
        const auto estimates = partner_estimates(a);
        std::vector<Cell> positions;
        for (const AgentRuntime& o : agents) positions.push_back(o.cell);
        const auto summary = coord::regional_summary(a.belief, positions, cfg.summary_g);
        const auto cmap = coord::curiosity_map(a.belief, a.cell);
        const auto region_cur = coord::aggregate_curiosity(cmap, summary);

        std::optional<Cell> target = find_target(a.belief);
        std::optional<int> target_region;
        if (target) target_region = summary.region_of(*target);

        const auto goal_region =
            coord::select_goal(summary, region_cur, estimates, "greedy", target_region,
                               cfg.reward_weights, cfg.d_norm, cfg.d_min);

        a.plan.clear();
        a.has_goal = false;
        if (goal_region) {
            if (breakdown) {
                std::vector<coord::PartnerEstimate> at_goal = estimates;
                const Cell center = summary.region_center(*goal_region);
                for (auto& e : at_goal) e.distance_cells = euclid(center, e.position);
                *breakdown = coord::intrinsic_reward(
                    region_cur[*goal_region],
                    coord::coordination_reward(at_goal, cfg.d_norm, cfg.d_min), 0.0,
                    cfg.reward_weights);
            }
            a.goal = target ? *target : goal_cell_in_region(cmap, summary, *goal_region);
            a.has_goal = true;
        } else {
            const auto stale = stalest_free_cell(a.belief, a.cell);
            if (stale) {
                a.goal = *stale;
                a.has_goal = true;
            }
        }
        if (!a.has_goal) return;
        auto plan = planner::astar(a.belief, a.cell, a.goal, a.heading,
                                   {.unknown_cost = cfg.unknown_cost});
        if (!plan && !target) {
            // Unreachable frontier: fall back to the stalest reachable free cell.
            const auto stale = stalest_free_cell(a.belief, a.cell);
            if (stale) {
                a.goal = *stale;
                plan = planner::astar(a.belief, a.cell, a.goal, a.heading,
                                      {.unknown_cost = cfg.unknown_cost});
            }
        }
        if (plan)
            a.plan.assign(plan->actions.begin(), plan->actions.end());
        else
            a.has_goal = false;
    };

    // Initial sweep before the first step.
    for (AgentRuntime& a : agents) integrate_direct(a, 0, nullptr);

    for (int step = 1; step <= cfg.max_steps; ++step) {
        StepRecord rec;
        rec.step = step;
        rec.agents.resize(agents.size());
        const bool decision_step = (step - 1) % cfg.k_interval == 0;

        std::vector<coord::IntrinsicRewardBreakdown> breakdowns(agents.size());

        for (std::size_t i = 0; i < agents.size(); ++i) {
            AgentRuntime& a = agents[i];
            if (decision_step || a.plan.empty())
                replan(a, step, decision_step ? &breakdowns[i] : nullptr);
        }

        bool success = false;
        for (std::size_t i = 0; i < agents.size(); ++i) {
            AgentRuntime& a = agents[i];
            ActionStep action = ActionStep::Stay;
            if (!a.plan.empty()) {
                action = a.plan.front();
                a.plan.pop_front();
            }
            switch (action) {
                case ActionStep::MoveForward: {
                    const Cell d = world::heading_delta(a.heading);
                    const Cell next{a.cell.x + d.x, a.cell.y + d.y};
                    if (!maze.is_free(next.x, next.y)) {
                        // Collision with an unexpected wall: record it, pay the
                        // penalty, and force a replan.
                        world::ObservedCell bump{next, BeliefState::Wall, 1.0};
                        world::integrate_observation(a.belief, {&bump, 1}, step);
                        world::integrate_observation(team_direct, {&bump, 1}, step);
                        ++log.collisions;
                        rec.extrinsic_delta += cfg.rewards.collision;
                        a.plan.clear();
                    } else {
                        a.cell = next;
                    }
                    break;
                }
                case ActionStep::TurnLeft: a.heading = world::turn_left(a.heading); break;
                case ActionStep::TurnRight: a.heading = world::turn_right(a.heading); break;
                case ActionStep::Stay: break;
            }

            std::vector<coord::NewlyRevealedCell> newly;
            integrate_direct(a, step, &newly);
            breakdowns[i].exploration =
                coord::exploration_reward(newly, a.cell, cfg.alpha, cfg.r_local);
            breakdowns[i] = coord::intrinsic_reward(breakdowns[i].curiosity,
                                                    breakdowns[i].coordination,
                                                    breakdowns[i].exploration, cfg.reward_weights);

            rec.agents[i].cell = a.cell;
            rec.agents[i].heading = a.heading;
            rec.agents[i].action = action;
            rec.agents[i].intrinsic = breakdowns[i];

            if (a.cell == maze.target_cell) success = true;
        }

        // Communication phase: decisions read this step's post-move state.
        for (std::size_t i = 0; i < agents.size(); ++i) {
            AgentRuntime& a = agents[i];
            const auto estimates = partner_estimates(a);
            bool in_range = false;
            for (const auto& e : estimates)
                if (e.distance_cells <= cfg.d_comm) in_range = true;

            bool transmit = false;
            bool counts_tokens = false;
            switch (cfg.comm_mode) {
                case CommMode::None: break;
                case CommMode::Full: transmit = in_range; break;
                case CommMode::Periodic:
                    transmit = in_range && (step % cfg.periodic_interval == 0);
                    break;
                case CommMode::Gated: {
                    const auto features = coord::gating_features(a.belief, a.cell, a.tokens, 3,
                                                                 cfg.summary_g);
                    const bool tokens_available = a.tokens.current >= 1.0;
                    transmit = coord::gate_decision(features, cfg.gate_weights, in_range,
                                                    tokens_available);
                    counts_tokens = true;
                    break;
                }
            }

            if (transmit) {
                const auto occ = belief_to_occupancy(a.belief);
                const auto msg = ibcomm::encode_map(
                    occ, cfg.bit_budget,
                    {static_cast<std::uint16_t>(a.cell.x), static_cast<std::uint16_t>(a.cell.y)},
                    static_cast<std::uint32_t>(step));
                log.bits_transmitted += static_cast<long long>(msg.payload_bits());
                ++log.messages_sent;

                MessageHeader header;
                header.sender = a.id;
                header.grid_side = msg.grid_side;
                header.payload_bits = static_cast<int>(msg.payload_bits());
                header.timestamp = msg.timestamp;

                const auto decoded = ibcomm::decode_map(msg, side);
                const auto overlay = overlay_from_decoded(decoded, step);
                for (std::size_t j = 0; j < agents.size(); ++j) {
                    if (j == i) continue;
                    double d = 0.0;
                    for (const auto& e : estimates)
                        if (e.partner_id == agents[j].id) d = e.distance_cells;
                    if (d > cfg.d_comm) continue;
                    if (cfg.drop_probability > 0.0 &&
                        delivery_rng.uniform() < cfg.drop_probability)
                        continue;
                    world::fuse_belief(agents[j].belief, overlay);
                    ++rec.fusion_events;
                    ++header.recipients;
                }
                rec.messages.push_back(header);
            }
            a.tokens = coord::tick_tokens(a.tokens, transmit && counts_tokens);
            rec.agents[i].tokens = a.tokens.current;
        }

        rec.extrinsic_delta += cfg.rewards.step;
        if (success) rec.extrinsic_delta += cfg.rewards.success;
        rec.iou = world::map_iou(team_direct, maze);
        log.extrinsic_total += rec.extrinsic_delta;
        log.steps_used = step;

        if (decision_step || success || step == cfg.max_steps)
            log.belief_snapshots.emplace_back(step, team_direct);

        log.steps.push_back(std::move(rec));
        if (success) {
            log.success = true;
            break;
        }
    }

    log.final_team_belief = team_direct;
    return log;
}

std::string serialize_episode_log(const EpisodeLog& log) {
    std::string out;
    out += "config " + log.config.canonical_json();
    out += "maze\n" + world::serialize_maze(log.maze);
    for (const StepRecord& rec : log.steps) {
        out += "step " + std::to_string(rec.step);
        out += " extrinsic " + fmt_double(rec.extrinsic_delta);
        out += " iou " + fmt_double(rec.iou);
        out += " fusions " + std::to_string(rec.fusion_events);
        out += "\n";
        for (std::size_t i = 0; i < rec.agents.size(); ++i) {
            const AgentStepRecord& a = rec.agents[i];
            out += "  agent " + std::to_string(i);
            out += " pos " + std::to_string(a.cell.x) + "," + std::to_string(a.cell.y);
            out += " heading " + std::to_string(static_cast<int>(a.heading));
            out += " action " + std::to_string(static_cast<int>(a.action));
            out += " tokens " + fmt_double(a.tokens);
            out += " r_int " + fmt_double(a.intrinsic.composite);
            out += " (" + fmt_double(a.intrinsic.curiosity) + "," +
                   fmt_double(a.intrinsic.coordination) + "," +
                   fmt_double(a.intrinsic.exploration) + ")";
            out += "\n";
        }
        for (const MessageHeader& m : rec.messages) {
            out += "  msg sender " + std::to_string(m.sender);
            out += " side " + std::to_string(m.grid_side);
            out += " bits " + std::to_string(m.payload_bits);
            out += " t " + std::to_string(m.timestamp);
            out += " recipients " + std::to_string(m.recipients);
            out += "\n";
        }
    }
    out += "outcome success " + std::string(log.success ? "1" : "0");
    out += " steps " + std::to_string(log.steps_used);
    out += " collisions " + std::to_string(log.collisions);
    out += " extrinsic " + fmt_double(log.extrinsic_total);
    out += " bits " + std::to_string(log.bits_transmitted);
    out += " msgs " + std::to_string(log.messages_sent);
    out += "\n";
    return out;
}

}  // namespace hexplore::harness
