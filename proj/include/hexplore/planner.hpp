#pragma once

// Deterministic low-level control: A* over believed-free cells and
// compilation of grid paths into the discrete action set.

#include <optional>
#include <span>
#include <vector>

#include "hexplore/world.hpp"

namespace hexplore::planner {

enum class ActionStep : std::uint8_t { MoveForward = 0, TurnLeft = 1, TurnRight = 2, Stay = 3 };

struct PlanResult {
    std::vector<world::Cell> cells;     // empty when start == goal
    std::vector<ActionStep> actions;
    int cost = 0;                       // moves along the path
};

struct AStarOptions {
    double unknown_cost = 1.5;  // entering an Unknown cell; believed-free costs 1
};

// Shortest 4-connected path from start to goal through cells not believed
// Wall. Unknown cells are traversable at unknown_cost. Manhattan heuristic;
// ties broken by (f, h, row-major index), so results are bit-stable.
// Returns nullopt when the goal is unreachable. The start cell must be
// believed Free (or Target).
std::optional<PlanResult> astar(const world::BeliefMap& belief, world::Cell start,
                                world::Cell goal, world::Heading start_heading,
                                const AStarOptions& opts = {});

// Minimal turn sequence between consecutive cells; a reversal compiles to
// two TurnLeft. Throws std::invalid_argument on non-adjacent cells.
std::vector<ActionStep> path_to_actions(std::span<const world::Cell> path,
                                        world::Cell start, world::Heading start_heading);

}  // namespace hexplore::planner
