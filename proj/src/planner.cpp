#include "hexplore/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace hexplore::planner {

namespace {

using world::BeliefMap;
using world::BeliefState;
using world::Cell;
using world::Heading;

Heading heading_between(Cell from, Cell to) {
    const int dx = to.x - from.x;
    const int dy = to.y - from.y;
    if (dx == 1 && dy == 0) return Heading::East;
    if (dx == -1 && dy == 0) return Heading::West;
    if (dx == 0 && dy == 1) return Heading::South;
    if (dx == 0 && dy == -1) return Heading::North;
    throw std::invalid_argument("path_to_actions: consecutive cells are not 4-adjacent");
}

void emit_turns(std::vector<ActionStep>& actions, Heading& heading, Heading want) {
    const int diff = (static_cast<int>(want) - static_cast<int>(heading) + 4) % 4;
    if (diff == 1) actions.push_back(ActionStep::TurnRight);
    else if (diff == 3) actions.push_back(ActionStep::TurnLeft);
    else if (diff == 2) {
        actions.push_back(ActionStep::TurnLeft);
        actions.push_back(ActionStep::TurnLeft);
    }
    heading = want;
}

struct Node {
    double f;
    double h;
    int index;  // row-major cell index

    bool operator>(const Node& o) const {
        if (f != o.f) return f > o.f;
        if (h != o.h) return h > o.h;
        return index > o.index;
    }
};

}  // namespace

std::optional<PlanResult> astar(const BeliefMap& belief, Cell start, Cell goal,
                                Heading start_heading, const AStarOptions& opts) {
    const int side = belief.side;
    if (!belief.cells.in_bounds(start.y, start.x) || !belief.cells.in_bounds(goal.y, goal.x))
        throw std::invalid_argument("astar: start or goal outside map");
    if (!belief.known_free(start.x, start.y))
        throw std::invalid_argument("astar: start must be believed free");

    auto traversable = [&](int x, int y) {
        return belief.cells(y, x).state != BeliefState::Wall;
    };
    if (!traversable(goal.x, goal.y)) return std::nullopt;

    auto index_of = [side](Cell c) { return c.y * side + c.x; };
    auto heuristic = [&](Cell c) {
        return static_cast<double>(std::abs(c.x - goal.x) + std::abs(c.y - goal.y));
    };

    if (start == goal) {
        PlanResult r;
        r.cost = 0;
        return r;
    }

    const int n = side * side;
    std::vector<double> g(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    std::vector<std::uint8_t> closed(n, 0);
    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;

    g[index_of(start)] = 0.0;
    open.push({heuristic(start), heuristic(start), index_of(start)});

    while (!open.empty()) {
        const Node node = open.top();
        open.pop();
        if (closed[node.index]) continue;
        closed[node.index] = 1;
        const Cell cur{node.index % side, node.index / side};
        if (cur == goal) break;
        for (Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
            const int nx = cur.x + d.x, ny = cur.y + d.y;
            if (nx < 0 || nx >= side || ny < 0 || ny >= side) continue;
            if (!traversable(nx, ny)) continue;
            const double step_cost =
                belief.cells(ny, nx).state == BeliefState::Unknown ? opts.unknown_cost : 1.0;
            const double tentative = g[node.index] + step_cost;
            const int ni = ny * side + nx;
            if (tentative < g[ni]) {
                g[ni] = tentative;
                parent[ni] = node.index;
                const double h = heuristic({nx, ny});
                open.push({tentative + h, h, ni});
            }
        }
    }

    if (parent[index_of(goal)] == -1) return std::nullopt;

    PlanResult result;
    for (int at = index_of(goal); at != -1; at = parent[at])
        result.cells.push_back({at % side, at / side});
    std::reverse(result.cells.begin(), result.cells.end());
    result.cost = static_cast<int>(result.cells.size()) - 1;
    result.actions = path_to_actions(result.cells, start, start_heading);
    return result;
}

std::vector<ActionStep> path_to_actions(std::span<const world::Cell> path, Cell start,
                                        Heading start_heading) {
    std::vector<ActionStep> actions;
    if (path.empty()) return actions;
    Cell at = start;
    Heading heading = start_heading;
    std::size_t i = 0;
    if (path[0] == start) i = 1;  // paths may or may not include the start cell
    for (; i < path.size(); ++i) {
        emit_turns(actions, heading, heading_between(at, path[i]));
        actions.push_back(ActionStep::MoveForward);
        at = path[i];
    }
    return actions;
}

}  // namespace hexplore::planner
