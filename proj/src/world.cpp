#include "hexplore/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace hexplore::world {

namespace {

constexpr double kPi = 3.14159265358979323846;

double heading_angle(Heading h) {
    switch (h) {
        case Heading::East: return 0.0;
        case Heading::South: return 0.5 * kPi;  // y grows downward
        case Heading::West: return kPi;
        case Heading::North: return 1.5 * kPi;
    }
    return 0.0;
}

BeliefState observe_state(const MazeGrid& maze, int x, int y) {
    if (maze.cells(y, x) == CellState::Wall) return BeliefState::Wall;
    if (maze.target_cell.x == x && maze.target_cell.y == y) return BeliefState::Target;
    return BeliefState::Free;
}

int state_precedence(BeliefState s) {
    switch (s) {
        case BeliefState::Wall: return 3;
        case BeliefState::Target: return 2;
        case BeliefState::Free: return 1;
        case BeliefState::Unknown: return 0;
    }
    return 0;
}

}  // namespace

Cell heading_delta(Heading h) {
    switch (h) {
        case Heading::North: return {0, -1};
        case Heading::East: return {1, 0};
        case Heading::South: return {0, 1};
        case Heading::West: return {-1, 0};
    }
    return {0, 0};
}

Heading turn_left(Heading h) {
    return static_cast<Heading>((static_cast<int>(h) + 3) % 4);
}

Heading turn_right(Heading h) {
    return static_cast<Heading>((static_cast<int>(h) + 1) % 4);
}

MazeGrid generate_maze(std::uint64_t seed, int side, const MazeOptions& opts) {
    if (side < 7 || side % 2 == 0)
        throw std::invalid_argument("generate_maze: side must be odd and >= 7");

    Rng rng(Rng::split(seed, 0x6d617a65));  // dedicated maze stream

    MazeGrid maze;
    maze.side = side;
    maze.cells = Grid2D<CellState>(side, side, CellState::Wall);

    // Depth-first carve over the room lattice (odd coordinates).
    Grid2D<std::uint8_t> visited(side, side, 0);
    std::vector<Cell> stack{{1, 1}};
    visited(1, 1) = 1;
    maze.cells(1, 1) = CellState::Free;
    while (!stack.empty()) {
        const Cell cur = stack.back();
        std::vector<Cell> next;
        for (Cell d : {Cell{2, 0}, Cell{-2, 0}, Cell{0, 2}, Cell{0, -2}}) {
            const int nx = cur.x + d.x, ny = cur.y + d.y;
            if (nx < 1 || nx >= side - 1 || ny < 1 || ny >= side - 1) continue;
            if (!visited(ny, nx)) next.push_back({nx, ny});
        }
        if (next.empty()) {
            stack.pop_back();
            continue;
        }
        const Cell chosen = next[rng.uniform_index(next.size())];
        maze.cells((cur.y + chosen.y) / 2, (cur.x + chosen.x) / 2) = CellState::Free;
        maze.cells(chosen.y, chosen.x) = CellState::Free;
        visited(chosen.y, chosen.x) = 1;
        stack.push_back(chosen);
    }

    // Braid: knock out a fraction of the walls that separate two free cells,
    // creating loops and junctions.
    std::vector<Cell> separating;
    for (int y = 1; y < side - 1; ++y) {
        for (int x = 1; x < side - 1; ++x) {
            if (maze.cells(y, x) != CellState::Wall) continue;
            const bool horiz = maze.is_free(x - 1, y) && maze.is_free(x + 1, y);
            const bool vert = maze.is_free(x, y - 1) && maze.is_free(x, y + 1);
            if (horiz || vert) separating.push_back({x, y});
        }
    }
    rng.shuffle(separating);
    const std::size_t removals =
        static_cast<std::size_t>(std::floor(opts.braid_fraction * separating.size()));
    for (std::size_t i = 0; i < removals; ++i)
        maze.cells(separating[i].y, separating[i].x) = CellState::Free;

    // Spawns: the four corner rooms plus a central room.
    const int far = side - 2;
    int mid = side / 2;
    if (mid % 2 == 0) ++mid;
    const Cell candidates[5] = {{1, 1}, {far, 1}, {1, far}, {far, far}, {mid, mid}};
    for (int i = 0; i < std::min(opts.spawn_count, 5); ++i)
        maze.spawn_cells.push_back(candidates[i]);

    // Target: a free cell well away from the first spawn.
    auto is_spawn = [&](Cell c) {
        return std::find(maze.spawn_cells.begin(), maze.spawn_cells.end(), c) !=
               maze.spawn_cells.end();
    };
    std::vector<Cell> free_cells;
    for (int y = 1; y < side - 1; ++y)
        for (int x = 1; x < side - 1; ++x)
            if (maze.cells(y, x) == CellState::Free && !is_spawn({x, y})) free_cells.push_back({x, y});
    const int min_dist = side / 2;
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
        const Cell c = free_cells[rng.uniform_index(free_cells.size())];
        if (std::max(std::abs(c.x - 1), std::abs(c.y - 1)) >= min_dist) {
            maze.target_cell = c;
            placed = true;
        }
    }
    if (!placed) {
        // Fall back to the free cell farthest from the first spawn.
        Cell best = free_cells.front();
        int best_d = -1;
        for (Cell c : free_cells) {
            const int d = std::abs(c.x - 1) + std::abs(c.y - 1);
            if (d > best_d) {
                best_d = d;
                best = c;
            }
        }
        maze.target_cell = best;
    }
    return maze;
}

std::vector<ObservedCell> observe(const MazeGrid& maze, Cell agent, Heading heading,
                                  double fov_degrees, double max_range,
                                  double rays_per_degree) {
    if (!(fov_degrees > 0.0 && fov_degrees <= 360.0))
        throw std::invalid_argument("observe: fov must be in (0, 360]");
    if (!(max_range >= 1.0)) throw std::invalid_argument("observe: max_range must be >= 1");
    if (!(rays_per_degree > 0.0)) throw std::invalid_argument("observe: rays_per_degree must be > 0");
    if (!maze.cells.in_bounds(agent.y, agent.x))
        throw std::invalid_argument("observe: agent outside maze");

    const int side = maze.side;
    Grid2D<std::uint8_t> seen(side, side, 0);
    seen(agent.y, agent.x) = 1;

    const int n_rays = std::max(1, static_cast<int>(std::ceil(fov_degrees * rays_per_degree)));
    const double fov_rad = fov_degrees * kPi / 180.0;
    const double start = heading_angle(heading) - 0.5 * fov_rad;
    const double step = fov_rad / n_rays;

    const double ox = agent.x + 0.5;
    const double oy = agent.y + 0.5;

    for (int k = 0; k < n_rays; ++k) {
        const double a = start + (k + 0.5) * step;  // half-offset avoids corner-exact fans
        const double dx = std::cos(a);
        const double dy = std::sin(a);

        // Exact voxel traversal from the agent's cell center.
        int cx = agent.x, cy = agent.y;
        const int sx = dx > 0 ? 1 : -1;
        const int sy = dy > 0 ? 1 : -1;
        const double inf = std::numeric_limits<double>::infinity();
        const double t_dx = dx != 0.0 ? std::fabs(1.0 / dx) : inf;
        const double t_dy = dy != 0.0 ? std::fabs(1.0 / dy) : inf;
        double t_max_x =
            dx != 0.0 ? ((dx > 0 ? (cx + 1 - ox) : (ox - cx)) * t_dx) : inf;
        double t_max_y =
            dy != 0.0 ? ((dy > 0 ? (cy + 1 - oy) : (oy - cy)) * t_dy) : inf;

        while (true) {
            double t_entry;
            if (std::fabs(t_max_x - t_max_y) < 1e-12 && t_max_x != inf) {
                // Exact corner: pass through both side cells (conservative).
                t_entry = t_max_x;
                if (t_entry > max_range) break;
                const int nx = cx + sx, ny = cy + sy;
                bool blocked = false;
                for (Cell c : {Cell{nx, cy}, Cell{cx, ny}}) {
                    if (!maze.cells.in_bounds(c.y, c.x)) { blocked = true; continue; }
                    seen(c.y, c.x) = 1;
                    if (maze.cells(c.y, c.x) == CellState::Wall) blocked = true;
                }
                if (blocked) break;
                cx = nx;
                cy = ny;
                t_max_x += t_dx;
                t_max_y += t_dy;
            } else if (t_max_x < t_max_y) {
                t_entry = t_max_x;
                if (t_entry > max_range) break;
                cx += sx;
                t_max_x += t_dx;
            } else {
                t_entry = t_max_y;
                if (t_entry > max_range) break;
                cy += sy;
                t_max_y += t_dy;
            }
            if (!maze.cells.in_bounds(cy, cx)) break;
            seen(cy, cx) = 1;
            if (maze.cells(cy, cx) == CellState::Wall) break;  // wall reported, ray stops
        }
    }

    std::vector<ObservedCell> out;
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            if (!seen(y, x)) continue;
            ObservedCell oc;
            oc.cell = {x, y};
            oc.state = observe_state(maze, x, y);
            oc.distance = std::hypot(static_cast<double>(x - agent.x),
                                     static_cast<double>(y - agent.y));
            out.push_back(oc);
        }
    }
    return out;
}

void integrate_observation(BeliefMap& belief, std::span<const ObservedCell> obs, int step) {
    for (const ObservedCell& o : obs) {
        if (!belief.cells.in_bounds(o.cell.y, o.cell.x)) continue;
        CellBelief& b = belief.at(o.cell);
        const double conf = std::max(0.5, 1.0 - 0.05 * o.distance);
        if (b.state == o.state && b.timestamp == step && b.confidence > conf) continue;
        b.state = o.state;
        b.confidence = conf;
        b.timestamp = step;
    }
}

void fuse_belief(BeliefMap& mine, const BeliefMap& received) {
    if (mine.side != received.side)
        throw std::invalid_argument("fuse_belief: dimension mismatch");
    for (int y = 0; y < mine.side; ++y) {
        for (int x = 0; x < mine.side; ++x) {
            CellBelief& a = mine.cells(y, x);
            const CellBelief& b = received.cells(y, x);
            if (b.state == BeliefState::Unknown) continue;  // Unknown never overrides known
            if (a.state == BeliefState::Unknown) { a = b; continue; }
            if (b.timestamp != a.timestamp) {
                if (b.timestamp > a.timestamp) a = b;
                continue;
            }
            if (b.confidence != a.confidence) {
                if (b.confidence > a.confidence) a = b;
                continue;
            }
            if (state_precedence(b.state) > state_precedence(a.state)) a = b;
        }
    }
}

double map_iou(const BeliefMap& belief, const MazeGrid& truth) {
    if (belief.side != truth.side) throw std::invalid_argument("map_iou: dimension mismatch");
    int inter = 0, uni = 0;
    for (int y = 0; y < truth.side; ++y) {
        for (int x = 0; x < truth.side; ++x) {
            const bool believed = belief.known_free(x, y);
            const bool actual = truth.cells(y, x) == CellState::Free;
            if (believed && actual) ++inter;
            if (believed || actual) ++uni;
        }
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

ExplorationStats exploration_stats(const BeliefMap& belief, int since) {
    ExplorationStats stats;
    int known = 0;
    for (int y = 0; y < belief.side; ++y) {
        for (int x = 0; x < belief.side; ++x) {
            const CellBelief& b = belief.cells(y, x);
            if (b.state == BeliefState::Unknown) continue;
            ++known;
            if (b.timestamp >= since) stats.newly_explored.push_back({x, y});
        }
    }
    const int total = belief.side * belief.side;
    stats.explored_ratio = total == 0 ? 0.0 : static_cast<double>(known) / total;
    return stats;
}

std::string serialize_maze(const MazeGrid& maze) {
    std::string out;
    out.reserve(static_cast<std::size_t>(maze.side) * (maze.side + 1));
    auto is_spawn = [&](int x, int y) {
        return std::find(maze.spawn_cells.begin(), maze.spawn_cells.end(), Cell{x, y}) !=
               maze.spawn_cells.end();
    };
    for (int y = 0; y < maze.side; ++y) {
        for (int x = 0; x < maze.side; ++x) {
            if (maze.cells(y, x) == CellState::Wall)
                out += '#';
            else if (maze.target_cell.x == x && maze.target_cell.y == y)
                out += 'T';
            else if (is_spawn(x, y))
                out += 'S';
            else
                out += '.';
        }
        out += '\n';
    }
    return out;
}

MazeGrid parse_maze(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    if (lines.empty()) throw std::invalid_argument("parse_maze: empty input");
    const int side = static_cast<int>(lines.size());
    MazeGrid maze;
    maze.side = side;
    maze.cells = Grid2D<CellState>(side, side, CellState::Wall);
    for (int y = 0; y < side; ++y) {
        if (static_cast<int>(lines[y].size()) != side)
            throw std::invalid_argument("parse_maze: grid is not square");
        for (int x = 0; x < side; ++x) {
            switch (lines[y][x]) {
                case '#': maze.cells(y, x) = CellState::Wall; break;
                case '.': maze.cells(y, x) = CellState::Free; break;
                case 'T':
                    maze.cells(y, x) = CellState::Free;
                    maze.target_cell = {x, y};
                    break;
                case 'S':
                    maze.cells(y, x) = CellState::Free;
                    maze.spawn_cells.push_back({x, y});
                    break;
                default: throw std::invalid_argument("parse_maze: unexpected character");
            }
        }
    }
    return maze;
}

}  // namespace hexplore::world
