#pragma once

// Grid world: procedural mazes, field-of-view raycast observation, per-agent
// belief maps with confidence/timestamp metadata, the multi-criteria fusion
// rule, and map-quality metrics.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hexplore/grid2d.hpp"
#include "hexplore/rng.hpp"

namespace hexplore::world {

enum class CellState : std::uint8_t { Free = 0, Wall = 1 };

enum class BeliefState : std::uint8_t { Unknown = 0, Free = 1, Target = 2, Wall = 3 };

struct Cell {
    int x = 0;
    int y = 0;

    bool operator==(const Cell&) const = default;
};

// Discrete 4-way heading. Angles follow grid coordinates (y grows downward).
enum class Heading : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

Cell heading_delta(Heading h);
Heading turn_left(Heading h);
Heading turn_right(Heading h);

struct MazeOptions {
    double braid_fraction = 0.1;  // share of separating walls removed after carving
    int spawn_count = 5;
};

struct MazeGrid {
    int side = 0;
    Grid2D<CellState> cells;
    Cell target_cell;
    std::vector<Cell> spawn_cells;

    bool is_free(int x, int y) const {
        return cells.in_bounds(y, x) && cells(y, x) == CellState::Free;
    }
};

struct CellBelief {
    BeliefState state = BeliefState::Unknown;
    double confidence = 0.0;
    int timestamp = 0;  // negative stamps mark decoded-message overlays

    bool operator==(const CellBelief&) const = default;
};

struct BeliefMap {
    int side = 0;
    Grid2D<CellBelief> cells;

    BeliefMap() = default;
    explicit BeliefMap(int side_) : side(side_), cells(side_, side_) {}

    const CellBelief& at(Cell c) const { return cells(c.y, c.x); }
    CellBelief& at(Cell c) { return cells(c.y, c.x); }
    bool known_free(int x, int y) const {
        const auto& b = cells(y, x);
        return b.state == BeliefState::Free || b.state == BeliefState::Target;
    }
};

struct ObservedCell {
    Cell cell;
    BeliefState state = BeliefState::Free;  // never Unknown
    double distance = 0.0;                  // Euclidean, cell centers
};

struct ExplorationStats {
    double explored_ratio = 0.0;
    std::vector<Cell> newly_explored;
};

// Recursive-backtracker maze on an odd-sized grid with a walled border, then
// braid_fraction of the separating walls removed to create loops. Same seed
// and side always produce the identical grid, target, and spawns.
MazeGrid generate_maze(std::uint64_t seed, int side, const MazeOptions& opts = {});

// Cells reached by rays fanned across fov_degrees around the heading,
// traversed exactly on the grid and stopped at the first Wall (which is
// itself reported). The agent's own cell is always included. Result is
// sorted row-major and duplicate-free. rays_per_degree controls the fan
// density; the default is converged for ranges up to ~16 cells.
std::vector<ObservedCell> observe(const MazeGrid& maze, Cell agent, Heading heading,
                                  double fov_degrees, double max_range,
                                  double rays_per_degree = 8.0);

// Write direct observations into the belief: confidence
// max(0.5, 1 - 0.05 * distance), timestamp = step. Direct observation is
// authoritative; an equally-fresh identical state never loses confidence.
void integrate_observation(BeliefMap& belief, std::span<const ObservedCell> obs, int step);

// Per-cell merge: known beats Unknown; then newer timestamp; then higher
// confidence; then Wall > Target > Free. Idempotent.
void fuse_belief(BeliefMap& mine, const BeliefMap& received);

// IoU between believed-free cells (Free or Target) and truly free cells.
double map_iou(const BeliefMap& belief, const MazeGrid& truth);

// explored_ratio = known cells / total; newly_explored lists known cells
// with timestamp >= since.
ExplorationStats exploration_stats(const BeliefMap& belief, int since = 0);

// Text serialization: '#' wall, '.' free, 'T' target, 'S' spawn.
std::string serialize_maze(const MazeGrid& maze);
MazeGrid parse_maze(const std::string& text);

}  // namespace hexplore::world
