#pragma once

#include <stdexcept>
#include <vector>

#include "gridbench/geometry.hpp"
#include "gridbench/perception.hpp"
#include "gridbench/world.hpp"

namespace gridbench {

class NavigationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Obstacle mask dilated by a disk: blocked(x) iff some obstacle cell center
// lies within `radius` of x's center. Radius 0 is the identity.
struct InflatedGrid {
  int width = 0;
  int height = 0;
  double radius = 0;
  std::vector<uint8_t> blocked;
  uint64_t source_version = 0;
  size_t consumed_obstacles = 0;  // cursor into the map's obstacle log

  bool is_blocked(const Cell& c) const {
    if (c.x < 0 || c.x >= width || c.y < 0 || c.y >= height) return true;
    return blocked[static_cast<size_t>(c.y) * width + c.x] != 0;
  }
};

InflatedGrid inflate(const SemanticMap& map, double radius);
InflatedGrid inflate_mask(const std::vector<uint8_t>& obstacle, int width,
                          int height, double radius);

// Folds obstacle cells the map discovered since the last call into the grid.
// Obstacle marks only ever grow during an episode; a retraction forces a
// rebuild on the caller's side.
void inflate_update(InflatedGrid& grid, const SemanticMap& map);

struct PathPlan {
  std::vector<Cell> waypoints;  // 4-connected, start inclusive
  std::vector<Action> actions;  // rotations + MoveAhead repetitions
  double length_m = 0;          // waypoint count minus one, in meters
  bool goal_reached = true;     // false when rerouted to nearest reachable
  bool actions_exact = false;   // actions replay the waypoints exactly
  Cell end{};
};

// Optimal 4-connected path on the cell grid (A*; ties resolved
// deterministically). A blocked or unreachable goal is replaced by the
// nearest reachable unblocked cell (Euclidean, row-major tie-break).
// Throws NavigationError when the start cell is blocked.
// Actions are attached only when the path happens to decompose into whole
// 0.25 m strides (actions_exact); execution otherwise uses route_plan().
PathPlan shortest_path(const InflatedGrid& grid, Cell start, Cell goal);

// Executable variant: plans on the 0.25 m stride lattice anchored at `start`
// (one hop = five cells, all swept cells must be clear), so the emitted
// action sequence always replays to the waypoint list exactly.
PathPlan route_plan(const InflatedGrid& grid, Cell start, Cell goal,
                    int heading_deg);

// Action sequence that drives along `waypoints` from `heading_deg`;
// waypoints must be stride-aligned (route_plan output).
std::vector<Action> actions_for(const std::vector<Cell>& waypoints,
                                int heading_deg);

}  // namespace gridbench
