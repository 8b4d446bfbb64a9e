#include "gridbench/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

namespace gridbench {

namespace {

std::vector<Cell> disk_offsets(double radius) {
  const int r = static_cast<int>(radius / kCellSize) + 1;
  std::vector<Cell> out;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (within_radius(dx, dy, radius)) out.push_back(Cell{dx, dy});
  return out;
}

void stamp(InflatedGrid& g, const Cell& obstacle,
           const std::vector<Cell>& disk) {
  for (const auto& d : disk) {
    const int x = obstacle.x + d.x;
    const int y = obstacle.y + d.y;
    if (x >= 0 && x < g.width && y >= 0 && y < g.height)
      g.blocked[static_cast<size_t>(y) * g.width + x] = 1;
  }
}

constexpr Cell kDirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

int heading_of(const Cell& d) {
  if (d.x == 1) return 0;
  if (d.x == -1) return 180;
  if (d.y == 1) return 90;
  return 270;
}

void push_rotations(std::vector<Action>& actions, int& heading, int to) {
  const int delta = normalize_heading(to - heading);
  if (delta == 90) {
    actions.push_back({ActionKind::RotateLeft});
  } else if (delta == 270) {
    actions.push_back({ActionKind::RotateRight});
  } else if (delta == 180) {
    actions.push_back({ActionKind::RotateRight});
    actions.push_back({ActionKind::RotateRight});
  }
  heading = to;
}

}  // namespace

InflatedGrid inflate_mask(const std::vector<uint8_t>& obstacle, int width,
                          int height, double radius) {
  InflatedGrid g;
  g.width = width;
  g.height = height;
  g.radius = radius;
  g.blocked.assign(static_cast<size_t>(width) * height, 0);
  const auto disk = disk_offsets(radius);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (obstacle[static_cast<size_t>(y) * width + x])
        stamp(g, Cell{x, y}, disk);
  return g;
}

InflatedGrid inflate(const SemanticMap& map, double radius) {
  InflatedGrid g;
  g.width = map.width;
  g.height = map.height;
  g.radius = radius;
  g.blocked.assign(static_cast<size_t>(map.width) * map.height, 0);
  const auto disk = disk_offsets(radius);
  for (uint32_t idx : map.obstacle_log)
    stamp(g, Cell{static_cast<int>(idx % map.width),
                  static_cast<int>(idx / map.width)},
          disk);
  g.consumed_obstacles = map.obstacle_log.size();
  g.source_version = map.version;
  return g;
}

void inflate_update(InflatedGrid& g, const SemanticMap& map) {
  const auto disk = disk_offsets(g.radius);
  for (size_t i = g.consumed_obstacles; i < map.obstacle_log.size(); ++i) {
    const uint32_t idx = map.obstacle_log[i];
    stamp(g, Cell{static_cast<int>(idx % map.width),
                  static_cast<int>(idx / map.width)},
          disk);
  }
  g.consumed_obstacles = map.obstacle_log.size();
  g.source_version = map.version;
}

namespace {

// Straight-run compression; succeeds only when every run is a whole number
// of 0.25 m strides.
bool compress_to_actions(const std::vector<Cell>& waypoints,
                         std::vector<Action>* actions) {
  actions->clear();
  if (waypoints.size() < 2) return true;
  size_t i = 0;
  int heading = heading_of(Cell{waypoints[1].x - waypoints[0].x,
                                waypoints[1].y - waypoints[0].y});
  int current = heading;
  std::vector<Action> out;
  while (i + 1 < waypoints.size()) {
    const Cell d{waypoints[i + 1].x - waypoints[i].x,
                 waypoints[i + 1].y - waypoints[i].y};
    const int h = heading_of(d);
    size_t run = 1;
    while (i + run + 1 < waypoints.size()) {
      const Cell d2{waypoints[i + run + 1].x - waypoints[i + run].x,
                    waypoints[i + run + 1].y - waypoints[i + run].y};
      if (heading_of(d2) != h) break;
      ++run;
    }
    if (run % kCellsPerMove != 0) return false;
    push_rotations(out, current, h);
    for (size_t k = 0; k < run / kCellsPerMove; ++k)
      out.push_back({ActionKind::MoveAhead});
    i += run;
  }
  *actions = std::move(out);
  return true;
}

Cell nearest_reachable(const std::vector<int>& dist, const InflatedGrid& g,
                       const Cell& goal) {
  Cell best{};
  double best_d = 1e18;
  bool found = false;
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      if (dist[static_cast<size_t>(y) * g.width + x] < 0) continue;
      const Cell c{x, y};
      const double d = cell_distance_m(c, goal);
      if (!found || d < best_d - kDistanceEps) {
        best = c;
        best_d = d;
        found = true;
      }
    }
  }
  return best;  // row-major scan order breaks ties
}

}  // namespace

PathPlan shortest_path(const InflatedGrid& grid, Cell start, Cell goal) {
  if (grid.is_blocked(start))
    throw NavigationError(
        "shortest_path: start cell is blocked (agent inside the inflated "
        "zone signals a mapping inconsistency)");

  const int w = grid.width, h = grid.height;
  const size_t n = static_cast<size_t>(w) * h;
  std::vector<int> g_cost(n, -1);
  std::vector<int32_t> parent(n, -1);

  auto idx_of = [w](const Cell& c) {
    return static_cast<size_t>(c.y) * w + c.x;
  };
  auto heuristic = [&goal](const Cell& c) {
    return std::abs(c.x - goal.x) + std::abs(c.y - goal.y);
  };

  // (f, -g, index): prefer lower f, then deeper g, then row-major index.
  using Entry = std::tuple<int, int, uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  g_cost[idx_of(start)] = 0;
  open.emplace(heuristic(start), 0, static_cast<uint32_t>(idx_of(start)));
  const bool goal_open = !grid.is_blocked(goal);
  bool reached = false;
  while (!open.empty()) {
    const auto [f, neg_g, idx] = open.top();
    open.pop();
    const Cell c{static_cast<int>(idx % w), static_cast<int>(idx / w)};
    if (g_cost[idx] != -neg_g) continue;  // stale entry
    if (goal_open && c == goal) {
      reached = true;
      break;
    }
    for (const auto& d : kDirs) {
      const Cell nb{c.x + d.x, c.y + d.y};
      if (grid.is_blocked(nb)) continue;
      const size_t ni = idx_of(nb);
      const int ng = g_cost[idx] + 1;
      if (g_cost[ni] >= 0 && g_cost[ni] <= ng) continue;
      g_cost[ni] = ng;
      parent[ni] = static_cast<int32_t>(idx);
      open.emplace(ng + heuristic(nb), -ng, static_cast<uint32_t>(ni));
    }
  }

  PathPlan plan;
  Cell target = goal;
  if (!goal_open || !reached) {
    // The search has flooded everything reachable by now; fall back to the
    // reachable cell nearest the goal.
    target = nearest_reachable(g_cost, grid, goal);
    plan.goal_reached = false;
  }

  std::vector<Cell> rev;
  for (int32_t i = static_cast<int32_t>(idx_of(target)); i >= 0;
       i = parent[static_cast<size_t>(i)])
    rev.push_back(Cell{i % w, i / w});
  plan.waypoints.assign(rev.rbegin(), rev.rend());
  plan.length_m = (plan.waypoints.size() - 1) * kCellSize;
  plan.end = target;
  plan.actions_exact = compress_to_actions(plan.waypoints, &plan.actions);
  if (!plan.actions_exact) plan.actions.clear();
  return plan;
}

PathPlan route_plan(const InflatedGrid& grid, Cell start, Cell goal,
                    int heading_deg) {
  const int w = grid.width, h = grid.height;
  const size_t n = static_cast<size_t>(w) * h;
  std::vector<int> dist(n, -1);
  std::vector<int32_t> parent(n, -1);
  auto idx_of = [w](const Cell& c) {
    return static_cast<size_t>(c.y) * w + c.x;
  };

  // BFS over the stride lattice anchored at the start cell. A start inside
  // the inflated zone (an obstacle just appeared next to the agent) may take
  // one escape hop to any clear node.
  const bool escaping = grid.is_blocked(start);
  std::deque<uint32_t> queue;
  dist[idx_of(start)] = 0;
  queue.push_back(static_cast<uint32_t>(idx_of(start)));
  while (!queue.empty()) {
    const uint32_t idx = queue.front();
    queue.pop_front();
    const Cell c{static_cast<int>(idx % w), static_cast<int>(idx / w)};
    const bool first_hop = escaping && c == start;
    for (const auto& d : kDirs) {
      const Cell hop{c.x + d.x * kCellsPerMove, c.y + d.y * kCellsPerMove};
      if (hop.x < 0 || hop.x >= w || hop.y < 0 || hop.y >= h) continue;
      if (dist[idx_of(hop)] >= 0) continue;
      bool clear = true;
      if (first_hop) {
        clear = !grid.is_blocked(hop);
      } else {
        for (int i = 1; i <= kCellsPerMove && clear; ++i)
          if (grid.is_blocked(Cell{c.x + d.x * i, c.y + d.y * i}))
            clear = false;
      }
      if (!clear) continue;
      dist[idx_of(hop)] = dist[idx_of(c)] + 1;
      parent[idx_of(hop)] = static_cast<int32_t>(idx);
      queue.push_back(static_cast<uint32_t>(idx_of(hop)));
    }
  }

  // Land on the reachable lattice node nearest the goal.
  Cell target = start;
  double best_d = cell_distance_m(start, goal);
  for (int y = start.y % kCellsPerMove; y < h; y += kCellsPerMove) {
    for (int x = start.x % kCellsPerMove; x < w; x += kCellsPerMove) {
      if (dist[static_cast<size_t>(y) * w + x] < 0) continue;
      const Cell c{x, y};
      const double d = cell_distance_m(c, goal);
      if (d < best_d - kDistanceEps) {
        best_d = d;
        target = c;
      }
    }
  }

  PathPlan plan;
  plan.goal_reached = target == goal;
  plan.end = target;
  std::vector<Cell> nodes;
  for (int32_t i = static_cast<int32_t>(idx_of(target)); i >= 0;
       i = parent[static_cast<size_t>(i)])
    nodes.push_back(Cell{i % w, i / w});
  std::reverse(nodes.begin(), nodes.end());

  plan.waypoints.push_back(start);
  for (size_t k = 1; k < nodes.size(); ++k) {
    const Cell step{(nodes[k].x - nodes[k - 1].x) / kCellsPerMove,
                    (nodes[k].y - nodes[k - 1].y) / kCellsPerMove};
    for (int i = 1; i <= kCellsPerMove; ++i)
      plan.waypoints.push_back(
          Cell{nodes[k - 1].x + step.x * i, nodes[k - 1].y + step.y * i});
  }
  plan.length_m = (plan.waypoints.size() - 1) * kCellSize;
  plan.actions = actions_for(plan.waypoints, heading_deg);
  plan.actions_exact = true;
  return plan;
}

std::vector<Action> actions_for(const std::vector<Cell>& waypoints,
                                int heading_deg) {
  std::vector<Action> out;
  int heading = heading_deg;
  for (size_t i = 0; i + kCellsPerMove < waypoints.size();
       i += kCellsPerMove) {
    const Cell d{(waypoints[i + kCellsPerMove].x - waypoints[i].x) /
                     kCellsPerMove,
                 (waypoints[i + kCellsPerMove].y - waypoints[i].y) /
                     kCellsPerMove};
    push_rotations(out, heading, heading_of(d));
    out.push_back({ActionKind::MoveAhead});
  }
  return out;
}

}  // namespace gridbench
