#include "gridbench/controller.hpp"

#include <cmath>

namespace gridbench {

PlannerChoice select_planner(const Observation& obs, const SemanticMap& map,
                             int target_category) {
  PlannerChoice choice;
  if (const VisibleInstance* vi = obs.nearest_of(target_category)) {
    choice.kind = PlannerKind::LocalAdjustment;
    choice.target_instance = vi->id;
    return choice;
  }
  Cell goal;
  if (map.nearest_mark(target_category, obs.pose.x, obs.pose.y, &goal)) {
    choice.kind = PlannerKind::MapLookup;
    choice.goal = goal;
    return choice;
  }
  choice.kind = PlannerKind::SemanticSearch;
  return choice;
}

double relative_position(const VisibleInstance& vi, const AgentPose& pose,
                         const PhysicalConstraints&, bool corrected) {
  if (!corrected) return vi.depth_m;
  return vi.depth_m * std::cos(deg_to_rad(pose.pitch_deg));
}

int desired_pitch_deg(const VisibleInstance& vi, const AgentPose& pose,
                      const PhysicalConstraints& constraints,
                      double target_height_m, bool corrected) {
  const double horizontal = relative_position(vi, pose, constraints, corrected);
  const double drop = constraints.camera_height - target_height_m;
  const double angle =
      std::atan2(drop, std::max(horizontal, 0.05)) * 180.0 / M_PI;
  int steps = static_cast<int>(std::lround(angle / kPitchStepDeg));
  steps = std::max(kPitchMinDeg / kPitchStepDeg,
                   std::min(kPitchMaxDeg / kPitchStepDeg, steps));
  return -steps * kPitchStepDeg;  // looking down is negative pitch
}

LocalAdjustResult local_adjust(const VisibleInstance& vi, const AgentPose& pose,
                               const PhysicalConstraints& constraints,
                               ActionKind action, bool corrected,
                               int map_width, int map_height) {
  LocalAdjustResult res;
  const double dist = relative_position(vi, pose, constraints, corrected);
  const double standoff = constraints.offset_for(action);
  if (dist <= constraints.reach_distance + kDistanceEps &&
      dist >= standoff - kDistanceEps) {
    res.ready = true;
    return res;
  }

  // Standoff ring around the target's reference cell: any cell whose center
  // sits in [standoff, reach]. Pick the one nearest the agent; row-major on
  // ties. Reachability is the navigator's problem.
  const Cell t = vi.cell;
  const int r_cells = static_cast<int>(constraints.reach_distance / kCellSize) + 1;
  Cell best{};
  double best_d = 1e18;
  bool found = false;
  for (int dy = -r_cells; dy <= r_cells; ++dy) {
    for (int dx = -r_cells; dx <= r_cells; ++dx) {
      const Cell c{t.x + dx, t.y + dy};
      if (c.x < 0 || c.x >= map_width || c.y < 0 || c.y >= map_height) continue;
      const double d_target = cell_distance_m(c, t);
      if (d_target > constraints.reach_distance + kDistanceEps ||
          d_target < standoff - kDistanceEps)
        continue;
      const double ax = cell_center(c.x) - pose.x;
      const double ay = cell_center(c.y) - pose.y;
      const double d_agent = ax * ax + ay * ay;
      if (!found || d_agent < best_d - kDistanceEps ||
          (std::abs(d_agent - best_d) <= kDistanceEps &&
           row_major_less(c, best))) {
        best = c;
        best_d = d_agent;
        found = true;
      }
    }
  }
  res.ready = false;
  res.goal = found ? best : t;
  return res;
}

}  // namespace gridbench
