#pragma once

#include "gridbench/constraints.hpp"
#include "gridbench/geometry.hpp"
#include "gridbench/perception.hpp"

namespace gridbench {

enum class PlannerKind { LocalAdjustment, MapLookup, SemanticSearch };

struct PlannerChoice {
  PlannerKind kind = PlannerKind::SemanticSearch;
  Cell goal{};              // MapLookup only; search goals come from the prior
  int target_instance = -1;  // LocalAdjustment: chosen visible instance id
};

// Deterministic three-way selection: the local-adjustment module whenever the
// target category is in sight, otherwise a map lookup whenever its channel
// has evidence (goal = nearest marked cell), otherwise semantic search.
PlannerChoice select_planner(const Observation& obs, const SemanticMap& map,
                             int target_category);

// Horizontal target distance from the sensed depth. Corrected mode projects
// the pitched camera ray onto the floor; uncorrected mode takes the raw depth
// reading at face value (the classic mistake the ablation measures).
double relative_position(const VisibleInstance& vi, const AgentPose& pose,
                         const PhysicalConstraints& constraints, bool corrected);

// Camera pitch (quantized to the 15-degree ladder) that centers the target:
// aim from camera height down to the surface the target rests on.
int desired_pitch_deg(const VisibleInstance& vi, const AgentPose& pose,
                      const PhysicalConstraints& constraints,
                      double target_height_m, bool corrected);

struct LocalAdjustResult {
  bool ready = false;
  Cell goal{};  // standoff cell to reposition to when not ready
};

// Ready iff the estimated distance is within reach and at least the action's
// standoff; otherwise emits the standoff-ring cell nearest the agent.
LocalAdjustResult local_adjust(const VisibleInstance& vi, const AgentPose& pose,
                               const PhysicalConstraints& constraints,
                               ActionKind action, bool corrected,
                               int map_width, int map_height);

}  // namespace gridbench
