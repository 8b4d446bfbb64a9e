#pragma once

#include <map>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace gridbench {

enum class ActionKind {
  RotateRight,
  RotateLeft,
  MoveAhead,
  LookUp,
  LookDown,
  PickupObject,
  PutObject,
  OpenObject,
  CloseObject,
  ToggleObjectOn,
  ToggleObjectOff,
  SliceObject,
};

bool is_interaction(ActionKind k);
const char* to_string(ActionKind k);
ActionKind action_from_string(const std::string& s);  // throws on unknown

struct SensorConfig {
  double fov_deg = 90.0;    // horizontal field of view
  double max_range = 5.0;   // meters
};

// The robot profile: everything the controller knows about the body it
// drives. Swapping this file retargets the whole stack to another robot.
struct PhysicalConstraints {
  double camera_height = 1.6;   // meters above the floor
  double reach_distance = 1.5;  // manipulator reach from agent center
  double agent_radius = 0.20;   // cylinder model of the body
  std::map<ActionKind, double> interaction_offsets;  // min standoff per action
  SensorConfig sensor;

  double offset_for(ActionKind k) const {
    auto it = interaction_offsets.find(k);
    return it == interaction_offsets.end() ? 0.0 : it->second;
  }

  static PhysicalConstraints builtin_default();
  static PhysicalConstraints from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

}  // namespace gridbench
