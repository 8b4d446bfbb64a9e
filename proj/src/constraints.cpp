#include "gridbench/constraints.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gridbench {

bool is_interaction(ActionKind k) {
  switch (k) {
    case ActionKind::PickupObject:
    case ActionKind::PutObject:
    case ActionKind::OpenObject:
    case ActionKind::CloseObject:
    case ActionKind::ToggleObjectOn:
    case ActionKind::ToggleObjectOff:
    case ActionKind::SliceObject:
      return true;
    default:
      return false;
  }
}

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::RotateRight: return "RotateRight";
    case ActionKind::RotateLeft: return "RotateLeft";
    case ActionKind::MoveAhead: return "MoveAhead";
    case ActionKind::LookUp: return "LookUp";
    case ActionKind::LookDown: return "LookDown";
    case ActionKind::PickupObject: return "PickupObject";
    case ActionKind::PutObject: return "PutObject";
    case ActionKind::OpenObject: return "OpenObject";
    case ActionKind::CloseObject: return "CloseObject";
    case ActionKind::ToggleObjectOn: return "ToggleObjectOn";
    case ActionKind::ToggleObjectOff: return "ToggleObjectOff";
    case ActionKind::SliceObject: return "SliceObject";
  }
  return "?";
}

ActionKind action_from_string(const std::string& s) {
  static const ActionKind all[] = {
      ActionKind::RotateRight,    ActionKind::RotateLeft,
      ActionKind::MoveAhead,      ActionKind::LookUp,
      ActionKind::LookDown,       ActionKind::PickupObject,
      ActionKind::PutObject,      ActionKind::OpenObject,
      ActionKind::CloseObject,    ActionKind::ToggleObjectOn,
      ActionKind::ToggleObjectOff, ActionKind::SliceObject,
  };
  for (ActionKind k : all)
    if (s == to_string(k)) return k;
  throw std::runtime_error("unknown action kind: " + s);
}

PhysicalConstraints PhysicalConstraints::builtin_default() {
  PhysicalConstraints c;
  c.interaction_offsets[ActionKind::OpenObject] = 0.5;
  return c;
}

PhysicalConstraints PhysicalConstraints::from_json(const nlohmann::json& j) {
  PhysicalConstraints c;
  c.camera_height = j.value("camera_height", 1.6);
  c.reach_distance = j.value("reach_distance", 1.5);
  c.agent_radius = j.value("agent_radius", 0.20);
  if (c.camera_height <= 0 || c.reach_distance <= 0 || c.agent_radius <= 0)
    throw std::runtime_error("robot profile: dimensions must be positive");
  if (j.contains("interaction_offsets")) {
    for (auto it = j["interaction_offsets"].begin();
         it != j["interaction_offsets"].end(); ++it) {
      const double d = it.value().get<double>();
      if (d < 0 || d > c.reach_distance)
        throw std::runtime_error(
            "robot profile: interaction offset must be in [0, reach]");
      c.interaction_offsets[action_from_string(it.key())] = d;
    }
  } else {
    c.interaction_offsets[ActionKind::OpenObject] = 0.5;
  }
  if (j.contains("sensor")) {
    c.sensor.fov_deg = j["sensor"].value("fov_deg", 90.0);
    c.sensor.max_range = j["sensor"].value("max_range", 5.0);
  }
  return c;
}

nlohmann::json PhysicalConstraints::to_json() const {
  nlohmann::json j;
  j["camera_height"] = camera_height;
  j["reach_distance"] = reach_distance;
  j["agent_radius"] = agent_radius;
  nlohmann::json offs = nlohmann::json::object();
  for (const auto& [k, v] : interaction_offsets) offs[to_string(k)] = v;
  j["interaction_offsets"] = std::move(offs);
  j["sensor"] = {{"fov_deg", sensor.fov_deg}, {"max_range", sensor.max_range}};
  return j;
}

}  // namespace gridbench
