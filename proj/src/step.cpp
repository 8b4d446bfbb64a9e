#include <cmath>
#include <vector>

#include "gridbench/perception.hpp"
#include "gridbench/world.hpp"

namespace gridbench {

// Door-swing keep-out: opening something with the body closer than this jams
// the door into the agent and the action fails. A ground-truth property of
// the world, distinct from the robot profile's standoff preference.
inline constexpr double kOpenClearance = 0.45;

namespace {

// Offsets whose center lies within `radius` of the origin center.
std::vector<Cell> disk_offsets(double radius) {
  const int r = static_cast<int>(radius / kCellSize) + 1;
  std::vector<Cell> out;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (within_radius(dx, dy, radius)) out.push_back(Cell{dx, dy});
  return out;
}

bool disk_hits_obstacle(const WorldGrid& world, const Cell& center,
                        const std::vector<Cell>& disk) {
  for (const auto& d : disk) {
    const Cell c{center.x + d.x, center.y + d.y};
    if (!world.in_bounds(c) || world.obstacle_at(c)) return true;
  }
  return false;
}

bool cell_occupied(const WorldGrid& world, const Cell& c) {
  for (const auto& o : world.objects)
    if (!o.held && world.object_cell(o) == c) return true;
  return false;
}

ObjectInstance* held_object(WorldGrid& world) {
  for (auto& o : world.objects)
    if (o.held) return &o;
  return nullptr;
}

// All objects resting at the landmark, carriers resolved.
std::vector<ObjectInstance*> contents_of(WorldGrid& world, int landmark_id) {
  std::vector<ObjectInstance*> out;
  for (auto& o : world.objects) {
    if (o.held) continue;
    const ObjectInstance* root = &o;
    for (int hops = 0; root->parent_object >= 0 && hops < 8; ++hops) {
      const ObjectInstance* p = world.object(root->parent_object);
      if (!p) break;
      root = p;
    }
    if (!root->held && root->at_landmark == landmark_id) out.push_back(&o);
  }
  return out;
}

Outcome apply_interaction(WorldGrid& world, const AgentPose& pose,
                          const Action& action,
                          const PhysicalConstraints& constraints,
                          const CategoryRegistry& reg) {
  if (action.target < 0) return Outcome::Failed;
  const Observation obs = observe(world, pose, constraints.sensor);
  const VisibleInstance* vi = nullptr;
  for (const auto& candidate : obs.instances)
    if (candidate.id == action.target) vi = &candidate;
  // Invisible or unknown ids are bad target selections; out of reach fails too.
  if (!vi) return Outcome::Failed;
  if (vi->horizontal_m > constraints.reach_distance + kDistanceEps)
    return Outcome::Failed;

  LandmarkInstance* lm = vi->is_landmark ? world.landmark(vi->id) : nullptr;
  ObjectInstance* obj = vi->is_landmark ? nullptr : world.object(vi->id);
  const Category& cat = reg.at(vi->category);

  switch (action.kind) {
    case ActionKind::PickupObject: {
      if (!obj || held_object(world)) return Outcome::Failed;
      obj->held = true;
      obj->at_landmark = -1;
      obj->hidden_in = -1;
      obj->parent_object = -1;
      return Outcome::Ok;
    }

    case ActionKind::PutObject: {
      ObjectInstance* carried = held_object(world);
      if (!carried || carried->id == action.target) return Outcome::Failed;
      if (lm) {
        if (!cat.is_receptacle) return Outcome::Failed;
        if (cat.openable && !lm->open) return Outcome::Failed;
        // Nearest free visible footprint cell; ties row-major via the
        // ordering established in the observation entry.
        const Cell* best = nullptr;
        double best_d = 1e18;
        for (const auto& c : vi->cells) {
          if (cell_occupied(world, c)) continue;
          const double dx = cell_center(c.x) - pose.x;
          const double dy = cell_center(c.y) - pose.y;
          const double d = dx * dx + dy * dy;
          if (d < best_d - kDistanceEps ||
              (std::abs(d - best_d) <= kDistanceEps && best &&
               row_major_less(c, *best))) {
            best_d = d;
            best = &c;
          }
        }
        if (!best) return Outcome::Failed;  // receptacle full
        carried->held = false;
        carried->cell = *best;
        carried->at_landmark = lm->id;
        carried->hidden_in = cat.openable ? lm->id : -1;
        carried->parent_object = -1;
        return Outcome::Ok;
      }
      // Placing onto a movable receptacle (stacking).
      if (!obj || !cat.movable_receptacle || obj->held) return Outcome::Failed;
      for (const auto& o : world.objects)
        if (o.parent_object == obj->id) return Outcome::Failed;  // occupied
      carried->held = false;
      carried->parent_object = obj->id;
      carried->cell = world.object_cell(*obj);
      carried->at_landmark = -1;
      carried->hidden_in = obj->hidden_in;
      return Outcome::Ok;
    }

    case ActionKind::OpenObject: {
      if (!lm || !cat.openable || lm->open) return Outcome::Failed;
      if (vi->horizontal_m < kOpenClearance - kDistanceEps)
        return Outcome::Failed;  // door sweeps into the body
      lm->open = true;
      return Outcome::Ok;
    }

    case ActionKind::CloseObject: {
      if (!lm || !cat.openable || !lm->open) return Outcome::Failed;
      lm->open = false;
      if (cat.cools_contents)
        for (auto* o : contents_of(world, lm->id)) o->cooled = true;
      return Outcome::Ok;
    }

    case ActionKind::ToggleObjectOn: {
      if (!cat.togglable) return Outcome::Failed;
      if (lm) {
        if (lm->toggled_on) return Outcome::Failed;
        lm->toggled_on = true;
        if (cat.heats_contents)
          for (auto* o : contents_of(world, lm->id)) o->heated = true;
        if (cat.cleans_contents)
          for (auto* o : contents_of(world, lm->id)) o->cleaned = true;
        return Outcome::Ok;
      }
      if (obj->toggled_on) return Outcome::Failed;
      obj->toggled_on = true;
      return Outcome::Ok;
    }

    case ActionKind::ToggleObjectOff: {
      if (!cat.togglable) return Outcome::Failed;
      if (lm) {
        if (!lm->toggled_on) return Outcome::Failed;
        lm->toggled_on = false;
        return Outcome::Ok;
      }
      if (!obj->toggled_on) return Outcome::Failed;
      obj->toggled_on = false;
      return Outcome::Ok;
    }

    case ActionKind::SliceObject: {
      if (!obj || !cat.sliceable || obj->sliced) return Outcome::Failed;
      const ObjectInstance* in_hand = held_object(world);
      if (!in_hand || !reg.at(in_hand->category).slicer) return Outcome::Failed;
      obj->sliced = true;
      return Outcome::Ok;
    }

    default:
      return Outcome::Failed;
  }
}

}  // namespace

Outcome step(WorldGrid& world, AgentPose& pose, EpisodeState& state,
             const Action& action, const PhysicalConstraints& constraints,
             const CategoryRegistry& reg, SubtaskPlan* plan) {
  if (state.terminal != Terminal::Running)
    throw UsageError("step() on a terminated episode");

  Outcome outcome = Outcome::Ok;

  switch (action.kind) {
    case ActionKind::RotateRight:
      pose.heading_deg = heading_right(pose.heading_deg);
      break;
    case ActionKind::RotateLeft:
      pose.heading_deg = heading_left(pose.heading_deg);
      break;
    case ActionKind::LookUp:
      if (pose.pitch_deg + kPitchStepDeg > kPitchMaxDeg)
        outcome = Outcome::Failed;
      else
        pose.pitch_deg += kPitchStepDeg;
      break;
    case ActionKind::LookDown:
      if (pose.pitch_deg - kPitchStepDeg < kPitchMinDeg)
        outcome = Outcome::Failed;
      else
        pose.pitch_deg -= kPitchStepDeg;
      break;
    case ActionKind::MoveAhead: {
      const std::vector<Cell> disk = disk_offsets(constraints.agent_radius);
      const Cell dir = heading_delta(pose.heading_deg);
      const Cell from = pose.cell();
      bool blocked = false;
      for (int i = 1; i <= kCellsPerMove && !blocked; ++i)
        if (disk_hits_obstacle(
                world, Cell{from.x + dir.x * i, from.y + dir.y * i}, disk))
          blocked = true;
      if (blocked)
        outcome = Outcome::Failed;  // collision
      else {
        pose.x += dir.x * kMoveStep;
        pose.y += dir.y * kMoveStep;
      }
      break;
    }
    default:
      outcome = apply_interaction(world, pose, action, constraints, reg);
      break;
  }

  ++state.steps;
  if (outcome == Outcome::Failed) ++state.failed_interactions;

  if (plan) {
    state.goal_flags = check_goal_conditions(world, *plan);
    bool all = !state.goal_flags.empty();
    for (bool f : state.goal_flags) all = all && f;
    if (all) {
      state.terminal = Terminal::Success;
      return outcome;
    }
  }
  if (state.failed_interactions >= kFailureLimit)
    state.terminal = Terminal::FailureLimit;
  else if (state.steps >= kStepLimit)
    state.terminal = Terminal::StepLimit;
  return outcome;
}

}  // namespace gridbench
