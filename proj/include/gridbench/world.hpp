#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gridbench/constraints.hpp"
#include "gridbench/geometry.hpp"
#include "gridbench/language.hpp"
#include "gridbench/registry.hpp"

namespace gridbench {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Action {
  ActionKind kind = ActionKind::MoveAhead;
  int target = -1;  // instance id; interactions only

  friend bool operator==(const Action&, const Action&) = default;
};

struct AgentPose {
  double x = 0.0;  // meters; always a cell center
  double y = 0.0;
  int heading_deg = 0;  // 0, 90, 180, 270
  int pitch_deg = 0;    // [-60, 60] in 15-degree steps

  Cell cell() const { return cell_of(x, y); }
};

struct LandmarkInstance {
  int id = -1;
  int category = -1;
  int x = 0, y = 0, w = 1, h = 1;  // footprint rect, cells
  bool open = false;
  bool toggled_on = false;

  bool contains(const Cell& c) const {
    return c.x >= x && c.x < x + w && c.y >= y && c.y < y + h;
  }
  Cell center() const { return Cell{x + w / 2, y + h / 2}; }
};

struct ObjectInstance {
  int id = -1;
  int category = -1;
  Cell cell{};
  int at_landmark = -1;    // landmark instance id it rests at
  int hidden_in = -1;      // landmark instance id concealing it
  int parent_object = -1;  // movable-receptacle carrier
  bool held = false;
  bool toggled_on = false;
  bool sliced = false;
  bool cleaned = false;
  bool heated = false;
  bool cooled = false;
};

// Plain obstacle blocks: interior walls and collision-trap barriers.
struct Barrier {
  int x = 0, y = 0, w = 1, h = 1;
};

enum class Terminal { Running, Success, StepLimit, FailureLimit };

const char* to_string(Terminal t);

struct EpisodeState {
  int steps = 0;
  int failed_interactions = 0;
  std::vector<bool> goal_flags;
  Terminal terminal = Terminal::Running;
};

struct WorldGrid {
  int width = 0;
  int height = 0;
  uint64_t seed = 0;
  std::vector<uint8_t> obstacle;  // row-major width*height
  std::vector<LandmarkInstance> landmarks;
  std::vector<ObjectInstance> objects;
  std::vector<Barrier> barriers;
  PlacementRules rules;
  AgentPose spawn;

  bool in_bounds(const Cell& c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  bool obstacle_at(const Cell& c) const {
    return in_bounds(c) && obstacle[static_cast<size_t>(c.y) * width + c.x] != 0;
  }
  size_t index(const Cell& c) const {
    return static_cast<size_t>(c.y) * width + c.x;
  }

  const LandmarkInstance* landmark(int id) const;
  LandmarkInstance* landmark(int id);
  const ObjectInstance* object(int id) const;
  ObjectInstance* object(int id);

  // Effective resting cell, following movable-receptacle carriers.
  Cell object_cell(const ObjectInstance& o) const;
  // True while the object sits inside a closed openable landmark.
  bool concealed(const ObjectInstance& o) const;
};

// ---- Procedural generation ----------------------------------------------

struct LandmarkSpec {
  std::string category;
  int count = 1;
};

struct ObjectSpec {
  std::string category;
  int count = 1;
};

// Optional trap layout: a wall across the room with a narrow gap (passable
// only if the planner under-inflates) and a wide detour gap. The agent
// spawns on one side, landmarks land on the other.
struct SplitLayout {
  bool enabled = false;
  int narrow_gap_cells = 7;
  int wide_gap_cells = 12;
};

struct GenerationConfig {
  int width = 120;
  int height = 120;
  std::vector<LandmarkSpec> landmarks;
  std::vector<ObjectSpec> objects;
  PlacementRules rules;  // empty allowed-list -> registry defaults
  int separation_cells = 12;
  SplitLayout split;

  static GenerationConfig builtin_default();
  static GenerationConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Deterministic for fixed (seed, config). Throws GenerationError naming the
// violated constraint when the config cannot be realized.
WorldGrid generate_world(uint64_t seed, const GenerationConfig& config,
                         const CategoryRegistry& reg);

// ---- Episode dynamics -----------------------------------------------------

enum class Outcome { Ok, Failed };

// Applies one action. Navigation failures (collisions, pitch-limit looks) and
// interaction failures all count toward the failed-interaction budget. When a
// plan is supplied, goal flags are refreshed and success is detected.
// Throws UsageError when the episode is no longer running.
Outcome step(WorldGrid& world, AgentPose& pose, EpisodeState& state,
             const Action& action, const PhysicalConstraints& constraints,
             const CategoryRegistry& reg, SubtaskPlan* plan = nullptr);

// Evaluates the plan's goal conditions against the current world.
std::vector<bool> check_goal_conditions(const WorldGrid& world,
                                        const SubtaskPlan& plan);

// ---- Serialization --------------------------------------------------------

nlohmann::json world_to_json(const WorldGrid& world, const CategoryRegistry& reg);
WorldGrid world_from_json(const nlohmann::json& j, const CategoryRegistry& reg);
void save_world(const WorldGrid& world, const CategoryRegistry& reg,
                const std::string& path);
WorldGrid load_world(const std::string& path, const CategoryRegistry& reg);

}  // namespace gridbench
