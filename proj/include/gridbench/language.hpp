#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gridbench/constraints.hpp"
#include "gridbench/registry.hpp"

namespace gridbench {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structured task input: a registered task type plus slot bindings.
struct TaskSpec {
  std::string task_type;
  std::map<std::string, std::string> slots;  // slot name -> category name

  static TaskSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

enum class GoalKind {
  On,         // an instance of `object` rests at a landmark of `at`
  OnCount,    // at least `count` such instances
  OnObject,   // an instance of `object` rides on an object of `at`
  Held,       // an instance of `object` is in the gripper
  ToggledOn,  // an instance of `object` (landmark) is switched on
  Cleaned,
  Heated,
  Cooled,
  Sliced,
};

struct GoalCondition {
  GoalKind kind;
  int object_category = -1;
  int at_category = -1;  // On / OnCount / OnObject only
  int count = 1;
};

struct SubtaskPair {
  int object_category = -1;
  ActionKind action = ActionKind::PickupObject;
  bool completed = false;
};

// Expansion result: the ordered object-action pairs the agent works through,
// plus the task-level goal conditions that score the episode.
struct SubtaskPlan {
  std::string task_type;
  std::vector<SubtaskPair> pairs;
  std::vector<GoalCondition> goals;
};

// Index of the first incomplete pair; nullopt when the plan is done.
std::optional<size_t> current_subtask(const SubtaskPlan& plan);

// Data-driven task templates. The built-in seven mirror the usual household
// benchmark taxonomy; editing the JSON file adds task types without code
// changes.
class TemplateRegistry {
 public:
  static TemplateRegistry builtin_default();
  static TemplateRegistry from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  SubtaskPlan expand(const TaskSpec& spec, const CategoryRegistry& reg) const;
  std::vector<std::string> task_types() const;

 private:
  struct PairTemplate {
    std::string slot_or_category;
    ActionKind action;
  };
  struct GoalTemplate {
    std::string kind;
    std::string object;  // slot or category name
    std::string at;
    int count = 1;
  };
  struct Template {
    std::vector<std::string> slots;
    std::vector<PairTemplate> pairs;
    std::vector<GoalTemplate> goals;
  };
  std::map<std::string, Template> templates_;
};

}  // namespace gridbench
