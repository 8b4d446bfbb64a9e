#include "gridbench/language.hpp"

#include <nlohmann/json.hpp>

namespace gridbench {

TaskSpec TaskSpec::from_json(const nlohmann::json& j) {
  TaskSpec s;
  s.task_type = j.at("task_type").get<std::string>();
  if (j.contains("slots"))
    for (auto it = j["slots"].begin(); it != j["slots"].end(); ++it)
      s.slots[it.key()] = it.value().get<std::string>();
  return s;
}

nlohmann::json TaskSpec::to_json() const {
  nlohmann::json j;
  j["task_type"] = task_type;
  j["slots"] = nlohmann::json::object();
  for (const auto& [k, v] : slots) j["slots"][k] = v;
  return j;
}

std::optional<size_t> current_subtask(const SubtaskPlan& plan) {
  for (size_t i = 0; i < plan.pairs.size(); ++i)
    if (!plan.pairs[i].completed) return i;
  return std::nullopt;
}

std::vector<std::string> TemplateRegistry::task_types() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : templates_) out.push_back(k);
  return out;
}

SubtaskPlan TemplateRegistry::expand(const TaskSpec& spec,
                                     const CategoryRegistry& reg) const {
  auto it = templates_.find(spec.task_type);
  if (it == templates_.end())
    throw TemplateError("unknown task type: " + spec.task_type);
  const Template& t = it->second;

  for (const auto& slot : t.slots)
    if (!spec.slots.count(slot))
      throw TemplateError("task " + spec.task_type + ": unbound slot " + slot);

  // Slots substitute verbatim; anything else must be a registered category.
  auto resolve = [&](const std::string& name) -> int {
    auto sit = spec.slots.find(name);
    const std::string& cat = sit == spec.slots.end() ? name : sit->second;
    const int id = reg.id_of(cat);
    if (id < 0)
      throw TemplateError("task " + spec.task_type +
                          ": unknown category " + cat);
    return id;
  };

  SubtaskPlan plan;
  plan.task_type = spec.task_type;
  for (const auto& p : t.pairs)
    plan.pairs.push_back(SubtaskPair{resolve(p.slot_or_category), p.action});
  for (const auto& g : t.goals) {
    GoalCondition c{};
    c.object_category = resolve(g.object);
    c.count = g.count;
    if (g.kind == "on") c.kind = GoalKind::On;
    else if (g.kind == "on_count") c.kind = GoalKind::OnCount;
    else if (g.kind == "on_object") c.kind = GoalKind::OnObject;
    else if (g.kind == "held") c.kind = GoalKind::Held;
    else if (g.kind == "toggled_on") c.kind = GoalKind::ToggledOn;
    else if (g.kind == "cleaned") c.kind = GoalKind::Cleaned;
    else if (g.kind == "heated") c.kind = GoalKind::Heated;
    else if (g.kind == "cooled") c.kind = GoalKind::Cooled;
    else if (g.kind == "sliced") c.kind = GoalKind::Sliced;
    else throw TemplateError("template goal kind unknown: " + g.kind);
    if (c.kind == GoalKind::On || c.kind == GoalKind::OnCount ||
        c.kind == GoalKind::OnObject)
      c.at_category = resolve(g.at);
    plan.goals.push_back(c);
  }
  if (plan.pairs.empty())
    throw TemplateError("task " + spec.task_type + ": empty pair list");
  return plan;
}

TemplateRegistry TemplateRegistry::builtin_default() {
  // Only examine-in-light has a published pair list; the other six are
  // reconstructions of the usual benchmark taxonomy and live in data form so
  // they can be corrected without touching code.
  const char* text = R"JSON(
{
  "templates": {
    "pick_and_place_simple": {
      "slots": ["Obj1", "Recep"],
      "pairs": [["Obj1", "PickupObject"], ["Recep", "PutObject"]],
      "goals": [{"kind": "on", "object": "Obj1", "at": "Recep"}]
    },
    "pick_two_obj_and_place": {
      "slots": ["Obj1", "Recep"],
      "pairs": [["Obj1", "PickupObject"], ["Recep", "PutObject"],
                ["Obj1", "PickupObject"], ["Recep", "PutObject"]],
      "goals": [{"kind": "on_count", "object": "Obj1", "at": "Recep", "count": 1},
                {"kind": "on_count", "object": "Obj1", "at": "Recep", "count": 2}]
    },
    "pick_and_place_with_movable_recep": {
      "slots": ["Obj1", "Obj2", "Recep"],
      "pairs": [["Obj1", "PickupObject"], ["Obj2", "PutObject"],
                ["Obj2", "PickupObject"], ["Recep", "PutObject"]],
      "goals": [{"kind": "on_object", "object": "Obj1", "at": "Obj2"},
                {"kind": "on", "object": "Obj2", "at": "Recep"}]
    },
    "pick_clean_then_place": {
      "slots": ["Obj1", "Recep"],
      "pairs": [["Obj1", "PickupObject"], ["SinkBasin", "PutObject"],
                ["SinkBasin", "ToggleObjectOn"], ["SinkBasin", "ToggleObjectOff"],
                ["Obj1", "PickupObject"], ["Recep", "PutObject"]],
      "goals": [{"kind": "cleaned", "object": "Obj1"},
                {"kind": "on", "object": "Obj1", "at": "Recep"}]
    },
    "pick_heat_then_place": {
      "slots": ["Obj1", "Recep"],
      "pairs": [["Obj1", "PickupObject"], ["Microwave", "OpenObject"],
                ["Microwave", "PutObject"], ["Microwave", "CloseObject"],
                ["Microwave", "ToggleObjectOn"], ["Microwave", "ToggleObjectOff"],
                ["Microwave", "OpenObject"], ["Obj1", "PickupObject"],
                ["Microwave", "CloseObject"], ["Recep", "PutObject"]],
      "goals": [{"kind": "heated", "object": "Obj1"},
                {"kind": "on", "object": "Obj1", "at": "Recep"}]
    },
    "pick_cool_then_place": {
      "slots": ["Obj1", "Recep"],
      "pairs": [["Obj1", "PickupObject"], ["Fridge", "OpenObject"],
                ["Fridge", "PutObject"], ["Fridge", "CloseObject"],
                ["Fridge", "OpenObject"], ["Obj1", "PickupObject"],
                ["Fridge", "CloseObject"], ["Recep", "PutObject"]],
      "goals": [{"kind": "cooled", "object": "Obj1"},
                {"kind": "on", "object": "Obj1", "at": "Recep"}]
    },
    "look_at_obj_in_light": {
      "slots": ["Obj1"],
      "pairs": [["Obj1", "PickupObject"], ["FloorLamp", "ToggleObjectOn"]],
      "goals": [{"kind": "held", "object": "Obj1"},
                {"kind": "toggled_on", "object": "FloorLamp"}]
    }
  }
}
)JSON";
  return from_json(nlohmann::json::parse(text));
}

TemplateRegistry TemplateRegistry::from_json(const nlohmann::json& j) {
  TemplateRegistry reg;
  if (!j.contains("templates") || !j["templates"].is_object())
    throw TemplateError("template json: missing templates object");
  for (auto it = j["templates"].begin(); it != j["templates"].end(); ++it) {
    Template t;
    const auto& jt = it.value();
    for (const auto& s : jt.value("slots", nlohmann::json::array()))
      t.slots.push_back(s.get<std::string>());
    for (const auto& p : jt.at("pairs")) {
      PairTemplate pt;
      pt.slot_or_category = p.at(0).get<std::string>();
      pt.action = action_from_string(p.at(1).get<std::string>());
      if (!is_interaction(pt.action))
        throw TemplateError("template " + it.key() +
                            ": pair actions must be interactions");
      t.pairs.push_back(std::move(pt));
    }
    for (const auto& g : jt.value("goals", nlohmann::json::array())) {
      GoalTemplate gt;
      gt.kind = g.at("kind").get<std::string>();
      gt.object = g.at("object").get<std::string>();
      gt.at = g.value("at", std::string());
      gt.count = g.value("count", 1);
      t.goals.push_back(std::move(gt));
    }
    if (t.goals.empty())
      throw TemplateError("template " + it.key() + ": no goal conditions");
    reg.templates_[it.key()] = std::move(t);
  }
  return reg;
}

nlohmann::json TemplateRegistry::to_json() const {
  nlohmann::json out;
  out["templates"] = nlohmann::json::object();
  for (const auto& [name, t] : templates_) {
    nlohmann::json jt;
    jt["slots"] = t.slots;
    auto pairs = nlohmann::json::array();
    for (const auto& p : t.pairs)
      pairs.push_back({p.slot_or_category, to_string(p.action)});
    jt["pairs"] = std::move(pairs);
    auto goals = nlohmann::json::array();
    for (const auto& g : t.goals) {
      nlohmann::json jg;
      jg["kind"] = g.kind;
      jg["object"] = g.object;
      if (!g.at.empty()) jg["at"] = g.at;
      if (g.count != 1) jg["count"] = g.count;
      goals.push_back(std::move(jg));
    }
    jt["goals"] = std::move(goals);
    out["templates"][name] = std::move(jt);
  }
  return out;
}

}  // namespace gridbench
