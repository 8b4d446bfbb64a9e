#include "gridbench/world.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

namespace gridbench {

const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::Running: return "running";
    case Terminal::Success: return "success";
    case Terminal::StepLimit: return "step_limit";
    case Terminal::FailureLimit: return "failure_limit";
  }
  return "?";
}

const LandmarkInstance* WorldGrid::landmark(int id) const {
  for (const auto& l : landmarks)
    if (l.id == id) return &l;
  return nullptr;
}

LandmarkInstance* WorldGrid::landmark(int id) {
  return const_cast<LandmarkInstance*>(
      static_cast<const WorldGrid*>(this)->landmark(id));
}

const ObjectInstance* WorldGrid::object(int id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

ObjectInstance* WorldGrid::object(int id) {
  return const_cast<ObjectInstance*>(
      static_cast<const WorldGrid*>(this)->object(id));
}

Cell WorldGrid::object_cell(const ObjectInstance& o) const {
  const ObjectInstance* cur = &o;
  for (int hops = 0; cur->parent_object >= 0 && hops < 8; ++hops) {
    const ObjectInstance* parent = object(cur->parent_object);
    if (!parent) break;
    cur = parent;
  }
  return cur->cell;
}

bool WorldGrid::concealed(const ObjectInstance& o) const {
  const ObjectInstance* cur = &o;
  for (int hops = 0; hops < 8; ++hops) {
    if (cur->hidden_in >= 0) {
      const LandmarkInstance* lm = landmark(cur->hidden_in);
      if (lm && !lm->open) return true;
    }
    if (cur->parent_object < 0) break;
    const ObjectInstance* p = object(cur->parent_object);
    if (!p) break;
    cur = p;
  }
  return false;
}

// ---- Generation -----------------------------------------------------------

namespace {

constexpr int kWallMargin = 9;  // keep a navigable ring along the walls

struct Rect {
  int x, y, w, h;
};

bool rects_closer_than(const Rect& a, const Rect& b, int gap) {
  return a.x < b.x + b.w + gap && b.x < a.x + a.w + gap &&
         a.y < b.y + b.h + gap && b.y < a.y + a.h + gap;
}

void fill_rect(WorldGrid& world, const Rect& r) {
  for (int y = r.y; y < r.y + r.h; ++y)
    for (int x = r.x; x < r.x + r.w; ++x)
      world.obstacle[static_cast<size_t>(y) * world.width + x] = 1;
}

// Footprint cells with at least one free 4-neighbor; objects resting there
// stay observable from the floor.
std::vector<Cell> exposed_cells(const WorldGrid& world,
                                const LandmarkInstance& lm) {
  std::vector<Cell> out;
  for (int y = lm.y; y < lm.y + lm.h; ++y) {
    for (int x = lm.x; x < lm.x + lm.w; ++x) {
      const Cell c{x, y};
      const Cell nbrs[4] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
      for (const Cell& n : nbrs) {
        if (world.in_bounds(n) && !world.obstacle_at(n)) {
          out.push_back(c);
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace

GenerationConfig GenerationConfig::builtin_default() {
  GenerationConfig c;
  c.landmarks = {{"CounterTop", 1}, {"DiningTable", 1}, {"Shelf", 1},
                 {"SinkBasin", 1},  {"Fridge", 1},      {"Microwave", 1},
                 {"Cabinet", 1},    {"Drawer", 1},      {"GarbageCan", 1},
                 {"FloorLamp", 1}};
  c.objects = {{"Mug", 2}, {"Book", 1}, {"Apple", 1}, {"Knife", 1},
               {"CreditCard", 1}, {"Bowl", 1}};
  return c;
}

WorldGrid generate_world(uint64_t seed, const GenerationConfig& config,
                         const CategoryRegistry& reg) {
  if (config.width < 40 || config.height < 40)
    throw GenerationError("room must be at least 40x40 cells (2 m x 2 m)");

  WorldGrid world;
  world.width = config.width;
  world.height = config.height;
  world.seed = seed;
  world.obstacle.assign(static_cast<size_t>(config.width) * config.height, 0);
  world.rules = config.rules.allowed.empty() ? reg.default_rules() : config.rules;
  if (!config.rules.allowed.empty() || config.rules.hide_probability > 0)
    world.rules.hide_probability = config.rules.hide_probability;

  Rng rng(derive_seed(seed, 0xA11CE));

  // Perimeter walls.
  world.barriers.push_back({0, 0, world.width, 1});
  world.barriers.push_back({0, world.height - 1, world.width, 1});
  world.barriers.push_back({0, 0, 1, world.height});
  world.barriers.push_back({world.width - 1, 0, 1, world.height});

  int region_min_y = 1;
  int region_max_y = world.height - 2;  // landmark region (whole room)
  int spawn_max_y = world.height - 2;

  if (config.split.enabled) {
    const int thickness = 2;
    const int by = world.height / 2 + rng.range(-4, 4);
    const int narrow = config.split.narrow_gap_cells;
    const int wide = config.split.wide_gap_cells;
    const bool wide_left = rng.chance(0.5);
    const int wide_x = wide_left ? 1 : world.width - 1 - wide;
    const int narrow_x = rng.range(world.width / 3,
                                   2 * world.width / 3 - narrow);
    // Barrier spans the room except the two gaps.
    int x = 1;
    auto emit = [&](int upto) {
      if (upto > x) world.barriers.push_back({x, by, upto - x, thickness});
      x = upto;
    };
    if (wide_left) {
      x = wide_x + wide;
      emit(x);  // no-op, keeps x consistent
      emit(narrow_x);
      x = narrow_x + narrow;
      emit(world.width - 1);
    } else {
      emit(narrow_x);
      x = narrow_x + narrow;
      emit(wide_x);
      x = wide_x + wide;
      emit(world.width - 1);
    }
    region_min_y = by + thickness + 2;
    spawn_max_y = by - 2;
  }

  for (const auto& b : world.barriers)
    fill_rect(world, {b.x, b.y, b.w, b.h});

  // Landmarks, in config order. Landmarks and objects share one id space so
  // an interaction target id is unambiguous.
  std::vector<Rect> placed;
  int next_id = 0;
  for (const auto& spec : config.landmarks) {
    const int cat = reg.id_of(spec.category);
    if (cat < 0 || !reg.at(cat).is_landmark)
      throw GenerationError("not a landmark category: " + spec.category);
    const Category& c = reg.at(cat);
    for (int i = 0; i < spec.count; ++i) {
      const int lo_x = kWallMargin;
      const int hi_x = world.width - kWallMargin - c.footprint_w;
      const int lo_y = std::max(kWallMargin, region_min_y);
      const int hi_y = std::min(world.height - kWallMargin - c.footprint_h,
                                region_max_y - c.footprint_h);
      if (hi_x < lo_x || hi_y < lo_y)
        throw GenerationError("landmark " + spec.category +
                              " does not fit the room with wall margins");
      bool done = false;
      for (int attempt = 0; attempt < 2000 && !done; ++attempt) {
        Rect r{rng.range(lo_x, hi_x), rng.range(lo_y, hi_y), c.footprint_w,
               c.footprint_h};
        bool clash = false;
        for (const auto& p : placed)
          if (rects_closer_than(r, p, config.separation_cells)) {
            clash = true;
            break;
          }
        for (const auto& b : world.barriers)
          if (!clash && rects_closer_than(r, {b.x, b.y, b.w, b.h}, kWallMargin))
            clash = true;
        if (clash) continue;
        LandmarkInstance lm;
        lm.id = next_id++;
        lm.category = cat;
        lm.x = r.x;
        lm.y = r.y;
        lm.w = r.w;
        lm.h = r.h;
        world.landmarks.push_back(lm);
        placed.push_back(r);
        fill_rect(world, r);
        done = true;
      }
      if (!done)
        throw GenerationError(
            "cannot place landmark " + spec.category +
            ": no position satisfies the separation constraint; reduce counts "
            "or separation_cells");
    }
  }

  // Objects, weighted over the allowed pairs whose landmark is present.
  for (const auto& spec : config.objects) {
    const int cat = reg.id_of(spec.category);
    if (cat < 0 || reg.at(cat).is_landmark)
      throw GenerationError("not an object category: " + spec.category);
    const auto rules = world.rules.rules_for(spec.category);
    for (int i = 0; i < spec.count; ++i) {
      std::vector<const PlacementRule*> viable;
      double total = 0;
      for (const auto* r : rules) {
        bool present = false;
        for (const auto& lm : world.landmarks)
          if (reg.at(lm.category).name == r->landmark) present = true;
        if (present && r->weight > 0) {
          viable.push_back(r);
          total += r->weight;
        }
      }
      if (viable.empty())
        throw GenerationError("object " + spec.category +
                              " has no allowed landmark present in the room");
      const double pick = rng.unit() * total;
      double acc = 0;
      const PlacementRule* rule = viable.back();
      for (const auto* r : viable) {
        acc += r->weight;
        if (pick < acc) {
          rule = r;
          break;
        }
      }
      std::vector<const LandmarkInstance*> instances;
      for (const auto& lm : world.landmarks)
        if (reg.at(lm.category).name == rule->landmark)
          instances.push_back(&lm);
      const LandmarkInstance* lm =
          instances[rng.below(instances.size())];

      auto cells = exposed_cells(world, *lm);
      std::erase_if(cells, [&](const Cell& c) {
        for (const auto& o : world.objects)
          if (o.cell == c) return true;
        return false;
      });
      if (cells.empty())
        throw GenerationError("landmark " + rule->landmark +
                              " is full; cannot place " + spec.category);
      ObjectInstance obj;
      obj.id = next_id++;
      obj.category = cat;
      obj.cell = cells[rng.below(cells.size())];
      obj.at_landmark = lm->id;
      if (reg.at(lm->category).openable &&
          rng.chance(world.rules.hide_probability))
        obj.hidden_in = lm->id;
      world.objects.push_back(obj);
    }
  }

  // Agent spawn: a free cell whose whole body disk is clear.
  const double body = 0.20;
  bool spawned = false;
  for (int attempt = 0; attempt < 2000 && !spawned; ++attempt) {
    const Cell c{rng.range(kWallMargin, world.width - 1 - kWallMargin),
                 rng.range(std::max(kWallMargin, 1),
                           std::min(spawn_max_y, world.height - 1 - kWallMargin))};
    bool clear = true;
    const int reach_cells = static_cast<int>(body / kCellSize) + 1;
    for (int dy = -reach_cells; dy <= reach_cells && clear; ++dy)
      for (int dx = -reach_cells; dx <= reach_cells && clear; ++dx)
        if (within_radius(dx, dy, body) &&
            world.obstacle_at(Cell{c.x + dx, c.y + dy}))
          clear = false;
    if (!clear) continue;
    world.spawn.x = cell_center(c.x);
    world.spawn.y = cell_center(c.y);
    world.spawn.heading_deg = 90 * rng.range(0, 3);
    world.spawn.pitch_deg = 0;
    spawned = true;
  }
  if (!spawned)
    throw GenerationError("no collision-free spawn cell found; room too full");

  return world;
}

// ---- Goal conditions -------------------------------------------------------

namespace {

// Landmark the object effectively rests at, following carriers.
int resolved_landmark(const WorldGrid& w, const ObjectInstance& o) {
  const ObjectInstance* cur = &o;
  for (int hops = 0; cur->parent_object >= 0 && hops < 8; ++hops) {
    const ObjectInstance* p = w.object(cur->parent_object);
    if (!p) break;
    cur = p;
  }
  return cur->held ? -1 : cur->at_landmark;
}

int count_on(const WorldGrid& w, int obj_cat, int lm_cat) {
  int n = 0;
  for (const auto& o : w.objects) {
    if (o.category != obj_cat || o.held) continue;
    const int lm_id = resolved_landmark(w, o);
    if (lm_id < 0) continue;
    const LandmarkInstance* lm = w.landmark(lm_id);
    if (lm && lm->category == lm_cat) ++n;
  }
  return n;
}

}  // namespace

std::vector<bool> check_goal_conditions(const WorldGrid& world,
                                        const SubtaskPlan& plan) {
  std::vector<bool> flags;
  flags.reserve(plan.goals.size());
  for (const auto& g : plan.goals) {
    bool ok = false;
    switch (g.kind) {
      case GoalKind::On:
        ok = count_on(world, g.object_category, g.at_category) >= 1;
        break;
      case GoalKind::OnCount:
        ok = count_on(world, g.object_category, g.at_category) >= g.count;
        break;
      case GoalKind::OnObject:
        for (const auto& o : world.objects) {
          if (o.category != g.object_category || o.parent_object < 0) continue;
          const ObjectInstance* p = world.object(o.parent_object);
          if (p && p->category == g.at_category) ok = true;
        }
        break;
      case GoalKind::Held:
        for (const auto& o : world.objects)
          if (o.category == g.object_category && o.held) ok = true;
        break;
      case GoalKind::ToggledOn:
        for (const auto& l : world.landmarks)
          if (l.category == g.object_category && l.toggled_on) ok = true;
        for (const auto& o : world.objects)
          if (o.category == g.object_category && o.toggled_on) ok = true;
        break;
      case GoalKind::Cleaned:
        for (const auto& o : world.objects)
          if (o.category == g.object_category && o.cleaned) ok = true;
        break;
      case GoalKind::Heated:
        for (const auto& o : world.objects)
          if (o.category == g.object_category && o.heated) ok = true;
        break;
      case GoalKind::Cooled:
        for (const auto& o : world.objects)
          if (o.category == g.object_category && o.cooled) ok = true;
        break;
      case GoalKind::Sliced:
        for (const auto& o : world.objects)
          if (o.category == g.object_category && o.sliced) ok = true;
        break;
    }
    flags.push_back(ok);
  }
  return flags;
}

// ---- Config and world serialization ----------------------------------------

GenerationConfig GenerationConfig::from_json(const nlohmann::json& j) {
  GenerationConfig c;
  c.width = j.value("width", 120);
  c.height = j.value("height", 120);
  for (const auto& l : j.value("landmarks", nlohmann::json::array()))
    c.landmarks.push_back(
        {l.at("category").get<std::string>(), l.value("count", 1)});
  for (const auto& o : j.value("objects", nlohmann::json::array()))
    c.objects.push_back(
        {o.at("category").get<std::string>(), o.value("count", 1)});
  if (j.contains("rules")) {
    const auto& jr = j["rules"];
    for (const auto& a : jr.value("allowed", nlohmann::json::array()))
      c.rules.allowed.push_back({a.at("target").get<std::string>(),
                                 a.at("landmark").get<std::string>(),
                                 a.value("weight", 1.0)});
    c.rules.hide_probability = jr.value("hide_probability", 0.0);
  }
  c.separation_cells = j.value("separation_cells", 12);
  if (j.contains("split")) {
    c.split.enabled = j["split"].value("enabled", true);
    c.split.narrow_gap_cells = j["split"].value("narrow_gap_cells", 7);
    c.split.wide_gap_cells = j["split"].value("wide_gap_cells", 12);
  }
  return c;
}

nlohmann::json GenerationConfig::to_json() const {
  nlohmann::json j;
  j["width"] = width;
  j["height"] = height;
  auto lms = nlohmann::json::array();
  for (const auto& l : landmarks)
    lms.push_back({{"category", l.category}, {"count", l.count}});
  j["landmarks"] = std::move(lms);
  auto objs = nlohmann::json::array();
  for (const auto& o : objects)
    objs.push_back({{"category", o.category}, {"count", o.count}});
  j["objects"] = std::move(objs);
  auto allowed = nlohmann::json::array();
  for (const auto& r : rules.allowed)
    allowed.push_back(
        {{"target", r.target}, {"landmark", r.landmark}, {"weight", r.weight}});
  j["rules"] = {{"allowed", std::move(allowed)},
                {"hide_probability", rules.hide_probability}};
  j["separation_cells"] = separation_cells;
  if (split.enabled)
    j["split"] = {{"enabled", true},
                  {"narrow_gap_cells", split.narrow_gap_cells},
                  {"wide_gap_cells", split.wide_gap_cells}};
  return j;
}

nlohmann::json world_to_json(const WorldGrid& world,
                             const CategoryRegistry& reg) {
  nlohmann::json j;
  j["format"] = "gridbench-world";
  j["version"] = 1;
  j["width"] = world.width;
  j["height"] = world.height;
  j["cell_size"] = kCellSize;
  j["seed"] = world.seed;
  j["agent"] = {{"x", world.spawn.x},
                {"y", world.spawn.y},
                {"heading", world.spawn.heading_deg},
                {"pitch", world.spawn.pitch_deg}};
  auto lms = nlohmann::json::array();
  for (const auto& l : world.landmarks) {
    nlohmann::json jl;
    jl["id"] = l.id;
    jl["category"] = reg.at(l.category).name;
    jl["rect"] = {l.x, l.y, l.w, l.h};
    if (l.open) jl["open"] = true;
    if (l.toggled_on) jl["toggled_on"] = true;
    lms.push_back(std::move(jl));
  }
  j["landmarks"] = std::move(lms);
  auto objs = nlohmann::json::array();
  for (const auto& o : world.objects) {
    nlohmann::json jo;
    jo["id"] = o.id;
    jo["category"] = reg.at(o.category).name;
    jo["cell"] = {o.cell.x, o.cell.y};
    jo["at_landmark"] = o.at_landmark;
    if (o.hidden_in >= 0) jo["hidden_in"] = o.hidden_in;
    if (o.parent_object >= 0) jo["parent_object"] = o.parent_object;
    if (o.held) jo["held"] = true;
    if (o.toggled_on) jo["toggled_on"] = true;
    if (o.sliced) jo["sliced"] = true;
    if (o.cleaned) jo["cleaned"] = true;
    if (o.heated) jo["heated"] = true;
    if (o.cooled) jo["cooled"] = true;
    objs.push_back(std::move(jo));
  }
  j["objects"] = std::move(objs);
  auto bars = nlohmann::json::array();
  for (const auto& b : world.barriers) bars.push_back({b.x, b.y, b.w, b.h});
  j["barriers"] = std::move(bars);
  auto allowed = nlohmann::json::array();
  for (const auto& r : world.rules.allowed)
    allowed.push_back(
        {{"target", r.target}, {"landmark", r.landmark}, {"weight", r.weight}});
  j["rules"] = {{"allowed", std::move(allowed)},
                {"hide_probability", world.rules.hide_probability}};
  return j;
}

WorldGrid world_from_json(const nlohmann::json& j, const CategoryRegistry& reg) {
  if (j.value("format", std::string()) != "gridbench-world")
    throw GenerationError("not a gridbench world file");
  if (j.value("version", 0) != 1)
    throw GenerationError("unsupported world file version");
  WorldGrid w;
  w.width = j.at("width").get<int>();
  w.height = j.at("height").get<int>();
  w.seed = j.value("seed", 0ULL);
  w.obstacle.assign(static_cast<size_t>(w.width) * w.height, 0);
  w.spawn.x = j.at("agent").at("x").get<double>();
  w.spawn.y = j.at("agent").at("y").get<double>();
  w.spawn.heading_deg = j.at("agent").value("heading", 0);
  w.spawn.pitch_deg = j.at("agent").value("pitch", 0);
  for (const auto& jl : j.value("landmarks", nlohmann::json::array())) {
    LandmarkInstance l;
    l.id = jl.at("id").get<int>();
    l.category = reg.require(jl.at("category").get<std::string>());
    l.x = jl.at("rect").at(0).get<int>();
    l.y = jl.at("rect").at(1).get<int>();
    l.w = jl.at("rect").at(2).get<int>();
    l.h = jl.at("rect").at(3).get<int>();
    l.open = jl.value("open", false);
    l.toggled_on = jl.value("toggled_on", false);
    w.landmarks.push_back(l);
    fill_rect(w, {l.x, l.y, l.w, l.h});
  }
  for (const auto& jo : j.value("objects", nlohmann::json::array())) {
    ObjectInstance o;
    o.id = jo.at("id").get<int>();
    o.category = reg.require(jo.at("category").get<std::string>());
    o.cell = Cell{jo.at("cell").at(0).get<int>(), jo.at("cell").at(1).get<int>()};
    o.at_landmark = jo.value("at_landmark", -1);
    o.hidden_in = jo.value("hidden_in", -1);
    o.parent_object = jo.value("parent_object", -1);
    o.held = jo.value("held", false);
    o.toggled_on = jo.value("toggled_on", false);
    o.sliced = jo.value("sliced", false);
    o.cleaned = jo.value("cleaned", false);
    o.heated = jo.value("heated", false);
    o.cooled = jo.value("cooled", false);
    w.objects.push_back(o);
  }
  for (const auto& jb : j.value("barriers", nlohmann::json::array())) {
    Barrier b{jb.at(0).get<int>(), jb.at(1).get<int>(), jb.at(2).get<int>(),
              jb.at(3).get<int>()};
    w.barriers.push_back(b);
    fill_rect(w, {b.x, b.y, b.w, b.h});
  }
  if (j.contains("rules")) {
    for (const auto& a : j["rules"].value("allowed", nlohmann::json::array()))
      w.rules.allowed.push_back({a.at("target").get<std::string>(),
                                 a.at("landmark").get<std::string>(),
                                 a.value("weight", 1.0)});
    w.rules.hide_probability = j["rules"].value("hide_probability", 0.0);
  }
  return w;
}

void save_world(const WorldGrid& world, const CategoryRegistry& reg,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GenerationError("cannot open for writing: " + path);
  out << world_to_json(world, reg).dump(2) << "\n";
}

WorldGrid load_world(const std::string& path, const CategoryRegistry& reg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GenerationError("cannot open world file: " + path);
  nlohmann::json j;
  in >> j;
  return world_from_json(j, reg);
}

}  // namespace gridbench
