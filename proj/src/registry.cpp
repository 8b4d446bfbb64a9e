#include "gridbench/registry.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

namespace gridbench {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

Category landmark(std::string name, std::string phrase, std::string prep,
                  int w, int h, double surface) {
  Category c;
  c.name = std::move(name);
  c.is_landmark = true;
  c.is_receptacle = true;
  c.phrase = std::move(phrase);
  c.article = "the";
  c.preposition = std::move(prep);
  c.footprint_w = w;
  c.footprint_h = h;
  c.surface_height = surface;
  return c;
}

Category object(std::string name, std::string phrase, std::string article) {
  Category c;
  c.name = std::move(name);
  c.phrase = std::move(phrase);
  c.article = std::move(article);
  return c;
}

}  // namespace

bool PlacementRules::is_allowed(const std::string& target,
                                const std::string& lm) const {
  for (const auto& r : allowed)
    if (r.target == target && r.landmark == lm) return true;
  return false;
}

std::vector<const PlacementRule*> PlacementRules::rules_for(
    const std::string& target) const {
  std::vector<const PlacementRule*> out;
  for (const auto& r : allowed)
    if (r.target == target) out.push_back(&r);
  return out;
}

int CategoryRegistry::add(Category c) {
  if (id_of(c.name) >= 0)
    throw RegistryError("duplicate category: " + c.name);
  categories_.push_back(std::move(c));
  return count() - 1;
}

const Category& CategoryRegistry::at(int id) const {
  if (id < 0 || id >= count())
    throw RegistryError("category id out of range: " + std::to_string(id));
  return categories_[static_cast<size_t>(id)];
}

int CategoryRegistry::id_of(const std::string& name) const {
  for (int i = 0; i < count(); ++i)
    if (categories_[static_cast<size_t>(i)].name == name) return i;
  return -1;
}

int CategoryRegistry::require(const std::string& name) const {
  const int id = id_of(name);
  if (id < 0) throw RegistryError("unknown category: " + name);
  return id;
}

std::vector<int> CategoryRegistry::object_ids() const {
  std::vector<int> out;
  for (int i = 0; i < count(); ++i)
    if (!categories_[static_cast<size_t>(i)].is_landmark) out.push_back(i);
  return out;
}

std::vector<int> CategoryRegistry::landmark_ids() const {
  std::vector<int> out;
  for (int i = 0; i < count(); ++i)
    if (categories_[static_cast<size_t>(i)].is_landmark) out.push_back(i);
  return out;
}

std::vector<int> CategoryRegistry::receptacle_ids() const {
  std::vector<int> out;
  for (int i = 0; i < count(); ++i)
    if (categories_[static_cast<size_t>(i)].is_receptacle) out.push_back(i);
  return out;
}

std::vector<int> CategoryRegistry::hideable_ids() const {
  std::vector<int> out;
  for (int i = 0; i < count(); ++i) {
    const auto& c = categories_[static_cast<size_t>(i)];
    if (c.is_receptacle && c.openable) out.push_back(i);
  }
  return out;
}

bool CategoryRegistry::knows_word(const std::string& word) const {
  const std::string w = lower(word);
  for (const auto& c : categories_)
    if (lower(c.name) == w || lower(c.phrase) == w) return true;
  return false;
}

CategoryRegistry CategoryRegistry::builtin_default() {
  CategoryRegistry reg;

  // Receptacle landmarks. Footprints are in cells (5 cm each).
  reg.add(landmark("CounterTop", "counter top", "on", 24, 10, 0.90));
  reg.add(landmark("DiningTable", "dining table", "on", 20, 14, 0.75));
  reg.add(landmark("Desk", "desk", "on", 20, 10, 0.75));
  reg.add(landmark("Shelf", "shelf", "on", 16, 6, 0.50));
  reg.add(landmark("SideTable", "side table", "on", 8, 8, 0.60));
  reg.add(landmark("Dresser", "dresser", "on", 14, 8, 0.80));
  {
    auto c = landmark("SinkBasin", "sink", "in", 10, 8, 0.85);
    c.togglable = true;  // faucet
    c.cleans_contents = true;
    reg.add(c);
  }
  reg.add(landmark("GarbageCan", "garbage can", "in", 6, 6, 0.20));
  {
    auto c = landmark("Fridge", "fridge", "in", 12, 12, 0.90);
    c.openable = true;
    c.cools_contents = true;
    reg.add(c);
  }
  {
    auto c = landmark("Microwave", "microwave", "in", 8, 8, 0.90);
    c.openable = true;
    c.togglable = true;
    c.heats_contents = true;
    reg.add(c);
  }
  {
    auto c = landmark("Cabinet", "cabinet", "in", 12, 8, 0.50);
    c.openable = true;
    reg.add(c);
  }
  {
    auto c = landmark("Drawer", "drawer", "in", 8, 6, 0.50);
    c.openable = true;
    reg.add(c);
  }
  {
    auto c = landmark("Safe", "safe", "in", 8, 8, 0.30);
    c.openable = true;
    reg.add(c);
  }
  {
    auto c = landmark("Box", "box", "in", 8, 8, 0.20);
    c.openable = true;
    reg.add(c);
  }
  {
    // Large immobile but not a receptacle: nothing is placed on it and it
    // does not appear in collocation landmark columns.
    auto c = landmark("FloorLamp", "floor lamp", "near", 4, 4, 1.30);
    c.is_receptacle = false;
    c.togglable = true;
    reg.add(c);
  }

  // Small objects.
  reg.add(object("Mug", "mug", "a"));
  reg.add(object("Book", "book", "a"));
  {
    auto c = object("Apple", "apple", "an");
    c.sliceable = true;
    reg.add(c);
  }
  {
    auto c = object("Tomato", "tomato", "a");
    c.sliceable = true;
    reg.add(c);
  }
  {
    auto c = object("Knife", "knife", "a");
    c.slicer = true;
    reg.add(c);
  }
  reg.add(object("Fork", "fork", "a"));
  reg.add(object("CreditCard", "credit card", "a"));
  reg.add(object("KeyChain", "key chain", "a"));
  reg.add(object("SaltShaker", "salt shaker", "a"));
  reg.add(object("Pen", "pen", "a"));
  {
    auto c = object("Bowl", "bowl", "a");
    c.movable_receptacle = true;
    reg.add(c);
  }
  {
    auto c = object("Pan", "pan", "a");
    c.movable_receptacle = true;
    reg.add(c);
  }

  auto allow = [&reg](const std::string& lm,
                      std::initializer_list<const char*> targets, double w = 1.0) {
    for (const char* t : targets)
      reg.default_rules_.allowed.push_back(PlacementRule{t, lm, w});
  };

  allow("CounterTop", {"Mug", "Book", "Apple", "Tomato", "Knife", "Fork",
                       "CreditCard", "KeyChain", "SaltShaker", "Pen", "Bowl",
                       "Pan"}, 2.0);
  allow("DiningTable", {"Mug", "Book", "Apple", "Tomato", "Fork", "SaltShaker",
                        "Pen", "Bowl", "Pan", "Knife"});
  allow("Desk", {"Book", "Pen", "CreditCard", "KeyChain", "Mug", "SaltShaker",
                 "Fork", "Bowl"});
  allow("Shelf", {"Book", "Mug", "Bowl", "Pen", "SaltShaker", "KeyChain"});
  allow("SideTable", {"Mug", "Book", "Pen", "KeyChain", "CreditCard",
                      "SaltShaker"});
  allow("Dresser", {"Book", "Pen", "KeyChain", "CreditCard", "SaltShaker"});
  allow("SinkBasin", {"Mug", "Bowl", "Fork", "Knife", "Apple", "Tomato"});
  allow("GarbageCan", {"Apple", "Tomato", "SaltShaker"});
  allow("Fridge", {"Apple", "Tomato", "Bowl", "Mug", "Pan"});
  allow("Microwave", {"Mug", "Bowl", "Apple"});
  allow("Cabinet", {"Mug", "Bowl", "Pan", "Book", "SaltShaker", "Fork"});
  allow("Drawer", {"Knife", "Fork", "Pen", "CreditCard", "KeyChain"});
  allow("Safe", {"CreditCard", "KeyChain"});
  allow("Box", {"Book", "Pen", "KeyChain", "CreditCard"});
  reg.default_rules_.hide_probability = 0.25;

  return reg;
}

CategoryRegistry CategoryRegistry::from_json(const nlohmann::json& j) {
  CategoryRegistry reg;
  if (!j.contains("categories") || !j["categories"].is_array())
    throw RegistryError("registry json: missing categories array");
  for (const auto& jc : j["categories"]) {
    Category c;
    c.name = jc.at("name").get<std::string>();
    const std::string kind = jc.value("kind", std::string("object"));
    c.is_landmark = kind == "landmark";
    c.is_receptacle = jc.value("receptacle", c.is_landmark);
    if (!c.is_landmark) c.is_receptacle = false;
    c.openable = jc.value("openable", false);
    c.togglable = jc.value("togglable", false);
    c.sliceable = jc.value("sliceable", false);
    c.slicer = jc.value("slicer", false);
    c.movable_receptacle = jc.value("movable_receptacle", false);
    c.phrase = jc.value("phrase", c.name);
    c.article = jc.value("article", std::string(c.is_landmark ? "the" : "a"));
    c.preposition = jc.value("preposition", std::string("on"));
    if (jc.contains("footprint")) {
      c.footprint_w = jc["footprint"].at(0).get<int>();
      c.footprint_h = jc["footprint"].at(1).get<int>();
    }
    c.surface_height = jc.value("surface_height", 0.0);
    for (const auto& e : jc.value("effects", nlohmann::json::array())) {
      const std::string s = e.get<std::string>();
      if (s == "heats") c.heats_contents = true;
      else if (s == "cools") c.cools_contents = true;
      else if (s == "cleans") c.cleans_contents = true;
      else throw RegistryError("registry json: unknown effect " + s);
    }
    reg.add(std::move(c));
  }
  if (j.contains("placement_rules")) {
    const auto& jr = j["placement_rules"];
    for (const auto& ja : jr.value("allowed", nlohmann::json::array())) {
      PlacementRule r;
      r.target = ja.at("target").get<std::string>();
      r.landmark = ja.at("landmark").get<std::string>();
      r.weight = ja.value("weight", 1.0);
      if (reg.id_of(r.target) < 0 || reg.id_of(r.landmark) < 0)
        throw RegistryError("placement rule references unknown category: " +
                            r.target + " / " + r.landmark);
      reg.default_rules_.allowed.push_back(std::move(r));
    }
    reg.default_rules_.hide_probability = jr.value("hide_probability", 0.0);
  }
  return reg;
}

nlohmann::json CategoryRegistry::to_json() const {
  nlohmann::json j;
  j["format"] = "gridbench-registry";
  j["version"] = 1;
  auto cats = nlohmann::json::array();
  for (const auto& c : categories_) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["kind"] = c.is_landmark ? "landmark" : "object";
    if (c.is_landmark) {
      jc["receptacle"] = c.is_receptacle;
      jc["footprint"] = {c.footprint_w, c.footprint_h};
      jc["surface_height"] = c.surface_height;
      jc["preposition"] = c.preposition;
    }
    if (c.openable) jc["openable"] = true;
    if (c.togglable) jc["togglable"] = true;
    if (c.sliceable) jc["sliceable"] = true;
    if (c.slicer) jc["slicer"] = true;
    if (c.movable_receptacle) jc["movable_receptacle"] = true;
    jc["phrase"] = c.phrase;
    jc["article"] = c.article;
    auto effects = nlohmann::json::array();
    if (c.heats_contents) effects.push_back("heats");
    if (c.cools_contents) effects.push_back("cools");
    if (c.cleans_contents) effects.push_back("cleans");
    if (!effects.empty()) jc["effects"] = effects;
    cats.push_back(std::move(jc));
  }
  j["categories"] = std::move(cats);
  auto allowed = nlohmann::json::array();
  for (const auto& r : default_rules_.allowed) {
    allowed.push_back(
        {{"target", r.target}, {"landmark", r.landmark}, {"weight", r.weight}});
  }
  j["placement_rules"] = {{"allowed", std::move(allowed)},
                          {"hide_probability", default_rules_.hide_probability}};
  return j;
}

}  // namespace gridbench
