#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gridbench {

struct Category {
  std::string name;            // registry key, e.g. "Mug"
  bool is_landmark = false;    // large immobile instance with a footprint
  bool is_receptacle = false;  // landmark that can host objects
  bool openable = false;
  bool togglable = false;
  bool sliceable = false;
  bool slicer = false;
  bool movable_receptacle = false;  // small object that can carry one item

  // Prompt vocabulary.
  std::string phrase;       // natural-language name, e.g. "credit card"
  std::string article;      // "a" / "an" / "the"
  std::string preposition;  // "in" / "on" (receptacles only)

  // World geometry (landmarks only).
  int footprint_w = 1;
  int footprint_h = 1;
  double surface_height = 0.0;  // meters above floor where objects rest

  // Interaction side effects.
  bool heats_contents = false;   // ToggleOn cooks whatever sits here
  bool cools_contents = false;   // Close chills whatever sits inside
  bool cleans_contents = false;  // ToggleOn rinses whatever sits here
};

struct PlacementRule {
  std::string target;
  std::string landmark;
  double weight = 1.0;
};

// The allowed target x landmark pairs (the set G) plus the chance that a
// placement at an openable landmark hides the object inside it.
struct PlacementRules {
  std::vector<PlacementRule> allowed;
  double hide_probability = 0.0;

  bool is_allowed(const std::string& target, const std::string& landmark) const;
  std::vector<const PlacementRule*> rules_for(const std::string& target) const;
};

class RegistryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Category table. Index order defines the semantic-map channel layout:
// channel i holds category i, and one extra channel holds obstacles.
class CategoryRegistry {
 public:
  static CategoryRegistry builtin_default();
  static CategoryRegistry from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int add(Category c);  // returns the new id

  int count() const { return static_cast<int>(categories_.size()); }
  const Category& at(int id) const;
  const std::vector<Category>& all() const { return categories_; }

  int id_of(const std::string& name) const;       // -1 when absent
  int require(const std::string& name) const;     // throws RegistryError

  std::vector<int> object_ids() const;
  std::vector<int> landmark_ids() const;
  std::vector<int> receptacle_ids() const;
  std::vector<int> hideable_ids() const;  // openable receptacles (the set H)

  // True when a word names a registered category or its prompt phrase;
  // used to keep environment objects out of prompt context samples.
  bool knows_word(const std::string& word) const;

  const PlacementRules& default_rules() const { return default_rules_; }

 private:
  std::vector<Category> categories_;
  PlacementRules default_rules_;
};

}  // namespace gridbench
