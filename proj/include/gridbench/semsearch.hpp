#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gridbench/geometry.hpp"
#include "gridbench/perception.hpp"
#include "gridbench/registry.hpp"
#include "gridbench/world.hpp"

namespace gridbench {

class SemSearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collocation probability p(target | landmark) for every registered target
// category against every receptacle landmark, with provider provenance.
// Rows are max-normalized into [0, 1].
struct CollocationMatrix {
  std::vector<std::string> targets;    // every category name
  std::vector<std::string> landmarks;  // receptacle category names
  std::vector<double> values;          // targets x landmarks
  std::string provenance;              // "uniform" | "empirical" | "llm"

  double at(size_t t, size_t l) const { return values[t * landmarks.size() + l]; }
  double& at(size_t t, size_t l) { return values[t * landmarks.size() + l]; }
  int target_index(const std::string& name) const;
  int landmark_index(const std::string& name) const;

  static CollocationMatrix from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static CollocationMatrix load(const std::string& path);
  void save(const std::string& path) const;
};

CollocationMatrix uniform_matrix(const CategoryRegistry& reg);

// Counting provider: placements of each target at each landmark category over
// a world corpus, add-one smoothed, rows max-normalized. Stands in for a
// model trained on environment data.
CollocationMatrix empirical_provider(std::span<const WorldGrid> corpus,
                                     const CategoryRegistry& reg);

// ---- Score files (external language-model runs) ----------------------------

struct ScoreRecord {
  std::string target;
  std::string landmark;
  int run_index = 0;
  uint64_t seed = 0;
  double score = 0;
};

std::vector<ScoreRecord> read_score_file(const std::string& path);
void write_score_file(const std::string& path,
                      const std::vector<ScoreRecord>& records);

// Mean score per pair, then per-target max-normalization. Every registered
// (target, landmark) pair needs at least one record; missing pairs are all
// listed in the error.
CollocationMatrix aggregate_scores(const std::vector<ScoreRecord>& records,
                                   const CategoryRegistry& reg);

// ---- Prompt construction ----------------------------------------------------

struct ContextPair {
  std::string target_phrase;    // with article, e.g. "a saddle"
  std::string landmark_phrase;  // with article, e.g. "the stable"
  std::string preposition;
};

struct PromptSpec {
  std::string query_template =
      "If I can search from [LANDMARKS], I might find [n_t] [PREP] [n_l].";
  std::vector<ContextPair> context_pool;
  int num_contexts = 10;
  int num_runs = 20;
  uint64_t seed = 0;

  static PromptSpec builtin_default();
  static PromptSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // Rejects context pairs that mention a registered environment category.
  void validate(const CategoryRegistry& reg) const;
};

// One prompt string per run: shuffled context sentences followed by the final
// query with the full landmark list in a per-run random order. Pure function
// of (spec, target, landmark).
std::vector<std::string> build_prompts(const PromptSpec& spec,
                                       const CategoryRegistry& reg,
                                       const std::string& target,
                                       const std::string& landmark);

struct PromptRecord {
  std::string target;
  std::string landmark;
  int run_index;
  std::string prompt;
};

// Every target x landmark x run triple.
std::vector<PromptRecord> dump_prompts(const PromptSpec& spec,
                                       const CategoryRegistry& reg);
void write_prompt_file(const std::string& path,
                       const std::vector<PromptRecord>& records);

// ---- The search prior --------------------------------------------------------

struct SearchPrior {
  int width = 0;
  int height = 0;
  std::vector<double> p;  // row-major, >= 0

  double at(const Cell& c) const {
    return p[static_cast<size_t>(c.y) * width + c.x];
  }
};

// p_x(target) = sum over landmarks of colloc(target, l) * map channel l at x.
SearchPrior search_prior(const SemanticMap& map, const CollocationMatrix& colloc,
                         int target_category, const CategoryRegistry& reg);

// Argmax cell (row-major tie-break). An all-zero prior falls back to a seeded
// random never-observed free cell; `mask` (optional) removes already-searched
// cells first.
Cell next_search_goal(const SearchPrior& prior, const AgentPose& pose,
                      const SemanticMap& map, Rng& rng,
                      const std::vector<uint8_t>* mask = nullptr);

// Random-search baseline: ignores the prior entirely.
Cell random_search_goal(const SemanticMap& map, Rng& rng,
                        const std::vector<uint8_t>* mask = nullptr);

}  // namespace gridbench
