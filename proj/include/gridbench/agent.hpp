#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gridbench/constraints.hpp"
#include "gridbench/language.hpp"
#include "gridbench/perception.hpp"
#include "gridbench/registry.hpp"
#include "gridbench/semsearch.hpp"
#include "gridbench/world.hpp"

namespace gridbench {

class InfeasiblePlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Module-variant switches; each maps to one ablation row of the eval suite.
struct AblationFlags {
  double inflation_radius = -1.0;  // < 0 -> constraints.agent_radius
  bool uncorrected_reach = false;
  bool no_interaction_offset = false;
};

struct EpisodeOptions {
  PhysicalConstraints constraints = PhysicalConstraints::builtin_default();
  AblationFlags ablation;
  const CollocationMatrix* colloc = nullptr;  // null -> uniform weighting
  bool random_search = false;                 // random-search baseline
  bool omniscient = false;  // full ground-truth map, no exploration
  uint64_t agent_seed = 1;  // search fallback stream
  bool keep_trace = true;
};

struct TraceEntry {
  int step = 0;
  Action action;
  bool ok = true;
  AgentPose pose;
};

struct EpisodeRun {
  EpisodeState state;
  SubtaskPlan plan;  // completion flags as of episode end
  double path_length_m = 0;
  int first_sighting_step = -1;  // first subtask's target category
  int collisions = 0;
  int interaction_failures = 0;
  std::vector<TraceEntry> trace;
  uint64_t trace_hash = 0;
  std::string failure_mode;  // empty on success
};

// Runs the full modular agent on a copy of the world until the episode
// terminates. Deterministic for fixed inputs.
EpisodeRun run_episode(const WorldGrid& world, const SubtaskPlan& plan,
                       const CategoryRegistry& reg, const EpisodeOptions& opt);

// Path length of the omniscient reference agent (full map, true object
// locations, optimal per-subtask routes). Throws InfeasiblePlanError when
// even the omniscient agent cannot finish the plan.
double expert_length(const WorldGrid& world, const SubtaskPlan& plan,
                     const CategoryRegistry& reg,
                     const PhysicalConstraints& constraints);

}  // namespace gridbench
