#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridbench/agent.hpp"
#include "gridbench/language.hpp"
#include "gridbench/registry.hpp"
#include "gridbench/semsearch.hpp"
#include "gridbench/world.hpp"

namespace gridbench {

class SuiteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpisodeResult {
  uint64_t seed = 0;
  bool success = false;
  double goal_fraction = 0;
  double agent_length_m = 0;
  double expert_length_m = -1;  // -1: expert infeasible
  int steps = 0;
  int first_sighting_step = -1;
  int collisions = 0;
  int interaction_failures = 0;
  std::string failure_mode;
  uint64_t trace_hash = 0;
};

// Path-length weighting: s * L_expert / max(L_expert, L_agent). The cap keeps
// the weight at 1 for agents at least as efficient as the reference.
double plw(double s, double expert_m, double agent_m);

// ---- Collocation matrix analyses -------------------------------------------

using PairSet = std::vector<std::pair<std::string, std::string>>;

// (1/|A|) * sum of matrix values over the pair set. Throws on an empty set or
// unregistered pair.
double collocation_mean(const CollocationMatrix& m, const PairSet& pairs);

// Mean over simulator-allowed pairs divided by mean over the complement.
// Returns +inf when the complement mean is zero (degenerate split).
double probability_ratio(const CollocationMatrix& m, const PlacementRules& rules);

// Landmarks sorted by allowed-pair count (desc, name asc on ties); the top
// quarter (ceiling) forms the selected set. Ratio of means over pairs with
// selected landmarks vs the rest.
double receptacle_ratio(const CollocationMatrix& m, const PlacementRules& rules);

// Ground-truth distribution of hidden placements: row per target over the
// hideable landmark set, rows summing to 1.
struct HiddenTruth {
  std::vector<std::string> targets;
  std::vector<std::string> landmarks;  // hideable subset H
  std::vector<double> rows;            // targets x landmarks, row-normalized

  double at(size_t t, size_t l) const { return rows[t * landmarks.size() + l]; }
};

HiddenTruth hidden_truth_from_counts(
    const std::map<std::pair<std::string, std::string>, int>& counts,
    const CategoryRegistry& reg);

// Mean over targets of KL(g || q), q = matrix row renormalized over H.
// Zero-g terms drop; q = 0 against g > 0 yields +inf.
double hidden_kl(const CollocationMatrix& m, const HiddenTruth& g);

// ---- Suite -------------------------------------------------------------------

struct SuiteConfig {
  GenerationConfig scenario;
  TaskSpec task;
  std::string provider = "uniform";  // uniform | random | empirical | llm
  std::string matrix_path;           // llm provider
  int corpus_size = 200;             // empirical provider corpus
  uint64_t corpus_seed_base = 1u << 20;
  std::vector<uint64_t> seeds;
  PhysicalConstraints constraints = PhysicalConstraints::builtin_default();
  AblationFlags ablation;
  int jobs = 1;
  bool write_traces = false;
  bool write_renders = false;
  std::string out_dir;
  nlohmann::json checks;  // optional acceptance thresholds

  static SuiteConfig from_json(const nlohmann::json& j,
                               const CategoryRegistry& reg);
  nlohmann::json to_json() const;
};

struct MetricsReport {
  int episodes = 0;
  bool defined = false;  // false for an empty episode set
  double sr = 0, gc = 0, plwsr = 0, plwgc = 0;
  double mean_steps = 0;
  double mean_path_length_m = 0;
  double mean_first_sighting = 0;  // over episodes that sighted the target
  int sighting_misses = 0;
  std::map<std::string, int> failure_modes;
  // Matrix metrics for the provider in use.
  double pr = 1, rr = 1;
  std::optional<double> kl_hidden;
  std::string provider;
};

struct SuiteOutcome {
  MetricsReport report;
  std::vector<EpisodeResult> episodes;
  nlohmann::json report_json;
  std::string report_text;
  std::string episodes_csv;
  std::string report_hash;
  std::vector<std::string> failed_checks;
};

// Runs every seed (optionally in parallel), aggregates, renders the report,
// and writes files when out_dir is set. Per-episode errors become failure
// tags; only harness-level problems throw.
SuiteOutcome run_suite(const SuiteConfig& config, const CategoryRegistry& reg);

}  // namespace gridbench
