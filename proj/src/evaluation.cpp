#include "gridbench/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "gridbench/navigation.hpp"
#include "gridbench/perception.hpp"

namespace gridbench {

double plw(double s, double expert_m, double agent_m) {
  const double denom = std::max(expert_m, agent_m);
  if (denom <= 0) return s;  // no motion on either side
  return s * expert_m / denom;
}

double collocation_mean(const CollocationMatrix& m, const PairSet& pairs) {
  if (pairs.empty())
    throw SuiteError("collocation_mean: empty pair set");
  double sum = 0;
  for (const auto& [t, l] : pairs) {
    const int ti = m.target_index(t);
    const int li = m.landmark_index(l);
    if (ti < 0 || li < 0)
      throw SuiteError("collocation_mean: unregistered pair " + t + "/" + l);
    sum += m.at(static_cast<size_t>(ti), static_cast<size_t>(li));
  }
  return sum / static_cast<double>(pairs.size());
}

double probability_ratio(const CollocationMatrix& m,
                         const PlacementRules& rules) {
  PairSet allowed, complement;
  for (const auto& t : m.targets) {
    for (const auto& l : m.landmarks) {
      if (rules.is_allowed(t, l))
        allowed.emplace_back(t, l);
      else
        complement.emplace_back(t, l);
    }
  }
  if (allowed.empty() || complement.empty())
    throw SuiteError("probability_ratio: allowed or complement set is empty");
  const double denom = collocation_mean(m, complement);
  if (denom <= 0) return std::numeric_limits<double>::infinity();
  return collocation_mean(m, allowed) / denom;
}

double receptacle_ratio(const CollocationMatrix& m,
                        const PlacementRules& rules) {
  if (m.landmarks.size() < 4)
    throw SuiteError("receptacle_ratio needs at least 4 landmarks");
  std::vector<std::pair<int, std::string>> ranked;  // (-count, name)
  for (const auto& l : m.landmarks) {
    int count = 0;
    for (const auto& t : m.targets)
      if (rules.is_allowed(t, l)) ++count;
    ranked.emplace_back(-count, l);
  }
  std::sort(ranked.begin(), ranked.end());
  const size_t top =
      static_cast<size_t>(std::ceil(ranked.size() * 0.25 - 1e-12));
  std::vector<std::string> selected;
  for (size_t i = 0; i < top; ++i) selected.push_back(ranked[i].second);

  PairSet in, out;
  for (const auto& t : m.targets)
    for (const auto& l : m.landmarks) {
      const bool sel =
          std::find(selected.begin(), selected.end(), l) != selected.end();
      (sel ? in : out).emplace_back(t, l);
    }
  const double denom = collocation_mean(m, out);
  if (denom <= 0) return std::numeric_limits<double>::infinity();
  return collocation_mean(m, in) / denom;
}

HiddenTruth hidden_truth_from_counts(
    const std::map<std::pair<std::string, std::string>, int>& counts,
    const CategoryRegistry& reg) {
  HiddenTruth g;
  for (int id : reg.hideable_ids()) g.landmarks.push_back(reg.at(id).name);
  std::vector<std::string> targets;
  for (const auto& [pair, n] : counts)
    if (n > 0 &&
        std::find(targets.begin(), targets.end(), pair.first) == targets.end())
      targets.push_back(pair.first);
  std::sort(targets.begin(), targets.end());
  g.targets = targets;
  g.rows.assign(g.targets.size() * g.landmarks.size(), 0.0);
  for (size_t t = 0; t < g.targets.size(); ++t) {
    double total = 0;
    for (size_t l = 0; l < g.landmarks.size(); ++l) {
      auto it = counts.find({g.targets[t], g.landmarks[l]});
      const double v = it == counts.end() ? 0.0 : it->second;
      g.rows[t * g.landmarks.size() + l] = v;
      total += v;
    }
    if (total > 0)
      for (size_t l = 0; l < g.landmarks.size(); ++l)
        g.rows[t * g.landmarks.size() + l] /= total;
  }
  return g;
}

double hidden_kl(const CollocationMatrix& m, const HiddenTruth& g) {
  if (g.targets.empty())
    throw SuiteError("hidden_kl: no targets with hidden ground truth");
  double total = 0;
  for (size_t t = 0; t < g.targets.size(); ++t) {
    const int ti = m.target_index(g.targets[t]);
    if (ti < 0)
      throw SuiteError("hidden_kl: unregistered target " + g.targets[t]);
    // q: matrix row renormalized over the hideable subset.
    std::vector<double> q(g.landmarks.size(), 0.0);
    double qs = 0;
    for (size_t l = 0; l < g.landmarks.size(); ++l) {
      const int li = m.landmark_index(g.landmarks[l]);
      if (li < 0)
        throw SuiteError("hidden_kl: unregistered landmark " + g.landmarks[l]);
      q[l] = m.at(static_cast<size_t>(ti), static_cast<size_t>(li));
      qs += q[l];
    }
    double kl = 0;
    for (size_t l = 0; l < g.landmarks.size(); ++l) {
      const double gv = g.at(t, l);
      if (gv <= 0) continue;
      const double qv = qs > 0 ? q[l] / qs : 0;
      if (qv <= 0) return std::numeric_limits<double>::infinity();
      kl += gv * std::log(gv / qv);
    }
    total += kl;
  }
  return total / static_cast<double>(g.targets.size());
}

// ---- Suite ---------------------------------------------------------------------

namespace {

struct EpisodeWork {
  EpisodeResult result;
  std::vector<std::pair<std::string, std::string>> hidden_pairs;
};

EpisodeWork run_one(uint64_t seed, const SuiteConfig& cfg,
                    const CategoryRegistry& reg, const SubtaskPlan& plan,
                    const CollocationMatrix* colloc, bool random_search,
                    const std::string& trace_path,
                    const std::string& render_path) {
  EpisodeWork work;
  work.result.seed = seed;
  WorldGrid world;
  try {
    world = generate_world(seed, cfg.scenario, reg);
  } catch (const std::exception&) {
    work.result.failure_mode = "other";
    return work;
  }
  for (const auto& o : world.objects)
    if (o.hidden_in >= 0) {
      const LandmarkInstance* lm = world.landmark(o.hidden_in);
      if (lm)
        work.hidden_pairs.emplace_back(reg.at(o.category).name,
                                       reg.at(lm->category).name);
    }

  try {
    work.result.expert_length_m =
        expert_length(world, plan, reg, cfg.constraints);
  } catch (const InfeasiblePlanError&) {
    work.result.expert_length_m = -1;
  }

  EpisodeOptions opt;
  opt.constraints = cfg.constraints;
  opt.ablation = cfg.ablation;
  opt.colloc = colloc;
  opt.random_search = random_search;
  opt.agent_seed = derive_seed(seed, 0xBEEF);
  opt.keep_trace = !trace_path.empty() || !render_path.empty();

  const EpisodeRun run = run_episode(world, plan, reg, opt);
  auto& r = work.result;
  r.success = run.state.terminal == Terminal::Success;
  double met = 0;
  for (bool f : run.state.goal_flags) met += f ? 1 : 0;
  r.goal_fraction = run.state.goal_flags.empty()
                        ? 0
                        : met / static_cast<double>(run.state.goal_flags.size());
  if (r.success) r.goal_fraction = 1.0;
  r.agent_length_m = run.path_length_m;
  r.steps = run.state.steps;
  r.first_sighting_step = run.first_sighting_step;
  r.collisions = run.collisions;
  r.interaction_failures = run.interaction_failures;
  r.failure_mode = run.failure_mode;
  r.trace_hash = run.trace_hash;

  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    for (const auto& t : run.trace) {
      nlohmann::json j;
      j["step"] = t.step;
      j["action"] = to_string(t.action.kind);
      if (t.action.target >= 0) j["target"] = t.action.target;
      j["outcome"] = t.ok ? "ok" : "failed";
      j["pose"] = {{"x", t.pose.x},
                   {"y", t.pose.y},
                   {"heading", t.pose.heading_deg},
                   {"pitch", t.pose.pitch_deg}};
      out << j.dump() << "\n";
    }
  }
  if (!render_path.empty()) {
    // Final belief map with the executed trajectory overlaid.
    EpisodeOptions replay = opt;
    replay.keep_trace = false;
    SemanticMap final_map = make_map(world, reg);
    // Rebuild the map by replaying the trace poses' observations.
    WorldGrid w2 = world;
    AgentPose pose = world.spawn;
    update_map(final_map, observe(w2, pose, cfg.constraints.sensor));
    std::vector<Cell> path_cells;
    EpisodeState st;
    SubtaskPlan p2 = plan;
    for (const auto& t : run.trace) {
      if (st.terminal != Terminal::Running) break;
      step(w2, pose, st, t.action, cfg.constraints, reg, &p2);
      update_map(final_map, observe(w2, pose, cfg.constraints.sensor));
      path_cells.push_back(pose.cell());
    }
    const Cell agent_cell = pose.cell();
    render_composite_ppm(final_map, reg, render_path, path_cells, &agent_cell);
  }
  return work;
}

std::string csv_of(const std::vector<EpisodeResult>& episodes) {
  std::ostringstream out;
  out << "seed,success,goal_fraction,steps,path_length_m,expert_length_m,"
         "plw_success,first_sighting_step,collisions,interaction_failures,"
         "failure_mode,trace_hash\n";
  char buf[64];
  for (const auto& e : episodes) {
    const double w =
        plw(e.success ? 1.0 : 0.0, std::max(e.expert_length_m, 0.0),
            e.agent_length_m);
    out << e.seed << "," << (e.success ? 1 : 0) << ",";
    std::snprintf(buf, sizeof buf, "%.6f", e.goal_fraction);
    out << buf << "," << e.steps << ",";
    std::snprintf(buf, sizeof buf, "%.2f", e.agent_length_m);
    out << buf << ",";
    std::snprintf(buf, sizeof buf, "%.2f", e.expert_length_m);
    out << buf << ",";
    std::snprintf(buf, sizeof buf, "%.6f", w);
    out << buf << "," << e.first_sighting_step << "," << e.collisions << ","
        << e.interaction_failures << "," << e.failure_mode << ","
        << hash_hex(e.trace_hash) << "\n";
  }
  return out.str();
}

}  // namespace

SuiteOutcome run_suite(const SuiteConfig& cfg, const CategoryRegistry& reg) {
  if (cfg.seeds.empty() && !cfg.checks.is_object() && cfg.out_dir.empty()) {
    // nothing to do, still produce an empty report below
  }

  SuiteOutcome out;
  TemplateRegistry templates = TemplateRegistry::builtin_default();
  SubtaskPlan plan;
  bool language_error = false;
  std::string language_error_text;
  try {
    plan = templates.expand(cfg.task, reg);
  } catch (const std::exception& e) {
    language_error = true;
    language_error_text = e.what();
  }

  // Provider.
  CollocationMatrix matrix;
  const CollocationMatrix* colloc = nullptr;
  bool random_search = false;
  if (cfg.provider == "uniform") {
    matrix = uniform_matrix(reg);
    colloc = &matrix;
  } else if (cfg.provider == "random") {
    random_search = true;
    matrix = uniform_matrix(reg);  // reported metrics still need a matrix
  } else if (cfg.provider == "empirical") {
    std::vector<WorldGrid> corpus;
    corpus.reserve(static_cast<size_t>(cfg.corpus_size));
    for (int i = 0; i < cfg.corpus_size; ++i)
      corpus.push_back(
          generate_world(cfg.corpus_seed_base + static_cast<uint64_t>(i),
                         cfg.scenario, reg));
    matrix = empirical_provider(corpus, reg);
    colloc = &matrix;
  } else if (cfg.provider == "llm") {
    if (cfg.matrix_path.empty())
      throw SuiteError("provider 'llm' needs a matrix file");
    matrix = CollocationMatrix::load(cfg.matrix_path);
    colloc = &matrix;
  } else {
    throw SuiteError("unknown provider: " + cfg.provider);
  }

  // Output layout.
  std::string trace_dir, render_dir;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.write_traces) {
      trace_dir = cfg.out_dir + "/traces";
      std::filesystem::create_directories(trace_dir);
    }
    if (cfg.write_renders) {
      render_dir = cfg.out_dir + "/renders";
      std::filesystem::create_directories(render_dir);
    }
  }

  // Episodes.
  std::vector<EpisodeWork> works(cfg.seeds.size());
  if (language_error) {
    for (size_t i = 0; i < cfg.seeds.size(); ++i) {
      works[i].result.seed = cfg.seeds[i];
      works[i].result.failure_mode = "language_error";
    }
  } else {
    auto worker_body = [&](size_t i) {
      const uint64_t seed = cfg.seeds[i];
      std::string trace_path, render_path;
      if (!trace_dir.empty())
        trace_path = trace_dir + "/seed_" + std::to_string(seed) + ".jsonl";
      if (!render_dir.empty())
        render_path = render_dir + "/seed_" + std::to_string(seed) + ".ppm";
      try {
        works[i] = run_one(seed, cfg, reg, plan, colloc, random_search,
                           trace_path, render_path);
      } catch (const std::exception&) {
        works[i].result.seed = seed;
        works[i].result.failure_mode = "other";
      }
    };
    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1 || cfg.seeds.size() <= 1) {
      for (size_t i = 0; i < cfg.seeds.size(); ++i) worker_body(i);
    } else {
      std::atomic<size_t> next{0};
      std::vector<std::thread> pool;
      const int n_threads =
          std::min<size_t>(static_cast<size_t>(jobs), cfg.seeds.size());
      for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
          for (size_t i = next.fetch_add(1); i < cfg.seeds.size();
               i = next.fetch_add(1))
            worker_body(i);
        });
      for (auto& th : pool) th.join();
    }
  }

  // Aggregate in seed order.
  out.episodes.reserve(works.size());
  std::map<std::pair<std::string, std::string>, int> hidden_counts;
  for (const auto& w : works) {
    out.episodes.push_back(w.result);
    for (const auto& p : w.hidden_pairs) hidden_counts[p] += 1;
  }

  MetricsReport& rep = out.report;
  rep.episodes = static_cast<int>(out.episodes.size());
  rep.defined = rep.episodes > 0;
  rep.provider = cfg.provider;
  double sighted = 0;
  for (const auto& e : out.episodes) {
    rep.sr += e.success ? 1 : 0;
    rep.gc += e.goal_fraction;
    const double le = std::max(e.expert_length_m, 0.0);
    rep.plwsr += plw(e.success ? 1.0 : 0.0, le, e.agent_length_m);
    rep.plwgc += plw(e.goal_fraction, le, e.agent_length_m);
    rep.mean_steps += e.steps;
    rep.mean_path_length_m += e.agent_length_m;
    if (e.first_sighting_step >= 0) {
      rep.mean_first_sighting += e.first_sighting_step;
      sighted += 1;
    } else {
      rep.sighting_misses += 1;
    }
    if (!e.success) rep.failure_modes[e.failure_mode] += 1;
  }
  if (rep.defined) {
    const double n = rep.episodes;
    rep.sr /= n;
    rep.gc /= n;
    rep.plwsr /= n;
    rep.plwgc /= n;
    rep.mean_steps /= n;
    rep.mean_path_length_m /= n;
    rep.mean_first_sighting =
        sighted > 0 ? rep.mean_first_sighting / sighted : -1;
  }

  const PlacementRules& rules = cfg.scenario.rules.allowed.empty()
                                    ? reg.default_rules()
                                    : cfg.scenario.rules;
  rep.pr = probability_ratio(matrix, rules);
  rep.rr = receptacle_ratio(matrix, rules);
  if (!hidden_counts.empty()) {
    const HiddenTruth g = hidden_truth_from_counts(hidden_counts, reg);
    if (!g.targets.empty()) rep.kl_hidden = hidden_kl(matrix, g);
  }

  // Report JSON (volatile fields like jobs/out_dir stay out so hashes are
  // comparable across runs).
  nlohmann::json j;
  j["format"] = "gridbench-report";
  j["version"] = 1;
  j["task"] = cfg.task.to_json();
  j["provider"] = cfg.provider;
  j["scenario"] = cfg.scenario.to_json();
  j["flags"] = {{"inflation_radius", cfg.ablation.inflation_radius},
                {"uncorrected_reach", cfg.ablation.uncorrected_reach},
                {"no_interaction_offset", cfg.ablation.no_interaction_offset}};
  j["seeds"] = cfg.seeds;
  j["metrics"] = {{"episodes", rep.episodes},
                  {"defined", rep.defined},
                  {"sr", rep.sr},
                  {"gc", rep.gc},
                  {"plwsr", rep.plwsr},
                  {"plwgc", rep.plwgc},
                  {"mean_steps", rep.mean_steps},
                  {"mean_path_length_m", rep.mean_path_length_m},
                  {"mean_first_sighting", rep.mean_first_sighting},
                  {"sighting_misses", rep.sighting_misses}};
  j["failure_modes"] = rep.failure_modes;
  nlohmann::json jm;
  jm["provider"] = rep.provider;
  jm["pr"] = std::isfinite(rep.pr) ? nlohmann::json(rep.pr)
                                   : nlohmann::json("inf");
  jm["rr"] = std::isfinite(rep.rr) ? nlohmann::json(rep.rr)
                                   : nlohmann::json("inf");
  if (rep.kl_hidden)
    jm["kl_hidden"] = std::isfinite(*rep.kl_hidden)
                          ? nlohmann::json(*rep.kl_hidden)
                          : nlohmann::json("inf");
  jm["kl_direction"] = "truth||matrix";
  j["matrix_metrics"] = std::move(jm);
  if (language_error) j["language_error"] = language_error_text;

  out.episodes_csv = csv_of(out.episodes);
  j["episodes_hash"] = hash_hex(fnv1a(out.episodes_csv));
  const std::string payload = j.dump();
  out.report_hash = hash_hex(fnv1a(payload));
  j["report_hash"] = out.report_hash;
  out.report_json = std::move(j);

  // Text table in the usual column order.
  {
    std::ostringstream t;
    char buf[160];
    t << "episodes: " << rep.episodes << "   provider: " << rep.provider
      << "\n\n";
    t << "  SR      GC      PLWSR   PLWGC\n";
    std::snprintf(buf, sizeof buf, "  %-7.2f %-7.2f %-7.2f %-7.2f\n",
                  rep.sr * 100, rep.gc * 100, rep.plwsr * 100, rep.plwgc * 100);
    t << buf;
    t << "\nmatrix:  PR ";
    if (std::isfinite(rep.pr))
      std::snprintf(buf, sizeof buf, "%.3f", rep.pr);
    else
      std::snprintf(buf, sizeof buf, "inf");
    t << buf << "   RR ";
    if (std::isfinite(rep.rr))
      std::snprintf(buf, sizeof buf, "%.3f", rep.rr);
    else
      std::snprintf(buf, sizeof buf, "inf");
    t << buf;
    if (rep.kl_hidden) {
      t << "   KL ";
      if (std::isfinite(*rep.kl_hidden))
        std::snprintf(buf, sizeof buf, "%.4f", *rep.kl_hidden);
      else
        std::snprintf(buf, sizeof buf, "inf");
      t << buf;
    }
    t << "\n";
    if (!rep.failure_modes.empty()) {
      t << "\nfailure modes:\n";
      for (const auto& [mode, n] : rep.failure_modes) {
        std::snprintf(buf, sizeof buf, "  %-22s %d\n", mode.c_str(), n);
        t << buf;
      }
    }
    out.report_text = t.str();
  }

  // Configured acceptance checks.
  auto check = [&](bool ok, const std::string& label) {
    if (!ok) out.failed_checks.push_back(label);
  };
  // Always-on report invariants.
  check(rep.plwsr <= rep.sr + 1e-12, "plwsr<=sr");
  check(rep.plwgc <= rep.gc + 1e-12, "plwgc<=gc");
  if (cfg.checks.is_object()) {
    if (cfg.checks.contains("min_sr"))
      check(rep.sr >= cfg.checks["min_sr"].get<double>(), "min_sr");
    if (cfg.checks.contains("min_gc"))
      check(rep.gc >= cfg.checks["min_gc"].get<double>(), "min_gc");
    if (cfg.checks.contains("max_collision_episodes")) {
      int coll = 0;
      for (const auto& e : out.episodes) coll += e.collisions > 0 ? 1 : 0;
      check(coll <= cfg.checks["max_collision_episodes"].get<int>(),
            "max_collision_episodes");
    }
    if (cfg.checks.contains("min_collision_episode_rate")) {
      int coll = 0;
      for (const auto& e : out.episodes) coll += e.collisions > 0 ? 1 : 0;
      const double rate = rep.episodes ? coll / double(rep.episodes) : 0;
      check(rate >= cfg.checks["min_collision_episode_rate"].get<double>(),
            "min_collision_episode_rate");
    }
  }

  if (!cfg.out_dir.empty()) {
    std::ofstream(cfg.out_dir + "/report.json", std::ios::binary)
        << out.report_json.dump(2) << "\n";
    std::ofstream(cfg.out_dir + "/report.txt", std::ios::binary)
        << out.report_text;
    std::ofstream(cfg.out_dir + "/episodes.csv", std::ios::binary)
        << out.episodes_csv;
  }
  return out;
}

// ---- Config parsing -------------------------------------------------------------

SuiteConfig SuiteConfig::from_json(const nlohmann::json& j,
                                   const CategoryRegistry& reg) {
  SuiteConfig c;
  (void)reg;
  if (j.contains("scenario"))
    c.scenario = GenerationConfig::from_json(j["scenario"]);
  else
    c.scenario = GenerationConfig::builtin_default();
  if (j.contains("task")) c.task = TaskSpec::from_json(j["task"]);
  c.provider = j.value("provider", std::string("uniform"));
  c.matrix_path = j.value("matrix", std::string());
  c.corpus_size = j.value("corpus_size", 200);
  c.corpus_seed_base = j.value("corpus_seed_base", uint64_t{1} << 20);
  if (j.contains("seeds")) {
    const auto& js = j["seeds"];
    if (js.is_array()) {
      for (const auto& s : js) c.seeds.push_back(s.get<uint64_t>());
    } else if (js.is_object()) {
      const uint64_t from = js.at("from").get<uint64_t>();
      const uint64_t to = js.at("to").get<uint64_t>();
      for (uint64_t s = from; s <= to; ++s) c.seeds.push_back(s);
    }
  }
  if (j.contains("robot"))
    c.constraints = PhysicalConstraints::from_json(j["robot"]);
  if (j.contains("inflation_radius"))
    c.ablation.inflation_radius = j["inflation_radius"].get<double>();
  c.ablation.uncorrected_reach = j.value("uncorrected_reach", false);
  c.ablation.no_interaction_offset = j.value("no_interaction_offset", false);
  c.jobs = j.value("jobs", 1);
  c.write_traces = j.value("traces", false);
  c.write_renders = j.value("renders", false);
  c.out_dir = j.value("out_dir", std::string());
  if (j.contains("checks")) c.checks = j["checks"];
  return c;
}

nlohmann::json SuiteConfig::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario.to_json();
  j["task"] = task.to_json();
  j["provider"] = provider;
  if (!matrix_path.empty()) j["matrix"] = matrix_path;
  j["corpus_size"] = corpus_size;
  j["corpus_seed_base"] = corpus_seed_base;
  j["seeds"] = seeds;
  j["robot"] = constraints.to_json();
  if (ablation.inflation_radius >= 0)
    j["inflation_radius"] = ablation.inflation_radius;
  j["uncorrected_reach"] = ablation.uncorrected_reach;
  j["no_interaction_offset"] = ablation.no_interaction_offset;
  j["jobs"] = jobs;
  j["traces"] = write_traces;
  j["renders"] = write_renders;
  if (!out_dir.empty()) j["out_dir"] = out_dir;
  if (checks.is_object()) j["checks"] = checks;
  return j;
}

}  // namespace gridbench
