// gridbench command-line front end. Talks to the engine exclusively through
// the C API so it doubles as a living example of driving the shared library.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gridbench/capi.h"

namespace {

int die(gb_status st, const std::string& what) {
  std::cerr << "error (" << gb_status_name(st) << ") during " << what << ": "
            << gb_last_error() << "\n";
  return 1;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

std::vector<uint64_t> parse_seeds(const std::string& text) {
  std::vector<uint64_t> seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const uint64_t from = std::stoull(text.substr(0, dots));
    const uint64_t to = std::stoull(text.substr(dots + 2));
    for (uint64_t s = from; s <= to; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) seeds.push_back(std::stoull(item));
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridbench: desk-scale embodied-instruction-following bench"};
  app.require_subcommand(1);

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "generate a world file");
  std::string gen_config, gen_out = "world.json", gen_render, gen_registry;
  uint64_t gen_seed = 1;
  gen->add_option("--config", gen_config, "scenario config JSON file");
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--out", gen_out, "output world file");
  gen->add_option("--render", gen_render, "also write a PPM render");
  gen->add_option("--registry", gen_registry, "category registry file");

  // ---- run ----
  auto* run = app.add_subcommand("run", "run an episode suite");
  std::string run_config, run_provider, run_matrix, run_seeds, run_out;
  std::string run_task_type;
  std::vector<std::string> run_slots;
  double run_inflation = -1;
  bool run_uncorrected = false, run_no_offset = false;
  bool run_traces = false, run_renders = false;
  int run_jobs = 0;
  run->add_option("--config", run_config,
                  "run config JSON (default: $GRIDBENCH_CONFIG)");
  run->add_option("--provider", run_provider,
                  "collocation provider: uniform | random | empirical | llm");
  run->add_option("--matrix", run_matrix, "matrix file for --provider llm");
  run->add_option("--seeds", run_seeds, "e.g. 1..100 or 3,5,8");
  run->add_option("--task-type", run_task_type, "task template name");
  run->add_option("--slot", run_slots, "slot binding Name=Category (repeat)");
  run->add_option("--inflation", run_inflation,
                  "obstacle enlargement radius override, meters "
                  "(ablation: incorrect obstacle enlargement)");
  run->add_flag("--uncorrected-reach", run_uncorrected,
                "use raw depth instead of camera-pose-corrected distance "
                "(ablation: uncorrected reach distance)");
  run->add_flag("--no-interaction-offset", run_no_offset,
                "drop per-action standoffs (ablation: no interaction offset)");
  run->add_option("--jobs", run_jobs, "parallel episodes");
  run->add_option("--out", run_out, "output directory");
  run->add_flag("--traces", run_traces, "write per-episode traces");
  run->add_flag("--renders", run_renders, "write per-episode renders");

  // ---- prompts ----
  auto* prompts = app.add_subcommand("prompts", "dump collocation prompts");
  std::string pr_spec, pr_registry, pr_out = "prompts.jsonl";
  int pr_contexts = -1, pr_runs = -1;
  uint64_t pr_seed = 0;
  bool pr_seed_set = false;
  prompts->add_option("--spec", pr_spec, "prompt spec JSON file");
  prompts->add_option("--registry", pr_registry, "category registry file");
  prompts->add_option("--out", pr_out, "output JSONL file");
  prompts->add_option("--num-contexts", pr_contexts, "context sentences");
  prompts->add_option("--num-runs", pr_runs, "randomized runs per pair");
  prompts->add_option("--seed", pr_seed, "shuffle seed")
      ->each([&](const std::string&) { pr_seed_set = true; });

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "scores -> collocation matrix");
  std::string in_scores, in_registry, in_out = "matrix.json";
  ingest->add_option("--scores", in_scores, "score JSONL file")->required();
  ingest->add_option("--registry", in_registry, "category registry file");
  ingest->add_option("--out", in_out, "output matrix file");

  // ---- report ----
  auto* report = app.add_subcommand("report", "print a report as text");
  std::string rep_path;
  report->add_option("--report", rep_path, "report.json path")->required();

  // ---- render ----
  auto* render = app.add_subcommand("render", "render a world file");
  std::string ren_world, ren_out = "world.ppm";
  render->add_option("--world", ren_world, "world JSON file")->required();
  render->add_option("--out", ren_out, "output PPM file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      nlohmann::json cfg = nlohmann::json::object();
      if (!gen_config.empty()) cfg = load_json_file(gen_config);
      if (!gen_registry.empty()) cfg["registry"] = gen_registry;
      gb_world* world = nullptr;
      gb_status st =
          gb_world_generate(cfg.empty() ? "" : cfg.dump().c_str(), gen_seed,
                            &world);
      if (st != GB_OK) return die(st, "generate");
      st = gb_world_save(world, gen_out.c_str());
      if (st == GB_OK && !gen_render.empty())
        st = gb_world_render(world, gen_render.c_str());
      gb_world_free(world);
      if (st != GB_OK) return die(st, "generate");
      std::cout << "wrote " << gen_out << "\n";
      return 0;
    }

    if (run->parsed()) {
      nlohmann::json cfg = nlohmann::json::object();
      if (run_config.empty()) {
        if (const char* env = std::getenv("GRIDBENCH_CONFIG"))
          run_config = env;
      }
      if (!run_config.empty()) cfg = load_json_file(run_config);
      if (!run_provider.empty()) cfg["provider"] = run_provider;
      if (!run_matrix.empty()) cfg["matrix"] = run_matrix;
      if (!run_seeds.empty()) cfg["seeds"] = parse_seeds(run_seeds);
      if (!run_task_type.empty()) cfg["task"]["task_type"] = run_task_type;
      for (const auto& s : run_slots) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
          std::cerr << "bad --slot (want Name=Category): " << s << "\n";
          return 1;
        }
        cfg["task"]["slots"][s.substr(0, eq)] = s.substr(eq + 1);
      }
      if (run_inflation >= 0) cfg["inflation_radius"] = run_inflation;
      if (run_uncorrected) cfg["uncorrected_reach"] = true;
      if (run_no_offset) cfg["no_interaction_offset"] = true;
      if (run_jobs > 0) cfg["jobs"] = run_jobs;
      if (!run_out.empty()) cfg["out_dir"] = run_out;
      if (run_traces) cfg["traces"] = true;
      if (run_renders) cfg["renders"] = true;

      char* report_json = nullptr;
      int checks_failed = 0;
      const gb_status st =
          gb_suite_run(cfg.dump().c_str(), &report_json, &checks_failed);
      if (st != GB_OK) return die(st, "run");
      const nlohmann::json rep = nlohmann::json::parse(report_json);
      gb_string_free(report_json);
      const auto& m = rep["metrics"];
      std::printf("episodes %d | SR %.2f | GC %.2f | PLWSR %.2f | PLWGC %.2f\n",
                  m["episodes"].get<int>(), m["sr"].get<double>() * 100,
                  m["gc"].get<double>() * 100, m["plwsr"].get<double>() * 100,
                  m["plwgc"].get<double>() * 100);
      std::printf("report hash %s\n",
                  rep["report_hash"].get<std::string>().c_str());
      if (checks_failed) {
        std::cerr << "acceptance checks failed: " << gb_last_error() << "\n";
        return 2;
      }
      return 0;
    }

    if (prompts->parsed()) {
      nlohmann::json spec = nlohmann::json::object();
      if (!pr_spec.empty()) spec = load_json_file(pr_spec);
      if (!pr_registry.empty()) spec["registry"] = pr_registry;
      if (pr_contexts >= 0) spec["num_contexts"] = pr_contexts;
      if (pr_runs >= 0) spec["num_runs"] = pr_runs;
      if (pr_seed_set) spec["seed"] = pr_seed;
      size_t count = 0;
      const gb_status st =
          gb_prompts_dump(spec.dump().c_str(), pr_out.c_str(), &count);
      if (st != GB_OK) return die(st, "prompts");
      std::cout << "wrote " << count << " prompt records to " << pr_out << "\n";
      return 0;
    }

    if (ingest->parsed()) {
      const gb_status st = gb_scores_ingest(
          in_scores.c_str(), in_registry.empty() ? nullptr : in_registry.c_str(),
          in_out.c_str());
      if (st != GB_OK) return die(st, "ingest");
      std::cout << "wrote " << in_out << "\n";
      return 0;
    }

    if (report->parsed()) {
      char* text = nullptr;
      const gb_status st = gb_report_text(rep_path.c_str(), &text);
      if (st != GB_OK) return die(st, "report");
      std::cout << text;
      gb_string_free(text);
      return 0;
    }

    if (render->parsed()) {
      gb_world* world = nullptr;
      gb_status st = gb_world_load(ren_world.c_str(), &world);
      if (st != GB_OK) return die(st, "render");
      st = gb_world_render(world, ren_out.c_str());
      gb_world_free(world);
      if (st != GB_OK) return die(st, "render");
      std::cout << "wrote " << ren_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
