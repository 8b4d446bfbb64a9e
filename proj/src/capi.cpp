#include "gridbench/capi.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "gridbench/evaluation.hpp"
#include "gridbench/navigation.hpp"
#include "gridbench/perception.hpp"
#include "gridbench/registry.hpp"
#include "gridbench/semsearch.hpp"
#include "gridbench/world.hpp"

using namespace gridbench;

struct gb_world {
  WorldGrid world;
  CategoryRegistry registry;
};

struct gb_matrix {
  CollocationMatrix matrix;
};

namespace {

thread_local std::string t_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gb_status fail(gb_status code, const std::string& message) {
  t_last_error = message;
  return code;
}

// Maps the library's exception taxonomy onto C error codes.
template <typename Fn>
gb_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    return fail(GB_ERR_PARSE, e.what());
  } catch (const UsageError& e) {
    return fail(GB_ERR_USAGE, e.what());
  } catch (const GenerationError& e) {
    return fail(GB_ERR_INFEASIBLE, e.what());
  } catch (const TemplateError& e) {
    return fail(GB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const RegistryError& e) {
    return fail(GB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const SemSearchError& e) {
    return fail(GB_ERR_COVERAGE, e.what());
  } catch (const NavigationError& e) {
    return fail(GB_ERR_USAGE, e.what());
  } catch (const SuiteError& e) {
    return fail(GB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(GB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GB_ERR_INTERNAL, "unknown error");
  }
}

CategoryRegistry registry_for(const nlohmann::json& j) {
  if (j.is_object() && j.contains("registry")) {
    std::ifstream in(j["registry"].get<std::string>());
    if (!in)
      throw RegistryError("cannot open registry file: " +
                          j["registry"].get<std::string>());
    nlohmann::json jr;
    in >> jr;
    return CategoryRegistry::from_json(jr);
  }
  return CategoryRegistry::builtin_default();
}

}  // namespace

extern "C" {

const char* gb_version(void) { return "1.0.0"; }

const char* gb_status_name(gb_status status) {
  switch (status) {
    case GB_OK: return "ok";
    case GB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case GB_ERR_IO: return "io";
    case GB_ERR_PARSE: return "parse";
    case GB_ERR_INFEASIBLE: return "infeasible";
    case GB_ERR_USAGE: return "usage";
    case GB_ERR_COVERAGE: return "coverage";
    case GB_ERR_INTERNAL: return "internal";
  }
  return "?";
}

const char* gb_last_error(void) { return t_last_error.c_str(); }

void gb_string_free(char* s) { std::free(s); }

gb_status gb_world_generate(const char* config_json, uint64_t seed,
                            gb_world** out) {
  if (!out) return fail(GB_ERR_INVALID_ARGUMENT, "out is NULL");
  *out = nullptr;
  return guarded([&]() {
    nlohmann::json j = nlohmann::json::object();
    if (config_json && *config_json) j = nlohmann::json::parse(config_json);
    auto handle = std::make_unique<gb_world>();
    handle->registry = registry_for(j);
    const GenerationConfig cfg = j.empty()
                                     ? GenerationConfig::builtin_default()
                                     : GenerationConfig::from_json(j);
    handle->world = generate_world(seed, cfg, handle->registry);
    *out = handle.release();
    return GB_OK;
  });
}

gb_status gb_world_load(const char* path, gb_world** out) {
  if (!path || !out) return fail(GB_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&]() {
    auto handle = std::make_unique<gb_world>();
    handle->registry = CategoryRegistry::builtin_default();
    handle->world = load_world(path, handle->registry);
    *out = handle.release();
    return GB_OK;
  });
}

gb_status gb_world_save(const gb_world* world, const char* path) {
  if (!world || !path) return fail(GB_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() {
    save_world(world->world, world->registry, path);
    return GB_OK;
  });
}

gb_status gb_world_json(const gb_world* world, char** out_json) {
  if (!world || !out_json) return fail(GB_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() {
    *out_json = dup_string(world_to_json(world->world, world->registry).dump(2));
    return GB_OK;
  });
}

gb_status gb_world_render(const gb_world* world, const char* ppm_path) {
  if (!world || !ppm_path)
    return fail(GB_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() {
    const SemanticMap map = ground_truth_map(world->world, world->registry);
    const Cell agent = world->world.spawn.cell();
    render_composite_ppm(map, world->registry, ppm_path, {}, &agent);
    return GB_OK;
  });
}

void gb_world_free(gb_world* world) { delete world; }

gb_status gb_matrix_load(const char* path, gb_matrix** out) {
  if (!path || !out) return fail(GB_ERR_INVALID_ARGUMENT, "NULL argument");
  *out = nullptr;
  return guarded([&]() {
    auto handle = std::make_unique<gb_matrix>();
    handle->matrix = CollocationMatrix::load(path);
    *out = handle.release();
    return GB_OK;
  });
}

gb_status gb_matrix_get(const gb_matrix* m, const char* target,
                        const char* landmark, double* out_value) {
  if (!m || !target || !landmark || !out_value)
    return fail(GB_ERR_INVALID_ARGUMENT, "NULL argument");
  const int t = m->matrix.target_index(target);
  const int l = m->matrix.landmark_index(landmark);
  if (t < 0 || l < 0)
    return fail(GB_ERR_INVALID_ARGUMENT,
                std::string("unknown pair: ") + target + "/" + landmark);
  *out_value = m->matrix.at(static_cast<size_t>(t), static_cast<size_t>(l));
  return GB_OK;
}

void gb_matrix_free(gb_matrix* m) { delete m; }

gb_status gb_suite_run(const char* config_json, char** out_report_json,
                       int* checks_failed) {
  if (!config_json) return fail(GB_ERR_INVALID_ARGUMENT, "config is NULL");
  if (checks_failed) *checks_failed = 0;
  return guarded([&]() {
    const nlohmann::json j = nlohmann::json::parse(config_json);
    const CategoryRegistry reg = registry_for(j);
    const SuiteConfig cfg = SuiteConfig::from_json(j, reg);
    const SuiteOutcome outcome = run_suite(cfg, reg);
    if (out_report_json)
      *out_report_json = dup_string(outcome.report_json.dump(2));
    if (checks_failed)
      *checks_failed = outcome.failed_checks.empty() ? 0 : 1;
    if (!outcome.failed_checks.empty()) {
      std::string msg = "failed checks:";
      for (const auto& c : outcome.failed_checks) msg += " " + c;
      t_last_error = msg;
    }
    return GB_OK;
  });
}

gb_status gb_prompts_dump(const char* prompt_spec_json, const char* out_path,
                          size_t* out_count) {
  if (!prompt_spec_json || !out_path)
    return fail(GB_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() {
    const nlohmann::json j = nlohmann::json::parse(prompt_spec_json);
    const CategoryRegistry reg = registry_for(j);
    const PromptSpec spec = PromptSpec::from_json(j);
    spec.validate(reg);
    const auto records = dump_prompts(spec, reg);
    write_prompt_file(out_path, records);
    if (out_count) *out_count = records.size();
    return GB_OK;
  });
}

gb_status gb_scores_ingest(const char* scores_path, const char* registry_path,
                           const char* out_matrix_path) {
  if (!scores_path || !out_matrix_path)
    return fail(GB_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() {
    nlohmann::json j = nlohmann::json::object();
    if (registry_path && *registry_path) j["registry"] = registry_path;
    const CategoryRegistry reg = registry_for(j);
    const auto records = read_score_file(scores_path);
    const CollocationMatrix matrix = aggregate_scores(records, reg);
    matrix.save(out_matrix_path);
    return GB_OK;
  });
}

gb_status gb_report_text(const char* report_json_path, char** out_text) {
  if (!report_json_path || !out_text)
    return fail(GB_ERR_INVALID_ARGUMENT, "NULL argument");
  return guarded([&]() {
    std::ifstream in(report_json_path);
    if (!in)
      return fail(GB_ERR_IO,
                  std::string("cannot open: ") + report_json_path);
    nlohmann::json j;
    in >> j;
    const auto& m = j.at("metrics");
    char buf[256];
    std::string text = "episodes: " +
                       std::to_string(m.value("episodes", 0)) +
                       "   provider: " + j.value("provider", "?") + "\n\n";
    text += "  SR      GC      PLWSR   PLWGC\n";
    std::snprintf(buf, sizeof buf, "  %-7.2f %-7.2f %-7.2f %-7.2f\n",
                  m.value("sr", 0.0) * 100, m.value("gc", 0.0) * 100,
                  m.value("plwsr", 0.0) * 100, m.value("plwgc", 0.0) * 100);
    text += buf;
    if (j.contains("failure_modes") && !j["failure_modes"].empty()) {
      text += "\nfailure modes:\n";
      for (auto it = j["failure_modes"].begin(); it != j["failure_modes"].end();
           ++it) {
        std::snprintf(buf, sizeof buf, "  %-22s %d\n", it.key().c_str(),
                      it.value().get<int>());
        text += buf;
      }
    }
    *out_text = dup_string(text);
    return GB_OK;
  });
}

}  // extern "C"
