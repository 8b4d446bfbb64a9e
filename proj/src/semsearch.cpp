#include "gridbench/semsearch.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gridbench {

int CollocationMatrix::target_index(const std::string& name) const {
  for (size_t i = 0; i < targets.size(); ++i)
    if (targets[i] == name) return static_cast<int>(i);
  return -1;
}

int CollocationMatrix::landmark_index(const std::string& name) const {
  for (size_t i = 0; i < landmarks.size(); ++i)
    if (landmarks[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

// Matrix rows = object categories (search targets), columns = receptacle
// landmarks, in registry order.
CollocationMatrix matrix_shell(const CategoryRegistry& reg) {
  CollocationMatrix m;
  for (int id : reg.object_ids()) m.targets.push_back(reg.at(id).name);
  for (int id : reg.receptacle_ids()) m.landmarks.push_back(reg.at(id).name);
  m.values.assign(m.targets.size() * m.landmarks.size(), 0.0);
  return m;
}

void max_normalize_rows(CollocationMatrix& m) {
  for (size_t t = 0; t < m.targets.size(); ++t) {
    double mx = 0;
    for (size_t l = 0; l < m.landmarks.size(); ++l) mx = std::max(mx, m.at(t, l));
    if (mx > 0)
      for (size_t l = 0; l < m.landmarks.size(); ++l) m.at(t, l) /= mx;
  }
}

}  // namespace

CollocationMatrix uniform_matrix(const CategoryRegistry& reg) {
  CollocationMatrix m = matrix_shell(reg);
  std::fill(m.values.begin(), m.values.end(), 1.0);
  m.provenance = "uniform";
  return m;
}

CollocationMatrix empirical_provider(std::span<const WorldGrid> corpus,
                                     const CategoryRegistry& reg) {
  if (corpus.empty()) throw SemSearchError("empirical provider: empty corpus");
  CollocationMatrix m = matrix_shell(reg);
  std::vector<double> landmark_count(m.landmarks.size(), 0.0);
  std::vector<double> pair_count(m.values.size(), 0.0);
  for (const auto& world : corpus) {
    for (const auto& lm : world.landmarks) {
      const int l = m.landmark_index(reg.at(lm.category).name);
      if (l >= 0) landmark_count[static_cast<size_t>(l)] += 1;
    }
    for (const auto& o : world.objects) {
      if (o.at_landmark < 0) continue;
      const LandmarkInstance* lm = world.landmark(o.at_landmark);
      if (!lm) continue;
      const int t = m.target_index(reg.at(o.category).name);
      const int l = m.landmark_index(reg.at(lm->category).name);
      if (t >= 0 && l >= 0)
        pair_count[static_cast<size_t>(t) * m.landmarks.size() + l] += 1;
    }
  }
  // Add-one smoothing against the target vocabulary size, so unseen
  // landmarks score low instead of blowing up the rate.
  const double vocab = static_cast<double>(m.targets.size());
  for (size_t t = 0; t < m.targets.size(); ++t)
    for (size_t l = 0; l < m.landmarks.size(); ++l)
      m.at(t, l) = (pair_count[t * m.landmarks.size() + l] + 1.0) /
                   (landmark_count[l] + vocab);
  max_normalize_rows(m);
  m.provenance = "empirical";
  return m;
}

// ---- Score files -------------------------------------------------------------

std::vector<ScoreRecord> read_score_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SemSearchError("cannot open score file: " + path);
  std::vector<ScoreRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw SemSearchError("score file line " + std::to_string(line_no) +
                           ": " + e.what());
    }
    ScoreRecord r;
    r.target = j.at("target").get<std::string>();
    r.landmark = j.at("landmark").get<std::string>();
    r.run_index = j.value("run_index", 0);
    r.seed = j.value("seed", 0ULL);
    r.score = j.at("score").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

void write_score_file(const std::string& path,
                      const std::vector<ScoreRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SemSearchError("cannot open for writing: " + path);
  for (const auto& r : records) {
    nlohmann::json j;
    j["target"] = r.target;
    j["landmark"] = r.landmark;
    j["run_index"] = r.run_index;
    j["seed"] = r.seed;
    j["score"] = r.score;
    out << j.dump() << "\n";
  }
}

CollocationMatrix aggregate_scores(const std::vector<ScoreRecord>& records,
                                   const CategoryRegistry& reg) {
  CollocationMatrix m = matrix_shell(reg);
  std::vector<double> sums(m.values.size(), 0.0);
  std::vector<int> counts(m.values.size(), 0);
  for (const auto& r : records) {
    const int t = m.target_index(r.target);
    const int l = m.landmark_index(r.landmark);
    if (t < 0 || l < 0)
      throw SemSearchError("score record names unregistered pair: " +
                           r.target + " / " + r.landmark);
    const size_t i = static_cast<size_t>(t) * m.landmarks.size() + l;
    sums[i] += r.score;
    counts[i] += 1;
  }
  std::string missing;
  for (size_t t = 0; t < m.targets.size(); ++t)
    for (size_t l = 0; l < m.landmarks.size(); ++l)
      if (counts[t * m.landmarks.size() + l] == 0)
        missing += (missing.empty() ? "" : ", ") + m.targets[t] + "/" +
                   m.landmarks[l];
  if (!missing.empty())
    throw SemSearchError("score file misses pairs: " + missing);
  for (size_t i = 0; i < sums.size(); ++i) m.values[i] = sums[i] / counts[i];
  max_normalize_rows(m);
  m.provenance = "llm";
  return m;
}

CollocationMatrix CollocationMatrix::from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "gridbench-colloc")
    throw SemSearchError("not a collocation matrix file");
  CollocationMatrix m;
  m.provenance = j.value("provenance", std::string("llm"));
  for (const auto& t : j.at("targets")) m.targets.push_back(t.get<std::string>());
  for (const auto& l : j.at("landmarks"))
    m.landmarks.push_back(l.get<std::string>());
  for (const auto& row : j.at("values"))
    for (const auto& v : row) m.values.push_back(v.get<double>());
  if (m.values.size() != m.targets.size() * m.landmarks.size())
    throw SemSearchError("collocation matrix shape mismatch");
  for (double v : m.values)
    if (v < 0.0 || v > 1.0)
      throw SemSearchError("collocation values must lie in [0, 1]");
  return m;
}

nlohmann::json CollocationMatrix::to_json() const {
  nlohmann::json j;
  j["format"] = "gridbench-colloc";
  j["version"] = 1;
  j["provenance"] = provenance;
  j["targets"] = targets;
  j["landmarks"] = landmarks;
  auto rows = nlohmann::json::array();
  for (size_t t = 0; t < targets.size(); ++t) {
    auto row = nlohmann::json::array();
    for (size_t l = 0; l < landmarks.size(); ++l) row.push_back(at(t, l));
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  return j;
}

CollocationMatrix CollocationMatrix::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SemSearchError("cannot open matrix file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

void CollocationMatrix::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SemSearchError("cannot open for writing: " + path);
  out << to_json().dump(2) << "\n";
}

// ---- Prompts -------------------------------------------------------------------

PromptSpec PromptSpec::builtin_default() {
  PromptSpec s;
  s.context_pool = {
      {"a saddle", "the stable", "in"},
      {"a trumpet", "the orchestra pit", "in"},
      {"a wrench", "the toolbox", "in"},
      {"a lifebuoy", "the pier", "on"},
      {"a chess piece", "the chessboard", "on"},
      {"a stethoscope", "the clinic", "in"},
      {"a paintbrush", "the easel", "on"},
      {"a snowboard", "the ski lodge", "in"},
      {"an anchor", "the harbor", "in"},
      {"a violin", "the concert hall", "in"},
      {"a surfboard", "the beach shack", "in"},
      {"a telescope", "the observatory", "in"},
  };
  return s;
}

namespace {

std::string replace_all(std::string text, const std::string& from,
                        const std::string& to) {
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::vector<std::string> split_words(const std::string& phrase) {
  std::vector<std::string> words;
  std::istringstream in(phrase);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.below(i)]);
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += parts[i];
  }
  return out;
}

}  // namespace

void PromptSpec::validate(const CategoryRegistry& reg) const {
  if (num_runs < 1) throw SemSearchError("prompt spec: num_runs must be >= 1");
  if (num_contexts < 0 ||
      static_cast<size_t>(num_contexts) > context_pool.size())
    throw SemSearchError(
        "prompt spec: num_contexts exceeds the context pool size");
  if (query_template.find("[n_t]") == std::string::npos ||
      query_template.find("[n_l]") == std::string::npos)
    throw SemSearchError("prompt spec: template lacks [n_t]/[n_l] slots");
  for (const auto& c : context_pool) {
    for (const std::string& phrase : {c.target_phrase, c.landmark_phrase}) {
      for (const auto& w : split_words(phrase))
        if (reg.knows_word(w))
          throw SemSearchError(
              "prompt spec: context pair mentions the environment word '" +
              w + "'");
      std::string stripped = phrase;
      for (const char* art : {"a ", "an ", "the "})
        if (stripped.rfind(art, 0) == 0) stripped = stripped.substr(strlen(art));
      if (reg.knows_word(stripped))
        throw SemSearchError(
            "prompt spec: context pair mentions the environment phrase '" +
            stripped + "'");
    }
  }
}

std::vector<std::string> build_prompts(const PromptSpec& spec,
                                       const CategoryRegistry& reg,
                                       const std::string& target,
                                       const std::string& landmark) {
  spec.validate(reg);
  const Category& t = reg.at(reg.require(target));
  const Category& l = reg.at(reg.require(landmark));
  if (!l.is_receptacle)
    throw SemSearchError("prompt landmark is not a receptacle: " + landmark);

  std::vector<std::string> env_landmarks;
  for (int id : reg.receptacle_ids())
    env_landmarks.push_back(reg.at(id).article + " " + reg.at(id).phrase);

  const uint64_t pair_seed =
      derive_seed(spec.seed, fnv1a(target + "\x1f" + landmark));

  std::vector<std::string> prompts;
  prompts.reserve(static_cast<size_t>(spec.num_runs));
  for (int run = 0; run < spec.num_runs; ++run) {
    Rng rng(derive_seed(pair_seed, static_cast<uint64_t>(run)));

    std::string prompt;
    if (spec.num_contexts > 0) {
      std::vector<size_t> order(spec.context_pool.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      shuffle(order, rng);
      order.resize(static_cast<size_t>(spec.num_contexts));

      std::vector<std::string> ctx_landmarks;
      for (size_t i : order)
        ctx_landmarks.push_back(spec.context_pool[i].landmark_phrase);
      for (size_t i : order) {
        const ContextPair& c = spec.context_pool[i];
        std::vector<std::string> listed = ctx_landmarks;
        shuffle(listed, rng);
        std::string s = spec.query_template;
        s = replace_all(s, "[LANDMARKS]", join(listed));
        s = replace_all(s, "[n_t]", c.target_phrase);
        s = replace_all(s, "[PREP]", c.preposition);
        s = replace_all(s, "[n_l]", c.landmark_phrase);
        prompt += s + " ";
      }
    }

    std::vector<std::string> listed = env_landmarks;
    shuffle(listed, rng);
    std::string q = spec.query_template;
    q = replace_all(q, "[LANDMARKS]", join(listed));
    q = replace_all(q, "[n_t]", t.article + " " + t.phrase);
    q = replace_all(q, "[PREP]", l.preposition);
    q = replace_all(q, "[n_l]", l.article + " " + l.phrase);
    prompt += q;
    prompts.push_back(std::move(prompt));
  }
  return prompts;
}

std::vector<PromptRecord> dump_prompts(const PromptSpec& spec,
                                       const CategoryRegistry& reg) {
  std::vector<PromptRecord> out;
  for (int t : reg.object_ids()) {
    for (int l : reg.receptacle_ids()) {
      const auto prompts =
          build_prompts(spec, reg, reg.at(t).name, reg.at(l).name);
      for (int run = 0; run < static_cast<int>(prompts.size()); ++run)
        out.push_back(PromptRecord{reg.at(t).name, reg.at(l).name, run,
                                   prompts[static_cast<size_t>(run)]});
    }
  }
  return out;
}

void write_prompt_file(const std::string& path,
                       const std::vector<PromptRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SemSearchError("cannot open for writing: " + path);
  for (const auto& r : records) {
    nlohmann::json j;
    j["target"] = r.target;
    j["landmark"] = r.landmark;
    j["run_index"] = r.run_index;
    j["prompt"] = r.prompt;
    out << j.dump() << "\n";
  }
}

PromptSpec PromptSpec::from_json(const nlohmann::json& j) {
  PromptSpec s;
  s.query_template = j.value("query_template", s.query_template);
  if (j.contains("context_pool")) {
    s.context_pool.clear();
    for (const auto& c : j["context_pool"])
      s.context_pool.push_back({c.at("target").get<std::string>(),
                                c.at("landmark").get<std::string>(),
                                c.at("preposition").get<std::string>()});
  } else {
    s.context_pool = builtin_default().context_pool;
  }
  s.num_contexts = j.value("num_contexts", 10);
  s.num_runs = j.value("num_runs", 20);
  s.seed = j.value("seed", 0ULL);
  return s;
}

nlohmann::json PromptSpec::to_json() const {
  nlohmann::json j;
  j["query_template"] = query_template;
  auto pool = nlohmann::json::array();
  for (const auto& c : context_pool)
    pool.push_back({{"target", c.target_phrase},
                    {"landmark", c.landmark_phrase},
                    {"preposition", c.preposition}});
  j["context_pool"] = std::move(pool);
  j["num_contexts"] = num_contexts;
  j["num_runs"] = num_runs;
  j["seed"] = seed;
  return j;
}

// ---- Search prior ---------------------------------------------------------------

SearchPrior search_prior(const SemanticMap& map, const CollocationMatrix& colloc,
                         int target_category, const CategoryRegistry& reg) {
  SearchPrior prior;
  prior.width = map.width;
  prior.height = map.height;
  prior.p.assign(static_cast<size_t>(map.width) * map.height, 0.0);

  const int t = colloc.target_index(reg.at(target_category).name);
  for (int lm_id : reg.receptacle_ids()) {
    const int l = colloc.landmark_index(reg.at(lm_id).name);
    if (l < 0) continue;
    // Landmark categories used as search targets have no matrix row; fall
    // back to uniform weighting over the landmark evidence.
    const double w = t >= 0 ? colloc.at(static_cast<size_t>(t),
                                        static_cast<size_t>(l))
                            : 1.0;
    if (w <= 0) continue;
    for (uint32_t idx : map.marks[static_cast<size_t>(lm_id)])
      prior.p[idx] += w * map.grid[static_cast<size_t>(lm_id) * map.width *
                                       map.height +
                                   idx];
  }
  return prior;
}

namespace {

Cell random_unexplored(const SemanticMap& map, Rng& rng,
                       const std::vector<uint8_t>* mask) {
  std::vector<uint32_t> candidates;
  const size_t n = static_cast<size_t>(map.width) * map.height;
  const int obs_ch = map.obstacle_channel();
  for (size_t i = 0; i < n; ++i) {
    if (map.observed[i]) continue;
    if (mask && (*mask)[i]) continue;
    candidates.push_back(static_cast<uint32_t>(i));
  }
  if (candidates.empty()) {
    // Fully explored: any free observed cell still unmasked.
    for (size_t i = 0; i < n; ++i) {
      if (mask && (*mask)[i]) continue;
      if (map.grid[static_cast<size_t>(obs_ch) * n + i] > 0) continue;
      candidates.push_back(static_cast<uint32_t>(i));
    }
  }
  if (candidates.empty()) candidates.push_back(0);
  const uint32_t idx = candidates[rng.below(candidates.size())];
  return Cell{static_cast<int>(idx % map.width),
              static_cast<int>(idx / map.width)};
}

}  // namespace

Cell next_search_goal(const SearchPrior& prior, const AgentPose&,
                      const SemanticMap& map, Rng& rng,
                      const std::vector<uint8_t>* mask) {
  double best = 0;
  int best_idx = -1;
  for (size_t i = 0; i < prior.p.size(); ++i) {
    if (mask && (*mask)[i]) continue;
    if (prior.p[i] > best) {  // strict: first (row-major) max wins
      best = prior.p[i];
      best_idx = static_cast<int>(i);
    }
  }
  if (best_idx >= 0)
    return Cell{best_idx % prior.width, best_idx / prior.width};
  return random_unexplored(map, rng, mask);
}

Cell random_search_goal(const SemanticMap& map, Rng& rng,
                        const std::vector<uint8_t>* mask) {
  return random_unexplored(map, rng, mask);
}

}  // namespace gridbench
