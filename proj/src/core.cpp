#include "lensrag/core.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <utility>

#include "lensrag/text_util.hpp"

namespace lensrag {

namespace {

template <class E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<Difficulty, 3> kDifficulty{{{Difficulty::Easy, "Easy"}, {Difficulty::Medium, "Medium"}, {Difficulty::Hard, "Hard"}}};

constexpr NameTable<Category, 8> kCategory{{{Category::Aggregation, "Aggregation"},
                                            {Category::Comparison, "Comparison"},
                                            {Category::FactualKnowledge, "FactualKnowledge"},
                                            {Category::MultiHop, "MultiHop"},
                                            {Category::Reasoning, "Reasoning"},
                                            {Category::SimpleRecognition, "SimpleRecognition"},
                                            {Category::SpatialReasoning, "SpatialReasoning"},
                                            {Category::TemporalUnderstanding, "TemporalUnderstanding"}}};

constexpr NameTable<Dynamism, 3> kDynamism{
    {{Dynamism::Static, "Static"}, {Dynamism::SlowChanging, "SlowChanging"}, {Dynamism::FastChanging, "FastChanging"}}};

constexpr NameTable<SearchTool, 2> kSearchTool{{{SearchTool::ImageSearch, "ImageSearch"}, {SearchTool::TextSearch, "TextSearch"}}};

constexpr NameTable<Branch, 2> kBranch{{{Branch::Visual, "Visual"}, {Branch::Textual, "Textual"}}};

constexpr NameTable<AnswerMode, 2> kAnswerMode{{{AnswerMode::Direct, "Direct"}, {AnswerMode::Retrieved, "Retrieved"}}};

constexpr NameTable<RetrievalMode, 3> kRetrievalMode{
    {{RetrievalMode::None, "None"}, {RetrievalMode::Mandatory, "Mandatory"}, {RetrievalMode::DemandAdaptive, "DemandAdaptive"}}};

constexpr NameTable<ToolKind, 12> kToolKind{{{ToolKind::DomainRoute, "DomainRoute"},
                                             {ToolKind::DirectAnswer, "DirectAnswer"},
                                             {ToolKind::SearchRoute, "SearchRoute"},
                                             {ToolKind::QueryDecouple, "QueryDecouple"},
                                             {ToolKind::ObjectDetect, "ObjectDetect"},
                                             {ToolKind::ImageSearch, "ImageSearch"},
                                             {ToolKind::TextSearch, "TextSearch"},
                                             {ToolKind::PageFetch, "PageFetch"},
                                             {ToolKind::PageParse, "PageParse"},
                                             {ToolKind::Rerank, "Rerank"},
                                             {ToolKind::RagAnswer, "RagAnswer"},
                                             {ToolKind::Judge, "Judge"}}};

std::string fold(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

template <class E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E v) {
  for (const auto& [e, name] : table) {
    if (e == v) return name;
  }
  return "?";
}

template <class E, std::size_t N>
E value_of(const NameTable<E, N>& table, std::string_view text, std::string_view what) {
  const std::string key = fold(text);
  for (const auto& [e, name] : table) {
    if (fold(name) == key) return e;
  }
  throw InvalidParams("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

template <class T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get_opt(const json& j, const char* key, std::optional<T>& v) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    v.reset();
  } else {
    v = it->template get<T>();
  }
}

template <class T>
void get_if(const json& j, const char* key, T& v) {
  auto it = j.find(key);
  if (it != j.end() && !it->is_null()) v = it->template get<T>();
}

}  // namespace

std::string_view to_string(Difficulty v) { return name_of(kDifficulty, v); }
std::string_view to_string(Category v) { return name_of(kCategory, v); }
std::string_view to_string(Dynamism v) { return name_of(kDynamism, v); }
std::string_view to_string(SearchTool v) { return name_of(kSearchTool, v); }
std::string_view to_string(Branch v) { return name_of(kBranch, v); }
std::string_view to_string(AnswerMode v) { return name_of(kAnswerMode, v); }
std::string_view to_string(RetrievalMode v) { return name_of(kRetrievalMode, v); }
std::string_view to_string(ToolKind v) { return name_of(kToolKind, v); }

template <>
Difficulty parse_enum<Difficulty>(std::string_view t) { return value_of(kDifficulty, t, "difficulty"); }
template <>
Category parse_enum<Category>(std::string_view t) { return value_of(kCategory, t, "category"); }
template <>
Dynamism parse_enum<Dynamism>(std::string_view t) { return value_of(kDynamism, t, "dynamism"); }
template <>
SearchTool parse_enum<SearchTool>(std::string_view t) { return value_of(kSearchTool, t, "tool"); }
template <>
Branch parse_enum<Branch>(std::string_view t) {
  const std::string f = fold(t);
  if (f == "image") return Branch::Visual;
  if (f == "text") return Branch::Textual;
  return value_of(kBranch, t, "branch");
}
template <>
AnswerMode parse_enum<AnswerMode>(std::string_view t) { return value_of(kAnswerMode, t, "answer mode"); }
template <>
RetrievalMode parse_enum<RetrievalMode>(std::string_view t) {
  const std::string f = fold(t);
  if (f == "adaptive") return RetrievalMode::DemandAdaptive;
  return value_of(kRetrievalMode, t, "retrieval mode");
}
template <>
ToolKind parse_enum<ToolKind>(std::string_view t) { return value_of(kToolKind, t, "tool kind"); }

bool is_search_kind(ToolKind k) { return k == ToolKind::ImageSearch || k == ToolKind::TextSearch; }

// ---------------------------------------------------------------------------

std::vector<std::string> validate_task(const QueryTask& t) {
  std::vector<std::string> errs;
  if (t.id.empty()) errs.emplace_back("id is empty");
  if (t.question.empty()) errs.emplace_back("question is empty");
  if (t.hops < 1 || t.hops > 4) errs.push_back("hops must be in 1..4, got " + std::to_string(t.hops));
  if (t.category == Category::MultiHop && t.hops < 2) errs.emplace_back("category MultiHop requires hops >= 2");
  if (t.search_log) {
    if (static_cast<int>(t.search_log->size()) > t.hops) errs.emplace_back("search_log longer than hops");
    for (std::size_t i = 0; i < t.search_log->size(); ++i) {
      const auto& hop = (*t.search_log)[i];
      if (hop.tool == SearchTool::TextSearch && !hop.search_keywords)
        errs.push_back("search_log[" + std::to_string(i) + "] TextSearch without search_keywords");
    }
  }
  return errs;
}

bool AnswerRecord::has_flag(std::string_view f) const {
  return std::any_of(flags.begin(), flags.end(), [&](const std::string& x) { return x == f || x.starts_with(std::string(f) + ":"); });
}

std::size_t AnswerRecord::count(ToolKind k) const {
  return static_cast<std::size_t>(std::count_if(tool_calls.begin(), tool_calls.end(), [&](const ToolCall& c) { return c.kind == k; }));
}

std::size_t AnswerRecord::search_calls() const { return count(ToolKind::ImageSearch) + count(ToolKind::TextSearch); }

std::vector<std::string> validate_record(const AnswerRecord& r) {
  std::vector<std::string> errs;
  const std::size_t searches = r.search_calls();
  if (r.mode == AnswerMode::Direct) {
    if (r.plan) errs.emplace_back("Direct record carries a retrieval plan");
    if (!r.fetched_urls.empty()) errs.emplace_back("Direct record fetched URLs");
    if (searches != 0) errs.emplace_back("Direct record contains search calls");
    if (!r.error && r.count(ToolKind::DirectAnswer) != 1) errs.emplace_back("Direct record needs exactly one DirectAnswer call");
  } else if (searches == 0) {
    errs.emplace_back("Retrieved record contains no search call");
  }
  const bool routed = r.count(ToolKind::SearchRoute) > 0;
  bool seen_route = false;
  bool seen_search_route = false;
  for (const auto& c : r.tool_calls) {
    if (c.kind == ToolKind::DomainRoute) seen_route = true;
    if (c.kind == ToolKind::DirectAnswer && !seen_route) errs.emplace_back("DirectAnswer before DomainRoute");
    if (c.kind == ToolKind::SearchRoute) seen_search_route = true;
    if (c.kind == ToolKind::QueryDecouple || c.kind == ToolKind::ObjectDetect) {
      if (!seen_search_route) errs.push_back(std::string(to_string(c.kind)) + " before SearchRoute");
    }
    if (routed && is_search_kind(c.kind) && !seen_search_route) errs.push_back(std::string(to_string(c.kind)) + " before SearchRoute");
  }
  return errs;
}

// ---------------------------------------------------------------------------

std::vector<std::string> PipelineConfig::default_domains() {
  return {"Plant", "Public Service", "Food", "Shopping", "Translation", "Transport", "Culture", "Navigation", "Animal", "Education",
          "Other"};
}

std::map<std::string, std::string> PipelineConfig::default_domain_descriptions() {
  return {
      {"Food",
       "Questions about dishes, ingredients, nutrition, cooking methods, or the cultural/industrial origin of food items."},
      {"Shopping",
       "Questions about consumer goods or published media\xE2\x80\x94price, specifications, packaging, availability, editions, or "
       "author/publisher details."},
      {"Plant", "Questions about plant or flower species, their identification, care, toxicity, or habitat."},
      {"Public Service", "Questions about public facilities, signage, opening hours, utilities, or government and civic services."},
      {"Translation", "Questions asking to translate or explain text written in a foreign language in the image."},
      {"Transport", "Questions about vehicles, vehicle models, transit lines, tickets, or transport infrastructure."},
      {"Culture", "Questions about artworks, artists, landmarks, history, religion, or cultural traditions."},
      {"Navigation", "Questions about locations, directions, routes, distances, or nearby places."},
      {"Animal", "Questions about animal species, breeds, behavior, or habitat."},
      {"Education", "Questions about books, schools, scientific concepts, or learning materials."},
      {"Other", "Questions that fit none of the domains above."},
  };
}

std::map<std::string, std::string> PipelineConfig::default_domain_guidelines() {
  return {
      {"Food", "Name the exact dish or product and brand before reasoning about ingredients, origin, or nutrition."},
      {"Shopping", "Read labels, prices, and edition details from the packaging before answering."},
      {"Plant", "Identify the species from leaf, flower, and stem features before answering."},
      {"Public Service", "Read all visible signage and notices; answers often depend on local regulations."},
      {"Translation", "Transcribe the visible text exactly before translating it."},
      {"Transport", "Identify the vehicle make and model or the transit line from visible markings."},
      {"Culture", "Identify the artwork, landmark, or artist precisely before reasoning about history."},
      {"Navigation", "Use the image location metadata and visible landmarks to reason about places and routes."},
      {"Animal", "Identify the species or breed from visible traits before answering."},
      {"Education", "Identify the book, subject, or concept exactly before answering."},
      {"Other", "Reason carefully from the visible evidence."},
  };
}

std::vector<ConfigViolation> validate_config(const PipelineConfig& c) {
  std::vector<ConfigViolation> v;
  auto range = [&](bool ok, const char* field, const std::string& msg) {
    if (!ok) v.push_back({ViolationKind::Range, field, msg});
  };
  range(c.weight_visual >= 0.0, "weight_visual", "must be >= 0");
  range(c.weight_textual >= 0.0, "weight_textual", "must be >= 0");
  if (std::fabs(c.weight_visual + c.weight_textual - 1.0) > 1e-9)
    v.push_back({ViolationKind::WeightSum, "weight_visual+weight_textual", "weights must sum to 1"});
  range(c.score_threshold >= 0.0 && c.score_threshold <= 1.0, "score_threshold", "must be in [0,1]");
  range(c.top_n_pages >= 1, "top_n_pages", "must be >= 1");
  range(c.top_k_chunks >= 1, "top_k_chunks", "must be >= 1");
  range(c.shortest_edge >= 1, "shortest_edge", "must be >= 1");
  range(c.temperature >= 0.0, "temperature", "must be >= 0");
  range(c.chunk_size_chars >= 1, "chunk_size_chars", "must be >= 1");
  range(c.chunk_overlap_chars >= 0 && c.chunk_overlap_chars < c.chunk_size_chars, "chunk_overlap_chars",
        "must satisfy 0 <= overlap < chunk size");
  range(c.max_objects >= 1, "max_objects", "must be >= 1");
  range(c.max_subqueries >= 1, "max_subqueries", "must be >= 1");
  range(c.fetch_timeout_ms >= 1, "fetch_timeout_ms", "must be >= 1");
  range(c.fetch_retries >= 0, "fetch_retries", "must be >= 0");
  range(c.backend_retries >= 0, "backend_retries", "must be >= 0");
  range(c.parallelism >= 1, "parallelism", "must be >= 1");
  range(!c.domains.empty(), "domains", "taxonomy must not be empty");
  if (c.retrieval_mode != RetrievalMode::None)
    range(!c.branches.empty(), "branches", "at least one branch required when retrieval is enabled");
  return v;
}

const PipelineConfig& validated(const PipelineConfig& config) {
  auto v = validate_config(config);
  if (!v.empty()) throw ConfigError(std::move(v));
  return config;
}

// ---------------------------------------------------------------------------
// JSON

#define LENSRAG_ENUM_JSON(E)                                            \
  void to_json(json& j, E v) { j = std::string(to_string(v)); }         \
  void from_json(const json& j, E& v) { v = parse_enum<E>(j.get<std::string>()); }

LENSRAG_ENUM_JSON(Difficulty)
LENSRAG_ENUM_JSON(Category)
LENSRAG_ENUM_JSON(Dynamism)
LENSRAG_ENUM_JSON(SearchTool)
LENSRAG_ENUM_JSON(Branch)
LENSRAG_ENUM_JSON(AnswerMode)
LENSRAG_ENUM_JSON(RetrievalMode)
LENSRAG_ENUM_JSON(ToolKind)

#undef LENSRAG_ENUM_JSON

void to_json(json& j, const HopAnnotation& v) {
  j = json{{"sub_question", v.sub_question}, {"tool", v.tool}};
  put_opt(j, "search_keywords", v.search_keywords);
  put_opt(j, "url", v.url);
  put_opt(j, "snippet", v.snippet);
}

void from_json(const json& j, HopAnnotation& v) {
  v.sub_question = j.at("sub_question").get<std::string>();
  v.tool = j.at("tool").get<SearchTool>();
  get_opt(j, "search_keywords", v.search_keywords);
  get_opt(j, "url", v.url);
  get_opt(j, "snippet", v.snippet);
}

void to_json(json& j, const QueryTask& v) {
  j = json{{"id", v.id},
           {"image", v.image},
           {"question", v.question},
           {"difficulty", v.difficulty},
           {"hops", v.hops},
           {"category", v.category},
           {"domain_label", v.domain_label},
           {"dynamism", v.dynamism},
           {"glasses", v.glasses}};
  put_opt(j, "location", v.location);
  put_opt(j, "gold_answer", v.gold_answer);
  put_opt(j, "search_log", v.search_log);
}

void from_json(const json& j, QueryTask& v) {
  v.id = j.at("id").get<std::string>();
  v.image = j.at("image").get<std::string>();
  v.question = j.at("question").get<std::string>();
  get_opt(j, "location", v.location);
  get_opt(j, "gold_answer", v.gold_answer);
  v.difficulty = j.at("difficulty").get<Difficulty>();
  v.hops = j.at("hops").get<int>();
  v.category = j.at("category").get<Category>();
  v.domain_label = j.value("domain_label", std::string{});
  v.dynamism = j.at("dynamism").get<Dynamism>();
  v.glasses = j.value("glasses", std::string{});
  get_opt(j, "search_log", v.search_log);
}

void to_json(json& j, const RetrievalPlan& v) { j = json{{"objects", v.objects}, {"queries", v.queries}}; }

void from_json(const json& j, RetrievalPlan& v) {
  v.objects = j.value("objects", std::vector<std::string>{});
  v.queries = j.value("queries", std::vector<std::string>{});
}

void to_json(json& j, const BBox& v) {
  j = json{{"x", v.x}, {"y", v.y}, {"w", v.w}, {"h", v.h}, {"label", v.label}, {"confidence", v.confidence}};
}

void from_json(const json& j, BBox& v) {
  v.x = j.at("x").get<int>();
  v.y = j.at("y").get<int>();
  v.w = j.at("w").get<int>();
  v.h = j.at("h").get<int>();
  v.label = j.value("label", std::string{});
  v.confidence = j.value("confidence", 0.0);
}

void to_json(json& j, const EvidenceChunk& v) {
  j = json{{"text", v.text},
           {"source_url", v.source_url},
           {"branch", v.branch},
           {"fused_score", v.fused_score},
           {"rank", v.rank},
           {"source_position", v.source_position},
           {"chunk_index", v.chunk_index}};
  put_opt(j, "visual_score", v.visual_score);
  put_opt(j, "textual_score", v.textual_score);
}

void from_json(const json& j, EvidenceChunk& v) {
  v.text = j.at("text").get<std::string>();
  v.source_url = j.at("source_url").get<std::string>();
  v.branch = j.at("branch").get<Branch>();
  get_opt(j, "visual_score", v.visual_score);
  get_opt(j, "textual_score", v.textual_score);
  v.fused_score = j.at("fused_score").get<double>();
  v.rank = j.value("rank", 0);
  v.source_position = j.value("source_position", 0);
  v.chunk_index = j.value("chunk_index", 0);
}

void to_json(json& j, const ToolCall& v) {
  j = json{{"kind", v.kind}, {"input_digest", v.input_digest}, {"cache_hit", v.cache_hit}, {"duration_ms", v.duration_ms},
           {"ok", v.ok}};
  if (!v.note.empty()) j["note"] = v.note;
}

void from_json(const json& j, ToolCall& v) {
  v.kind = j.at("kind").get<ToolKind>();
  v.input_digest = j.value("input_digest", std::string{});
  v.cache_hit = j.value("cache_hit", false);
  v.duration_ms = j.value("duration_ms", std::int64_t{0});
  v.ok = j.value("ok", true);
  v.note = j.value("note", std::string{});
}

void to_json(json& j, const AnswerRecord& v) { j = record_to_json(v, true); }

void from_json(const json& j, AnswerRecord& v) {
  v.task_id = j.at("task_id").get<std::string>();
  v.answer = j.value("answer", std::string{});
  v.reasoning = j.value("reasoning", std::string{});
  v.mode = j.at("mode").get<AnswerMode>();
  v.predicted_domain = j.value("predicted_domain", std::string{});
  get_opt(j, "plan", v.plan);
  v.sub_queries = j.value("sub_queries", std::vector<std::string>{});
  v.detected_regions = j.value("detected_regions", std::vector<BBox>{});
  v.fetched_urls = j.value("fetched_urls", std::vector<std::string>{});
  v.selected_chunks = j.value("selected_chunks", std::vector<EvidenceChunk>{});
  v.tool_calls = j.value("tool_calls", std::vector<ToolCall>{});
  v.wall_time_ms = j.value("wall_time_ms", std::int64_t{0});
  v.flags = j.value("flags", std::vector<std::string>{});
  get_opt(j, "error", v.error);
}

json record_to_json(const AnswerRecord& v, bool include_volatile) {
  json calls = json::array();
  for (const auto& c : v.tool_calls) {
    json cj = c;
    if (!include_volatile) {
      cj.erase("duration_ms");
      cj.erase("cache_hit");
    }
    calls.push_back(std::move(cj));
  }
  json j{{"task_id", v.task_id},
         {"answer", v.answer},
         {"reasoning", v.reasoning},
         {"mode", v.mode},
         {"predicted_domain", v.predicted_domain},
         {"sub_queries", v.sub_queries},
         {"detected_regions", v.detected_regions},
         {"fetched_urls", v.fetched_urls},
         {"selected_chunks", v.selected_chunks},
         {"tool_calls", std::move(calls)},
         {"flags", v.flags}};
  put_opt(j, "plan", v.plan);
  put_opt(j, "error", v.error);
  if (include_volatile) j["wall_time_ms"] = v.wall_time_ms;
  return j;
}

std::string canonical_record(const AnswerRecord& record) { return record_to_json(record, false).dump(); }

void to_json(json& j, const PipelineConfig& v) {
  j = json{{"retrieval_mode", v.retrieval_mode},
           {"use_object_detector", v.use_object_detector},
           {"use_query_decoupler", v.use_query_decoupler},
           {"branches", v.branches},
           {"top_n_pages", v.top_n_pages},
           {"top_k_chunks", v.top_k_chunks},
           {"score_threshold", v.score_threshold},
           {"weight_visual", v.weight_visual},
           {"weight_textual", v.weight_textual},
           {"shortest_edge", v.shortest_edge},
           {"temperature", v.temperature},
           {"chunk_size_chars", v.chunk_size_chars},
           {"chunk_overlap_chars", v.chunk_overlap_chars},
           {"max_objects", v.max_objects},
           {"max_subqueries", v.max_subqueries},
           {"fetch_timeout_ms", v.fetch_timeout_ms},
           {"fetch_retries", v.fetch_retries},
           {"backend_retries", v.backend_retries},
           {"parallelism", v.parallelism},
           {"domains", v.domains},
           {"domain_descriptions", v.domain_descriptions},
           {"domain_guidelines", v.domain_guidelines}};
}

// Missing keys keep their defaults, so config files may be partial.
void from_json(const json& j, PipelineConfig& v) {
  get_if(j, "retrieval_mode", v.retrieval_mode);
  get_if(j, "use_object_detector", v.use_object_detector);
  get_if(j, "use_query_decoupler", v.use_query_decoupler);
  get_if(j, "branches", v.branches);
  get_if(j, "top_n_pages", v.top_n_pages);
  get_if(j, "top_k_chunks", v.top_k_chunks);
  get_if(j, "score_threshold", v.score_threshold);
  get_if(j, "weight_visual", v.weight_visual);
  get_if(j, "weight_textual", v.weight_textual);
  get_if(j, "shortest_edge", v.shortest_edge);
  get_if(j, "temperature", v.temperature);
  get_if(j, "chunk_size_chars", v.chunk_size_chars);
  get_if(j, "chunk_overlap_chars", v.chunk_overlap_chars);
  get_if(j, "max_objects", v.max_objects);
  get_if(j, "max_subqueries", v.max_subqueries);
  get_if(j, "fetch_timeout_ms", v.fetch_timeout_ms);
  get_if(j, "fetch_retries", v.fetch_retries);
  get_if(j, "backend_retries", v.backend_retries);
  get_if(j, "parallelism", v.parallelism);
  get_if(j, "domains", v.domains);
  get_if(j, "domain_descriptions", v.domain_descriptions);
  get_if(j, "domain_guidelines", v.domain_guidelines);
}

// ---------------------------------------------------------------------------
// JSONL

std::vector<QueryTask> read_tasks_jsonl(const std::string& path, std::vector<std::string>* rejections) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot read dataset " + path);
  std::vector<QueryTask> tasks;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    try {
      auto task = json::parse(line).get<QueryTask>();
      auto errs = validate_task(task);
      if (errs.empty()) {
        tasks.push_back(std::move(task));
      } else if (rejections) {
        std::string msg = where + " (" + task.id + "):";
        for (const auto& e : errs) msg += " " + e + ";";
        rejections->push_back(std::move(msg));
      }
    } catch (const std::exception& e) {
      if (rejections) rejections->push_back(where + ": " + e.what());
    }
  }
  return tasks;
}

void write_tasks_jsonl(const std::string& path, const std::vector<QueryTask>& tasks) {
  std::string out;
  for (const auto& t : tasks) out += json(t).dump() + "\n";
  write_file(path, out);
}

std::vector<AnswerRecord> read_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot read run file " + path);
  std::vector<AnswerRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    records.push_back(json::parse(line).get<AnswerRecord>());
  }
  return records;
}

void write_records_jsonl(const std::string& path, const std::vector<AnswerRecord>& records) {
  std::string out;
  for (const auto& r : records) out += record_to_json(r).dump() + "\n";
  write_file(path, out);
}

}  // namespace lensrag
