#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lensrag/errors.hpp"

namespace lensrag {

using json = nlohmann::json;

enum class Difficulty { Easy, Medium, Hard };
enum class Category {
  Aggregation,
  Comparison,
  FactualKnowledge,
  MultiHop,
  Reasoning,
  SimpleRecognition,
  SpatialReasoning,
  TemporalUnderstanding
};
enum class Dynamism { Static, SlowChanging, FastChanging };
enum class SearchTool { ImageSearch, TextSearch };
enum class Branch { Visual, Textual };
enum class AnswerMode { Direct, Retrieved };
enum class RetrievalMode { None, Mandatory, DemandAdaptive };
enum class ToolKind {
  DomainRoute,
  DirectAnswer,
  SearchRoute,
  QueryDecouple,
  ObjectDetect,
  ImageSearch,
  TextSearch,
  PageFetch,
  PageParse,
  Rerank,
  RagAnswer,
  Judge
};

// Enum <-> string. Parsing ignores case and any non-alphanumeric characters,
// so "Multi-hop", "multi_hop" and "MultiHop" are the same category.
std::string_view to_string(Difficulty v);
std::string_view to_string(Category v);
std::string_view to_string(Dynamism v);
std::string_view to_string(SearchTool v);
std::string_view to_string(Branch v);
std::string_view to_string(AnswerMode v);
std::string_view to_string(RetrievalMode v);
std::string_view to_string(ToolKind v);

template <class E>
E parse_enum(std::string_view text);

template <> Difficulty parse_enum<Difficulty>(std::string_view);
template <> Category parse_enum<Category>(std::string_view);
template <> Dynamism parse_enum<Dynamism>(std::string_view);
template <> SearchTool parse_enum<SearchTool>(std::string_view);
template <> Branch parse_enum<Branch>(std::string_view);  // also accepts "image"/"text"
template <> AnswerMode parse_enum<AnswerMode>(std::string_view);
template <> RetrievalMode parse_enum<RetrievalMode>(std::string_view);  // also accepts "adaptive"
template <> ToolKind parse_enum<ToolKind>(std::string_view);

bool is_search_kind(ToolKind k);

struct HopAnnotation {
  std::string sub_question;
  SearchTool tool = SearchTool::TextSearch;
  std::optional<std::string> search_keywords;
  std::optional<std::string> url;
  std::optional<std::string> snippet;

  bool operator==(const HopAnnotation&) const = default;
};

struct QueryTask {
  std::string id;
  std::string image;  // path, relative to the dataset file
  std::string question;
  std::optional<std::string> location;
  std::optional<std::string> gold_answer;
  Difficulty difficulty = Difficulty::Easy;
  int hops = 1;
  Category category = Category::SimpleRecognition;
  std::string domain_label;
  Dynamism dynamism = Dynamism::Static;
  std::string glasses;
  std::optional<std::vector<HopAnnotation>> search_log;

  bool operator==(const QueryTask&) const = default;
};

/// Invariant violations of a task; empty when valid.
std::vector<std::string> validate_task(const QueryTask& task);

struct RetrievalPlan {
  std::vector<std::string> objects;
  std::vector<std::string> queries;

  bool empty() const { return objects.empty() && queries.empty(); }
  bool operator==(const RetrievalPlan&) const = default;
};

struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  std::string label;
  double confidence = 0.0;

  bool operator==(const BBox&) const = default;
};

struct EvidenceChunk {
  std::string text;
  std::string source_url;
  Branch branch = Branch::Textual;
  std::optional<double> visual_score;
  std::optional<double> textual_score;
  double fused_score = 0.0;
  int rank = 0;  // 1-based after selection, 0 before
  int source_position = 0;  // index of the page in the merged URL list
  int chunk_index = 0;      // index of the chunk within its page

  bool operator==(const EvidenceChunk&) const = default;
};

struct ToolCall {
  ToolKind kind = ToolKind::DomainRoute;
  std::string input_digest;
  bool cache_hit = false;
  std::int64_t duration_ms = 0;
  bool ok = true;
  std::string note;

  bool operator==(const ToolCall&) const = default;
};

struct AnswerRecord {
  std::string task_id;
  std::string answer;
  std::string reasoning;
  AnswerMode mode = AnswerMode::Direct;
  std::string predicted_domain;
  std::optional<RetrievalPlan> plan;
  std::vector<std::string> sub_queries;
  std::vector<BBox> detected_regions;
  std::vector<std::string> fetched_urls;
  std::vector<EvidenceChunk> selected_chunks;
  std::vector<ToolCall> tool_calls;
  std::int64_t wall_time_ms = 0;
  std::vector<std::string> flags;
  std::optional<std::string> error;

  bool operator==(const AnswerRecord&) const = default;

  bool has_flag(std::string_view f) const;
  std::size_t count(ToolKind k) const;
  std::size_t search_calls() const;
};

/// Invariant violations of a record (mode/tool-call consistency, call order).
std::vector<std::string> validate_record(const AnswerRecord& record);

struct PipelineConfig {
  RetrievalMode retrieval_mode = RetrievalMode::DemandAdaptive;
  bool use_object_detector = true;
  bool use_query_decoupler = true;
  std::set<Branch> branches = {Branch::Visual, Branch::Textual};
  int top_n_pages = 5;
  int top_k_chunks = 10;
  double score_threshold = 0.6;
  double weight_visual = 0.4;
  double weight_textual = 0.6;
  int shortest_edge = 1024;
  double temperature = 0.0;
  int chunk_size_chars = 1000;
  int chunk_overlap_chars = 200;
  int max_objects = 3;
  int max_subqueries = 4;
  int fetch_timeout_ms = 10000;
  int fetch_retries = 2;
  int backend_retries = 1;
  int parallelism = 4;
  std::vector<std::string> domains = default_domains();
  std::map<std::string, std::string> domain_descriptions = default_domain_descriptions();
  std::map<std::string, std::string> domain_guidelines = default_domain_guidelines();

  bool branch_enabled(Branch b) const { return branches.contains(b); }
  bool operator==(const PipelineConfig&) const = default;

  static std::vector<std::string> default_domains();
  static std::map<std::string, std::string> default_domain_descriptions();
  static std::map<std::string, std::string> default_domain_guidelines();
};

/// Every violated config invariant (empty list means valid).
std::vector<ConfigViolation> validate_config(const PipelineConfig& config);

/// Returns `config` when valid; throws ConfigError with the full list otherwise.
const PipelineConfig& validated(const PipelineConfig& config);

/// Serialize a record. Volatile fields (durations, wall time, cache-hit flags)
/// are dropped when `include_volatile` is false so that repeated runs compare
/// byte for byte.
json record_to_json(const AnswerRecord& record, bool include_volatile = true);
std::string canonical_record(const AnswerRecord& record);

std::vector<QueryTask> read_tasks_jsonl(const std::string& path, std::vector<std::string>* rejections = nullptr);
void write_tasks_jsonl(const std::string& path, const std::vector<QueryTask>& tasks);
std::vector<AnswerRecord> read_records_jsonl(const std::string& path);
void write_records_jsonl(const std::string& path, const std::vector<AnswerRecord>& records);

void to_json(json& j, Difficulty v);
void from_json(const json& j, Difficulty& v);
void to_json(json& j, Category v);
void from_json(const json& j, Category& v);
void to_json(json& j, Dynamism v);
void from_json(const json& j, Dynamism& v);
void to_json(json& j, SearchTool v);
void from_json(const json& j, SearchTool& v);
void to_json(json& j, Branch v);
void from_json(const json& j, Branch& v);
void to_json(json& j, AnswerMode v);
void from_json(const json& j, AnswerMode& v);
void to_json(json& j, RetrievalMode v);
void from_json(const json& j, RetrievalMode& v);
void to_json(json& j, ToolKind v);
void from_json(const json& j, ToolKind& v);

void to_json(json& j, const HopAnnotation& v);
void from_json(const json& j, HopAnnotation& v);
void to_json(json& j, const QueryTask& v);
void from_json(const json& j, QueryTask& v);
void to_json(json& j, const RetrievalPlan& v);
void from_json(const json& j, RetrievalPlan& v);
void to_json(json& j, const BBox& v);
void from_json(const json& j, BBox& v);
void to_json(json& j, const EvidenceChunk& v);
void from_json(const json& j, EvidenceChunk& v);
void to_json(json& j, const ToolCall& v);
void from_json(const json& j, ToolCall& v);
void to_json(json& j, const AnswerRecord& v);
void from_json(const json& j, AnswerRecord& v);
void to_json(json& j, const PipelineConfig& v);
void from_json(const json& j, PipelineConfig& v);

}  // namespace lensrag
