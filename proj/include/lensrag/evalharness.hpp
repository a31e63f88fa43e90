#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lensrag/core.hpp"
#include "lensrag/pipeline.hpp"

namespace lensrag {

// ---------------------------------------------------------------------------
// Dataset

struct LoadedDataset {
  std::vector<QueryTask> tasks;
  std::vector<std::string> rejections;  // "line N: reason"
};

/// Reads a JSONL dataset; invalid records are reported, not fatal. Throws
/// DatasetError when the file cannot be read.
LoadedDataset load_dataset(const std::string& path);

// ---------------------------------------------------------------------------
// Judging

struct Judgment {
  std::string task_id;
  bool accuracy = false;
  std::string judge_raw;
  std::vector<std::string> flags;

  bool operator==(const Judgment&) const = default;
};

void to_json(json& j, const Judgment& v);
void from_json(const json& j, Judgment& v);
std::vector<Judgment> read_judgments_jsonl(const std::string& path);
void write_judgments_jsonl(const std::string& path, const std::vector<Judgment>& judgments);

/// The evaluator request for one (question, gold, prediction) triple.
ChatRequest evaluator_request(const PromptSet& prompts, const std::string& question, const std::string& gold,
                              const std::string& prediction);

/// Reads "accuracy" from the first balanced JSON object of a judge reply.
/// Accepts a boolean or the strings "true"/"false"; anything else is nullopt.
std::optional<bool> parse_judge_reply(std::string_view reply);

/// Judges one record; one retry on an unusable reply, then fails closed with
/// accuracy=false and flag `judge_parse_failure`.
Judgment judge(const QueryTask& task, const AnswerRecord& record, ChatBackend& backend,
               const PromptSet& prompts = PromptSet::builtin());

/// Judges every task that has a record, in task order.
std::vector<Judgment> judge_all(const std::vector<QueryTask>& tasks, const std::vector<AnswerRecord>& records,
                                ChatBackend& backend, int parallelism, const PromptSet& prompts = PromptSet::builtin());

// ---------------------------------------------------------------------------
// Reports

struct Bucket {
  std::size_t correct = 0;
  std::size_t total = 0;

  std::optional<double> accuracy() const;  // percentage, unrounded
  bool operator==(const Bucket&) const = default;
};

struct EvalReport {
  std::string run_label;
  Bucket overall;
  std::map<std::string, std::map<std::string, Bucket>> slices;
  std::size_t search_calls = 0;
  double mean_tool_usage = 0.0;
  std::optional<double> gain_vs_baseline;  // percentage points
  std::optional<std::string> baseline_label;
  json config;

  double overall_accuracy() const { return overall.accuracy().value_or(0.0); }
};

/// Slices: difficulty, reasoning_steps, information_seeking, domain,
/// category, dynamism, hops. Information seeking comes from the search calls
/// the record actually made. Throws InvalidParams when a task has no
/// judgment or no record.
EvalReport aggregate(const std::vector<Judgment>& judgments, const std::vector<QueryTask>& tasks,
                     const std::vector<AnswerRecord>& records, const std::string& run_label = "run");

/// Percentage-point difference of two accuracies.
double accuracy_gain(double run, double baseline);
void apply_baseline(EvalReport& report, const EvalReport& baseline);

/// "n/a" for an empty bucket, else the accuracy with two decimals.
std::string format_accuracy(const Bucket& b);
std::string format_gain(double gain);

json report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);
std::string report_to_csv(const EvalReport& report);

// ---------------------------------------------------------------------------
// Baselines and ablations

enum class BaselineKind { Direct, TextRAG, ImageRAG, MultimodalRAG };
std::string_view to_string(BaselineKind k);
BaselineKind parse_baseline_kind(std::string_view s);

/// Search-then-answer baselines: no routing, detection, decoupling or
/// reranking. Snippets (page text when a snippet is empty) go into the
/// context in search order, text results before image results.
std::vector<AnswerRecord> run_baseline(BaselineKind kind, const std::vector<QueryTask>& tasks, PipelineContext& ctx,
                                       const std::string& base_dir = ".");

struct AblationSetting {
  std::string group;  // "A", "B", "C" or "" for the full system
  std::string name;
  PipelineConfig config;
};

/// The full system followed by the eleven ablation rows.
std::vector<AblationSetting> ablation_settings(const PipelineConfig& base);

struct AblationRow {
  AblationSetting setting;
  EvalReport report;
  std::vector<AnswerRecord> records;
  double decline = 0.0;  // full-system accuracy minus this row's
};

/// Runs and judges every setting (full system first) with a shared cache.
std::vector<AblationRow> run_ablations(const std::vector<QueryTask>& tasks, PipelineContext& ctx, ChatBackend& judge_backend,
                                       const std::string& base_dir = ".");

std::string ablation_table(const std::vector<AblationRow>& rows);
json ablation_json(const std::vector<AblationRow>& rows);

// ---------------------------------------------------------------------------
// Analysis

/// Jaccard overlap of the correct sets, in percent. Throws DisjointTaskSets
/// unless both runs judged the same tasks.
double overlap(const std::vector<Judgment>& a, const std::vector<Judgment>& b);

enum class ErrorType { None, RetrievalDemand, ToolInvocation, QueryDecoupling, ObjectDetection };
std::string_view to_string(ErrorType t);

struct ErrorLabel {
  std::string task_id;
  ErrorType type = ErrorType::None;
  bool low_confidence = false;
};

/// Rule cascade over the annotated search log. Correct tasks get None.
/// Throws MissingAnnotation when the task has no search log.
ErrorLabel classify_error(const QueryTask& task, const AnswerRecord& record, const Judgment& judgment);

struct DatasetStats {
  std::size_t total = 0;
  std::size_t single_hop = 0;
  std::size_t multi_hop = 0;
  double mean_hops = 0.0;
  double mean_question_words = 0.0;
  double mean_answer_words = 0.0;
  std::size_t tool_usage = 0;  // annotated search steps
  double mean_tool_usage = 0.0;
  std::map<std::string, std::size_t> by_glasses, by_domain, by_category, by_difficulty, by_dynamism, question_prefix;
};

DatasetStats dataset_stats(const std::vector<QueryTask>& tasks);
json stats_to_json(const DatasetStats& s);
std::string stats_to_table(const DatasetStats& s);

}  // namespace lensrag
