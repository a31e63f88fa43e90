#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lensrag/media.hpp"
#include "lensrag/pipeline.hpp"

namespace lensrag {

inline constexpr std::string_view kNoKnowledgeSentinel = "I have no knowledge about";

struct Answered {
  std::string reasoning;
  std::string answer;
};

struct NeedsRetrieval {
  std::string lacking_knowledge;
};

struct DirectOutcome {
  std::variant<Answered, NeedsRetrieval> kind;
  std::string raw;  // the model's reply

  bool answered() const { return std::holds_alternative<Answered>(kind); }
};

/// Interprets a direct-answer reply. The sentinel wins over any JSON answer;
/// the lacking clause runs to the end of its sentence.
DirectOutcome parse_direct_reply(std::string_view reply);

/// Classifies the question into the configured taxonomy; anything else,
/// including failures, yields "Other".
std::string route_domain(PipelineContext& ctx, const ImageBuf& img, const std::string& question, Trace& trace);

/// Throws BackendUnavailable when the chat backend is lost.
DirectOutcome direct_answer(PipelineContext& ctx, const ImageBuf& img, const std::string& question,
                            const std::optional<std::string>& location, const std::string& domain, Trace& trace);

/// Answer synthesis from selected chunks. With no chunks the plain VQA prompt
/// is used and `empty_context` is flagged.
Answered rag_answer(PipelineContext& ctx, const ImageBuf& img, const std::string& question,
                    const std::optional<std::string>& location, const std::string& domain,
                    const std::vector<EvidenceChunk>& chunks, Trace& trace);

/// End-to-end processing of one task. Relative image paths resolve against
/// `base_dir`. Never throws for task-level failures; they land in
/// AnswerRecord::error.
AnswerRecord answer_task(const QueryTask& task, PipelineContext& ctx, const std::string& base_dir = ".");

/// Same as answer_task for an already loaded image.
AnswerRecord answer_image(const std::string& task_id, const ImageBuf& image, const std::string& question,
                          const std::optional<std::string>& location, PipelineContext& ctx);

/// Runs answer_task over all tasks with up to cfg.parallelism workers;
/// output order follows input order.
std::vector<AnswerRecord> answer_all(const std::vector<QueryTask>& tasks, PipelineContext& ctx,
                                     const std::string& base_dir = ".");

/// Reads an image and resizes it to the configured shortest edge.
ImageBuf ingest_image(const std::string& path, const PipelineConfig& cfg, bool* resized = nullptr);

/// Joins a possibly relative path onto base_dir.
std::string resolve_path(const std::string& base_dir, const std::string& path);

}  // namespace lensrag
