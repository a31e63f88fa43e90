#include "lensrag/answerer.hpp"

#include <filesystem>

#include "lensrag/parallel.hpp"
#include "lensrag/retriever.hpp"
#include "lensrag/text_util.hpp"

namespace lensrag {

namespace {

std::string json_text(const json& v) {
  if (v.is_string()) return trim(v.get<std::string>());
  if (v.is_null()) return {};
  return v.dump();
}

std::string location_line(const std::optional<std::string>& location) {
  if (!location || trim(*location).empty()) return {};
  return "Image metadata: The location of the image is " + trim(*location) + ".";
}

std::string guidelines_for(const PipelineConfig& cfg, const std::string& domain) {
  auto it = cfg.domain_guidelines.find(domain);
  return it == cfg.domain_guidelines.end() ? std::string{} : it->second;
}

// Reasoning/answer pair from a JSON reply, if it has a nonempty answer.
std::optional<Answered> parse_answer_json(std::string_view reply) {
  for (const auto& j : extract_json_objects(reply)) {
    if (!j.contains("answer")) continue;
    Answered a{j.contains("reasoning") ? json_text(j["reasoning"]) : std::string{}, json_text(j["answer"])};
    if (!a.answer.empty()) return a;
  }
  return std::nullopt;
}

}  // namespace

DirectOutcome parse_direct_reply(std::string_view reply) {
  DirectOutcome out;
  out.raw = std::string(reply);
  const std::size_t at = find_icase(reply, kNoKnowledgeSentinel);
  if (at != std::string_view::npos) {
    std::string_view rest = reply.substr(at + kNoKnowledgeSentinel.size());
    const std::size_t end = rest.find_first_of(".!?\n\"");
    if (end != std::string_view::npos) rest = rest.substr(0, end);
    std::string clause = trim(rest);
    while (!clause.empty() && (clause.front() == '<' || clause.front() == '\'')) clause.erase(clause.begin());
    while (!clause.empty() && (clause.back() == '>' || clause.back() == '\'')) clause.pop_back();
    out.kind = NeedsRetrieval{trim(clause)};
    return out;
  }
  if (auto a = parse_answer_json(reply)) {
    out.kind = *a;
    return out;
  }
  out.kind = NeedsRetrieval{"unparseable direct response"};
  return out;
}

std::string route_domain(PipelineContext& ctx, const ImageBuf& img, const std::string& question, Trace& trace) {
  const auto& cfg = ctx.cfg;
  std::string list, descriptions;
  for (const auto& d : cfg.domains) {
    if (!list.empty()) list += ", ";
    list += "\"" + d + "\"";
    if (auto it = cfg.domain_descriptions.find(d); it != cfg.domain_descriptions.end()) {
      descriptions += "- " + d + ": " + it->second + "\n";
    }
  }
  if (!descriptions.empty()) descriptions.pop_back();
  const std::string system =
      ctx.prompts.render("domain_router_system", {{"domain_list", list}, {"domain_descriptions", descriptions}});
  const std::string user = ctx.prompts.render("domain_router_user", {{"query", question}});
  const ChatRequest req = make_request("domain_route", system, &img, user, cfg.temperature);
  std::string reply;
  try {
    reply = traced(trace, ToolKind::DomainRoute, prompt_digest(req), [&](ToolCall&) { return chat_with_retries(ctx, req); });
  } catch (const Error&) {
    trace.flag("domain_route_failed");
    return "Other";
  }
  const auto j = first_json_object(reply);
  if (!j || !j->contains("domain") || !(*j)["domain"].is_string()) return "Other";
  const std::string label = normalize_query((*j)["domain"].get<std::string>());
  for (const auto& d : cfg.domains) {
    if (normalize_query(d) == label) return d;
  }
  return "Other";
}

DirectOutcome direct_answer(PipelineContext& ctx, const ImageBuf& img, const std::string& question,
                            const std::optional<std::string>& location, const std::string& domain, Trace& trace) {
  const std::string system =
      ctx.prompts.render("direct_answer_system", {{"domain_guidelines", guidelines_for(ctx.cfg, domain)}});
  const std::string user =
      ctx.prompts.render("direct_answer_user", {{"query", question}, {"location_line", location_line(location)}});
  const ChatRequest req = make_request("direct_answer", system, &img, user, ctx.cfg.temperature);
  const std::string reply =
      traced(trace, ToolKind::DirectAnswer, prompt_digest(req), [&](ToolCall&) { return chat_with_retries(ctx, req); });
  return parse_direct_reply(reply);
}

Answered rag_answer(PipelineContext& ctx, const ImageBuf& img, const std::string& question,
                    const std::optional<std::string>& location, const std::string& domain,
                    const std::vector<EvidenceChunk>& chunks, Trace& trace) {
  ChatRequest req;
  if (chunks.empty()) {
    trace.flag("empty_context");
    req = make_request("vqa", ctx.prompts.render("vqa_system", {}), &img,
                       ctx.prompts.render("vqa_user", {{"query", question}}), ctx.cfg.temperature);
  } else {
    std::string evidence;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      if (i) evidence += "\n\n";
      evidence += "[" + std::to_string(i + 1) + "] (source: " + chunks[i].source_url + ")\n" + chunks[i].text;
    }
    const std::string system =
        ctx.prompts.render("rag_answer_system", {{"domain_guidelines", guidelines_for(ctx.cfg, domain)}});
    const std::string user = ctx.prompts.render(
        "rag_answer_user", {{"query", question}, {"location_line", location_line(location)}, {"evidence", evidence}});
    req = make_request("rag_answer", system, &img, user, ctx.cfg.temperature);
  }
  const std::string reply = traced(trace, ToolKind::RagAnswer, prompt_digest(req), [&](ToolCall& c) {
    if (chunks.empty()) c.note = "empty_context";
    return chat_with_retries(ctx, req);
  });
  if (auto a = parse_answer_json(reply)) return *a;
  if (!chunks.empty()) trace.flag("rag_parse_failure");
  return Answered{{}, trim(reply)};
}

AnswerRecord answer_image(const std::string& task_id, const ImageBuf& image, const std::string& question,
                          const std::optional<std::string>& location, PipelineContext& ctx) {
  const auto start = std::chrono::steady_clock::now();
  AnswerRecord rec;
  rec.task_id = task_id;
  Trace trace;
  const auto mode = ctx.cfg.retrieval_mode;
  try {
    rec.predicted_domain = route_domain(ctx, image, question, trace);
    std::optional<std::string> lacking;
    bool retrieve_now = mode == RetrievalMode::Mandatory;
    if (mode != RetrievalMode::Mandatory) {
      const DirectOutcome direct = direct_answer(ctx, image, question, location, rec.predicted_domain, trace);
      if (const auto* a = std::get_if<Answered>(&direct.kind)) {
        rec.reasoning = a->reasoning;
        rec.answer = a->answer;
      } else if (mode == RetrievalMode::None) {
        rec.answer = trim(direct.raw);
        trace.flag("unanswered_without_retrieval");
      } else {
        lacking = std::get<NeedsRetrieval>(direct.kind).lacking_knowledge;
        retrieve_now = true;
      }
    }
    if (retrieve_now) {
      const RetrievalPlan plan = route_search(ctx, image, question, lacking, trace);
      rec.plan = plan;
      RetrievalResult r = retrieve(ctx, image, question, plan, trace);
      rec.sub_queries = std::move(r.sub_queries);
      rec.detected_regions = std::move(r.regions);
      rec.fetched_urls = std::move(r.urls);
      rec.selected_chunks = std::move(r.selected);
      const Answered a = rag_answer(ctx, image, question, location, rec.predicted_domain, rec.selected_chunks, trace);
      rec.reasoning = a.reasoning;
      rec.answer = a.answer;
    }
  } catch (const Error& e) {
    rec.error = e.what();
  }
  rec.tool_calls = std::move(trace.calls);
  rec.flags = std::move(trace.flags);
  rec.mode = rec.search_calls() > 0 ? AnswerMode::Retrieved : AnswerMode::Direct;
  rec.wall_time_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

ImageBuf ingest_image(const std::string& path, const PipelineConfig& cfg, bool* resized) {
  const ImageBuf original = load_image(path);
  ImageBuf out = resize_shortest_edge(original, cfg.shortest_edge);
  if (resized) *resized = out.width() != original.width() || out.height() != original.height();
  return out;
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (std::filesystem::path(base_dir) / p).string();
}

AnswerRecord answer_task(const QueryTask& task, PipelineContext& ctx, const std::string& base_dir) {
  bool resized = false;
  std::optional<ImageBuf> img;
  try {
    img = ingest_image(resolve_path(base_dir, task.image), ctx.cfg, &resized);
  } catch (const Error& e) {
    AnswerRecord rec;
    rec.task_id = task.id;
    rec.error = e.what();
    return rec;
  }
  AnswerRecord rec = answer_image(task.id, *img, task.question, task.location, ctx);
  if (resized) rec.flags.insert(rec.flags.begin(), "resized");
  return rec;
}

std::vector<AnswerRecord> answer_all(const std::vector<QueryTask>& tasks, PipelineContext& ctx,
                                     const std::string& base_dir) {
  std::vector<AnswerRecord> out(tasks.size());
  parallel_for(tasks.size(), ctx.cfg.parallelism, [&](std::size_t i) { out[i] = answer_task(tasks[i], ctx, base_dir); });
  return out;
}

}  // namespace lensrag
