#include "lensrag/evalharness.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <iterator>
#include <sstream>

#include "lensrag/answerer.hpp"
#include "lensrag/parallel.hpp"
#include "lensrag/retriever.hpp"
#include "lensrag/text_util.hpp"

namespace lensrag {

// ---------------------------------------------------------------------------
// Dataset

LoadedDataset load_dataset(const std::string& path) {
  LoadedDataset d;
  d.tasks = read_tasks_jsonl(path, &d.rejections);
  return d;
}

// ---------------------------------------------------------------------------
// Judging

void to_json(json& j, const Judgment& v) {
  j = json{{"task_id", v.task_id}, {"accuracy", v.accuracy}, {"judge_raw", v.judge_raw}};
  if (!v.flags.empty()) j["flags"] = v.flags;
}

void from_json(const json& j, Judgment& v) {
  v.task_id = j.at("task_id").get<std::string>();
  v.accuracy = j.at("accuracy").get<bool>();
  v.judge_raw = j.value("judge_raw", std::string{});
  v.flags = j.value("flags", std::vector<std::string>{});
}

std::vector<Judgment> read_judgments_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot read judgments " + path);
  std::vector<Judgment> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    out.push_back(json::parse(line).get<Judgment>());
  }
  return out;
}

void write_judgments_jsonl(const std::string& path, const std::vector<Judgment>& judgments) {
  std::string out;
  for (const auto& j : judgments) out += json(j).dump() + "\n";
  write_file(path, out);
}

ChatRequest evaluator_request(const PromptSet& prompts, const std::string& question, const std::string& gold,
                              const std::string& prediction) {
  return make_request("judge", prompts.render("evaluator_system", {}), nullptr,
                      prompts.render("evaluator_user", {{"query", question}, {"answer", gold}, {"prediction", prediction}}),
                      0.0);
}

std::optional<bool> parse_judge_reply(std::string_view reply) {
  const auto j = first_json_object(reply);
  if (!j || !j->contains("accuracy")) return std::nullopt;
  const auto& v = (*j)["accuracy"];
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = to_lower(trim(v.get<std::string>()));
    if (s == "true") return true;
    if (s == "false") return false;
  }
  return std::nullopt;
}

Judgment judge(const QueryTask& task, const AnswerRecord& record, ChatBackend& backend, const PromptSet& prompts) {
  if (!task.gold_answer) throw InvalidParams("task " + task.id + " has no gold answer");
  Judgment out;
  out.task_id = task.id;
  const ChatRequest req = evaluator_request(prompts, task.question, *task.gold_answer, record.answer);
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      out.judge_raw = backend.chat(req);
    } catch (const Error& e) {
      out.judge_raw = e.what();
      continue;
    }
    if (auto acc = parse_judge_reply(out.judge_raw)) {
      out.accuracy = *acc;
      return out;
    }
  }
  out.accuracy = false;
  out.flags.push_back("judge_parse_failure");
  return out;
}

std::vector<Judgment> judge_all(const std::vector<QueryTask>& tasks, const std::vector<AnswerRecord>& records,
                                ChatBackend& backend, int parallelism, const PromptSet& prompts) {
  std::map<std::string, const AnswerRecord*> by_id;
  for (const auto& r : records) by_id[r.task_id] = &r;
  std::vector<const QueryTask*> todo;
  for (const auto& t : tasks) {
    if (by_id.contains(t.id)) todo.push_back(&t);
  }
  std::vector<Judgment> out(todo.size());
  parallel_for(todo.size(), parallelism,
               [&](std::size_t i) { out[i] = judge(*todo[i], *by_id.at(todo[i]->id), backend, prompts); });
  return out;
}

// ---------------------------------------------------------------------------
// Reports

std::optional<double> Bucket::accuracy() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

std::string seeking_bucket(const AnswerRecord& r) {
  const bool img = r.count(ToolKind::ImageSearch) > 0;
  const bool txt = r.count(ToolKind::TextSearch) > 0;
  if (img && txt) return "Both";
  if (img) return "Image";
  if (txt) return "Text";
  return "None";
}

}  // namespace

EvalReport aggregate(const std::vector<Judgment>& judgments, const std::vector<QueryTask>& tasks,
                     const std::vector<AnswerRecord>& records, const std::string& run_label) {
  std::map<std::string, const Judgment*> jby;
  for (const auto& j : judgments) jby[j.task_id] = &j;
  std::map<std::string, const AnswerRecord*> rby;
  for (const auto& r : records) rby[r.task_id] = &r;

  EvalReport rep;
  rep.run_label = run_label;
  for (const char* dim : {"difficulty", "reasoning_steps", "information_seeking", "domain", "category", "dynamism", "hops"})
    rep.slices[dim];
  for (const auto& t : tasks) {
    auto jt = jby.find(t.id);
    if (jt == jby.end()) throw InvalidParams("no judgment for task " + t.id);
    auto rt = rby.find(t.id);
    if (rt == rby.end()) throw InvalidParams("no record for task " + t.id);
    const bool ok = jt->second->accuracy;
    const AnswerRecord& r = *rt->second;
    auto add = [&](const std::string& dim, const std::string& bucket) {
      Bucket& b = rep.slices[dim][bucket];
      ++b.total;
      b.correct += ok ? 1 : 0;
    };
    ++rep.overall.total;
    rep.overall.correct += ok ? 1 : 0;
    add("difficulty", std::string(to_string(t.difficulty)));
    add("reasoning_steps", t.hops >= 2 ? "multi-hop" : "single-hop");
    add("information_seeking", seeking_bucket(r));
    add("domain", t.domain_label.empty() ? "unlabeled" : t.domain_label);
    add("category", std::string(to_string(t.category)));
    add("dynamism", std::string(to_string(t.dynamism)));
    add("hops", std::to_string(t.hops));
    rep.search_calls += r.search_calls();
  }
  rep.mean_tool_usage = tasks.empty() ? 0.0 : static_cast<double>(rep.search_calls) / static_cast<double>(tasks.size());
  return rep;
}

double accuracy_gain(double run, double baseline) { return run - baseline; }

void apply_baseline(EvalReport& report, const EvalReport& baseline) {
  report.gain_vs_baseline = accuracy_gain(report.overall_accuracy(), baseline.overall_accuracy());
  report.baseline_label = baseline.run_label;
}

std::string format_accuracy(const Bucket& b) {
  const auto a = b.accuracy();
  return a ? format_fixed(round_half_up(*a, 2), 2) : "n/a";
}

std::string format_gain(double gain) {
  const double r = round_half_up(gain, 2);
  return (r >= 0 ? "+" : "") + format_fixed(r, 2);
}

namespace {

json bucket_json(const Bucket& b) {
  json j{{"correct", b.correct}, {"total", b.total}, {"accuracy_display", format_accuracy(b)}};
  if (auto a = b.accuracy()) j["accuracy"] = *a;
  else j["accuracy"] = nullptr;
  return j;
}

std::string pad(const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); }

std::string lpad(const std::string& s, std::size_t w) { return std::string(w > s.size() ? w - s.size() : 0, ' ') + s; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

json report_to_json(const EvalReport& r) {
  json j{{"run_label", r.run_label},
         {"overall", bucket_json(r.overall)},
         {"search_calls", r.search_calls},
         {"mean_tool_usage", r.mean_tool_usage},
         {"mean_tool_usage_display", format_fixed(round_half_up(r.mean_tool_usage, 2), 2)}};
  json slices = json::object();
  for (const auto& [dim, buckets] : r.slices) {
    json b = json::object();
    for (const auto& [name, bucket] : buckets) b[name] = bucket_json(bucket);
    slices[dim] = b;
  }
  j["slices"] = slices;
  if (r.gain_vs_baseline) {
    j["gain_vs_baseline"] = *r.gain_vs_baseline;
    j["gain_display"] = format_gain(*r.gain_vs_baseline);
    if (r.baseline_label) j["baseline"] = *r.baseline_label;
  }
  if (!r.config.is_null()) j["config"] = r.config;
  return j;
}

std::string report_to_table(const EvalReport& r) {
  std::vector<std::array<std::string, 5>> rows;
  rows.push_back({"dimension", "bucket", "correct", "total", "accuracy"});
  rows.push_back({"overall", "all", std::to_string(r.overall.correct), std::to_string(r.overall.total), format_accuracy(r.overall)});
  for (const auto& [dim, buckets] : r.slices) {
    for (const auto& [name, b] : buckets) rows.push_back({dim, name, std::to_string(b.correct), std::to_string(b.total), format_accuracy(b)});
  }
  std::array<std::size_t, 5> w{};
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < 5; ++i) w[i] = std::max(w[i], row[i].size());
  }
  std::ostringstream out;
  out << "run: " << r.run_label << "\n";
  out << "accuracy: " << format_accuracy(r.overall);
  if (r.gain_vs_baseline) out << " (" << format_gain(*r.gain_vs_baseline) << " vs " << r.baseline_label.value_or("baseline") << ")";
  out << "\nmean tool usage: " << format_fixed(round_half_up(r.mean_tool_usage, 2), 2) << "\n\n";
  for (const auto& row : rows) {
    out << pad(row[0], w[0]) << "  " << pad(row[1], w[1]) << "  " << lpad(row[2], w[2]) << "  " << lpad(row[3], w[3]) << "  "
        << lpad(row[4], w[4]) << "\n";
  }
  return out.str();
}

std::string report_to_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "run,dimension,bucket,correct,total,accuracy";
  if (r.gain_vs_baseline) out << ",gain_vs_baseline";
  out << "\n";
  auto line = [&](const std::string& dim, const std::string& bucket, const Bucket& b, bool with_gain) {
    out << csv_field(r.run_label) << "," << csv_field(dim) << "," << csv_field(bucket) << "," << b.correct << "," << b.total << ","
        << format_accuracy(b);
    if (r.gain_vs_baseline) out << "," << (with_gain ? format_gain(*r.gain_vs_baseline) : "");
    out << "\n";
  };
  line("overall", "all", r.overall, true);
  for (const auto& [dim, buckets] : r.slices) {
    for (const auto& [name, b] : buckets) line(dim, name, b, false);
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Baselines

std::string_view to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::Direct: return "Direct";
    case BaselineKind::TextRAG: return "TextRAG";
    case BaselineKind::ImageRAG: return "ImageRAG";
    case BaselineKind::MultimodalRAG: return "MultimodalRAG";
  }
  return "?";
}

BaselineKind parse_baseline_kind(std::string_view s) {
  const std::string k = normalize_query(s);
  std::string folded;
  for (char c : k) {
    if (std::isalnum(static_cast<unsigned char>(c))) folded.push_back(c);
  }
  if (folded == "direct") return BaselineKind::Direct;
  if (folded == "textrag" || folded == "text") return BaselineKind::TextRAG;
  if (folded == "imagerag" || folded == "image") return BaselineKind::ImageRAG;
  if (folded == "multimodalrag" || folded == "multimodal") return BaselineKind::MultimodalRAG;
  throw InvalidParams("unknown baseline kind: " + std::string(s));
}

namespace {

AnswerRecord baseline_record(BaselineKind kind, const QueryTask& task, PipelineContext& ctx, const std::string& base_dir) {
  const auto start = std::chrono::steady_clock::now();
  AnswerRecord rec;
  rec.task_id = task.id;
  Trace trace;
  try {
    bool resized = false;
    const ImageBuf img = ingest_image(resolve_path(base_dir, task.image), ctx.cfg, &resized);
    if (resized) trace.flag("resized");
    std::vector<SearchHit> hits;
    auto gather = [&](auto&& search) {
      try {
        auto h = search();
        hits.insert(hits.end(), h.begin(), h.end());
      } catch (const Error&) {
        trace.flag("search_failed");
      }
    };
    if (kind == BaselineKind::TextRAG || kind == BaselineKind::MultimodalRAG)
      gather([&] { return cached_text_search(ctx, task.question, trace); });
    if (kind == BaselineKind::ImageRAG || kind == BaselineKind::MultimodalRAG)
      gather([&] { return cached_image_search(ctx, img, trace); });

    std::string evidence;
    std::set<std::string> seen;
    int n = 0;
    for (const auto& h : hits) {
      if (!seen.insert(h.url).second) continue;
      rec.fetched_urls.push_back(h.url);
      std::string text = trim(h.snippet);
      if (text.empty()) {
        if (auto doc = fetch_document(ctx, h.url, trace)) {
          const auto spans = chunk_spans(doc->body, ctx.cfg.chunk_size_chars, ctx.cfg.chunk_overlap_chars);
          if (!spans.empty()) text = spans.front().text;
        }
      }
      if (text.empty()) continue;
      if (!evidence.empty()) evidence += "\n\n";
      evidence += "[" + std::to_string(++n) + "] (source: " + h.url + ")\n" + text;
    }

    ChatRequest req;
    ToolKind call_kind = ToolKind::RagAnswer;
    if (kind == BaselineKind::Direct) {
      call_kind = ToolKind::DirectAnswer;
      req = make_request("vqa", ctx.prompts.render("vqa_system", {}), &img,
                         ctx.prompts.render("vqa_user", {{"query", task.question}}), ctx.cfg.temperature);
    } else if (evidence.empty()) {
      trace.flag("empty_context");
      req = make_request("vqa", ctx.prompts.render("vqa_system", {}), &img,
                         ctx.prompts.render("vqa_user", {{"query", task.question}}), ctx.cfg.temperature);
    } else {
      req = make_request("baseline_rag", ctx.prompts.render("vqa_system", {}), &img,
                         ctx.prompts.render("heuristic_rag_user", {{"query", task.question}, {"evidence", evidence}}),
                         ctx.cfg.temperature);
    }
    const std::string reply =
        traced(trace, call_kind, prompt_digest(req), [&](ToolCall&) { return chat_with_retries(ctx, req); });
    rec.answer = trim(reply);
  } catch (const Error& e) {
    rec.error = e.what();
  }
  rec.tool_calls = std::move(trace.calls);
  rec.flags = std::move(trace.flags);
  rec.mode = rec.search_calls() > 0 ? AnswerMode::Retrieved : AnswerMode::Direct;
  if (rec.mode == AnswerMode::Direct) rec.fetched_urls.clear();
  rec.wall_time_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace

std::vector<AnswerRecord> run_baseline(BaselineKind kind, const std::vector<QueryTask>& tasks, PipelineContext& ctx,
                                       const std::string& base_dir) {
  std::vector<AnswerRecord> out(tasks.size());
  parallel_for(tasks.size(), ctx.cfg.parallelism,
               [&](std::size_t i) { out[i] = baseline_record(kind, tasks[i], ctx, base_dir); });
  return out;
}

// ---------------------------------------------------------------------------
// Ablations

std::vector<AblationSetting> ablation_settings(const PipelineConfig& base) {
  auto make = [&](RetrievalMode mode, std::set<Branch> branches, bool detector, bool decoupler) {
    PipelineConfig c = base;
    c.retrieval_mode = mode;
    c.branches = std::move(branches);
    c.use_object_detector = detector;
    c.use_query_decoupler = decoupler;
    return c;
  };
  const std::set<Branch> img{Branch::Visual}, txt{Branch::Textual}, both{Branch::Visual, Branch::Textual};
  using M = RetrievalMode;
  return {
      {"", "Full system", make(M::DemandAdaptive, both, true, true)},
      {"A", "w/o Search", make(M::None, both, true, true)},
      {"B", "Image Only (w/o Object Detector)", make(M::Mandatory, img, false, false)},
      {"B", "Text Only (w/o Query Decoupler)", make(M::Mandatory, txt, false, false)},
      {"B", "Image + Text (w Object Detector + w Query Decoupler)", make(M::Mandatory, both, true, true)},
      {"B", "Image + Text (w/o Object Detector + w/o Query Decoupler)", make(M::Mandatory, both, false, false)},
      {"C", "Image Only (w Object Detector)", make(M::DemandAdaptive, img, true, false)},
      {"C", "Image Only (w/o Object Detector)", make(M::DemandAdaptive, img, false, false)},
      {"C", "Text Only (w Query Decoupler)", make(M::DemandAdaptive, txt, false, true)},
      {"C", "Text Only (w/o Query Decoupler)", make(M::DemandAdaptive, txt, false, false)},
      {"C", "Image + Text (w Object Detector + w/o Query Decoupler)", make(M::DemandAdaptive, both, true, false)},
      {"C", "Image + Text (w/o Object Detector + w Query Decoupler)", make(M::DemandAdaptive, both, false, true)},
  };
}

std::vector<AblationRow> run_ablations(const std::vector<QueryTask>& tasks, PipelineContext& ctx, ChatBackend& judge_backend,
                                       const std::string& base_dir) {
  std::vector<AblationRow> rows;
  for (auto& setting : ablation_settings(ctx.cfg)) {
    PipelineContext sub{validated(setting.config), ctx.backends, ctx.cache, ctx.prompts};
    AblationRow row;
    row.records = answer_all(tasks, sub, base_dir);
    const auto judgments = judge_all(tasks, row.records, judge_backend, sub.cfg.parallelism, ctx.prompts);
    row.report = aggregate(judgments, tasks, row.records, setting.name);
    row.report.config = json(setting.config);
    row.setting = std::move(setting);
    rows.push_back(std::move(row));
  }
  const double full = rows.front().report.overall_accuracy();
  for (auto& r : rows) r.decline = full - r.report.overall_accuracy();
  return rows;
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::size_t w = std::string("Setting").size();
  for (const auto& r : rows) w = std::max(w, r.setting.name.size() + 4);
  std::ostringstream out;
  out << pad("Setting", w) << "  " << lpad("All", 7) << "  " << lpad("Decline", 7) << "\n";
  std::string group = "-";
  for (const auto& r : rows) {
    if (r.setting.group != group) {
      group = r.setting.group;
      if (group == "A") out << "A. No Retrieval\n";
      if (group == "B") out << "B. Mandatory Retrieval\n";
      if (group == "C") out << "C. Demand-Adaptive Retrieval\n";
    }
    const std::string name = (r.setting.group.empty() ? "" : "    ") + r.setting.name;
    const std::string decline = r.setting.group.empty() ? "--" : format_fixed(round_half_up(r.decline, 2), 2);
    out << pad(name, w) << "  " << lpad(format_accuracy(r.report.overall), 7) << "  " << lpad(decline, 7) << "\n";
  }
  return out.str();
}

json ablation_json(const std::vector<AblationRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json j{{"group", r.setting.group}, {"setting", r.setting.name}, {"report", report_to_json(r.report)}};
    if (!r.setting.group.empty()) {
      j["decline"] = r.decline;
      j["decline_display"] = format_fixed(round_half_up(r.decline, 2), 2);
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Analysis

double overlap(const std::vector<Judgment>& a, const std::vector<Judgment>& b) {
  std::map<std::string, bool> ma, mb;
  for (const auto& j : a) ma[j.task_id] = j.accuracy;
  for (const auto& j : b) mb[j.task_id] = j.accuracy;
  if (ma.size() != mb.size() ||
      !std::equal(ma.begin(), ma.end(), mb.begin(), [](const auto& x, const auto& y) { return x.first == y.first; }))
    throw DisjointTaskSets("runs judged different task sets");
  std::size_t inter = 0, uni = 0;
  for (const auto& [id, ok] : ma) {
    const bool other = mb.at(id);
    inter += ok && other ? 1 : 0;
    uni += ok || other ? 1 : 0;
  }
  if (uni == 0) return 100.0;
  return 100.0 * static_cast<double>(inter) / static_cast<double>(uni);
}

std::string_view to_string(ErrorType t) {
  switch (t) {
    case ErrorType::None: return "None";
    case ErrorType::RetrievalDemand: return "RetrievalDemand";
    case ErrorType::ToolInvocation: return "ToolInvocation";
    case ErrorType::QueryDecoupling: return "QueryDecoupling";
    case ErrorType::ObjectDetection: return "ObjectDetection";
  }
  return "?";
}

ErrorLabel classify_error(const QueryTask& task, const AnswerRecord& record, const Judgment& judgment) {
  ErrorLabel label{task.id, ErrorType::None, false};
  if (judgment.accuracy) return label;
  if (!task.search_log) throw MissingAnnotation("task " + task.id + " has no search log");
  const auto& log = *task.search_log;

  std::set<SearchTool> annotated, used;
  std::size_t text_hops = 0;
  for (const auto& h : log) {
    annotated.insert(h.tool);
    text_hops += h.tool == SearchTool::TextSearch ? 1 : 0;
  }
  if (record.count(ToolKind::ImageSearch) > 0) used.insert(SearchTool::ImageSearch);
  if (record.count(ToolKind::TextSearch) > 0) used.insert(SearchTool::TextSearch);

  if (!used.empty() && annotated.empty()) {
    label.type = ErrorType::RetrievalDemand;
    return label;
  }
  if (used != annotated) {
    label.type = ErrorType::ToolInvocation;
    return label;
  }
  if (log.size() >= 2 && record.sub_queries.size() < text_hops) {
    label.type = ErrorType::QueryDecoupling;
    return label;
  }
  if (annotated.contains(SearchTool::ImageSearch)) {
    std::set<std::string> subject;
    for (const auto& h : log) {
      for (auto& t : content_tokens(h.sub_question)) subject.insert(std::move(t));
    }
    bool match = false;
    for (const auto& box : record.detected_regions) {
      for (const auto& t : content_tokens(box.label)) match = match || subject.contains(t);
    }
    if (!match) {
      label.type = ErrorType::ObjectDetection;
      return label;
    }
  }
  label.type = ErrorType::ToolInvocation;
  label.low_confidence = true;
  return label;
}

DatasetStats dataset_stats(const std::vector<QueryTask>& tasks) {
  DatasetStats s;
  s.total = tasks.size();
  std::size_t hops = 0, qwords = 0, awords = 0, answered = 0;
  for (const auto& t : tasks) {
    (t.hops >= 2 ? s.multi_hop : s.single_hop) += 1;
    hops += static_cast<std::size_t>(t.hops);
    const auto words = [](const std::string& x) {
      std::istringstream in(x);
      return static_cast<std::size_t>(std::distance(std::istream_iterator<std::string>(in), std::istream_iterator<std::string>()));
    };
    qwords += words(t.question);
    if (t.gold_answer) {
      awords += words(*t.gold_answer);
      ++answered;
    }
    if (t.search_log) s.tool_usage += t.search_log->size();
    ++s.by_glasses[t.glasses.empty() ? "unknown" : t.glasses];
    ++s.by_domain[t.domain_label.empty() ? "unlabeled" : t.domain_label];
    ++s.by_category[std::string(to_string(t.category))];
    ++s.by_difficulty[std::string(to_string(t.difficulty))];
    ++s.by_dynamism[std::string(to_string(t.dynamism))];
    const auto toks = tokenize(t.question);
    ++s.question_prefix[toks.empty() ? "" : toks.front()];
  }
  if (s.total) {
    const double n = static_cast<double>(s.total);
    s.mean_hops = static_cast<double>(hops) / n;
    s.mean_question_words = static_cast<double>(qwords) / n;
    s.mean_tool_usage = static_cast<double>(s.tool_usage) / n;
  }
  if (answered) s.mean_answer_words = static_cast<double>(awords) / static_cast<double>(answered);
  return s;
}

json stats_to_json(const DatasetStats& s) {
  return json{{"total", s.total},
              {"single_hop", s.single_hop},
              {"multi_hop", s.multi_hop},
              {"mean_hops", s.mean_hops},
              {"mean_question_words", s.mean_question_words},
              {"mean_answer_words", s.mean_answer_words},
              {"tool_usage", s.tool_usage},
              {"mean_tool_usage", s.mean_tool_usage},
              {"by_glasses", s.by_glasses},
              {"by_domain", s.by_domain},
              {"by_category", s.by_category},
              {"by_difficulty", s.by_difficulty},
              {"by_dynamism", s.by_dynamism},
              {"question_prefix", s.question_prefix}};
}

std::string stats_to_table(const DatasetStats& s) {
  std::ostringstream out;
  auto num = [](double v) { return format_fixed(round_half_up(v, 2), 2); };
  out << "total questions        " << s.total << "\n"
      << "single-hop questions   " << s.single_hop << "\n"
      << "multi-hop questions    " << s.multi_hop << "\n"
      << "mean hops              " << num(s.mean_hops) << "\n"
      << "mean tool usage        " << num(s.mean_tool_usage) << "\n"
      << "mean question words    " << num(s.mean_question_words) << "\n"
      << "mean answer words      " << num(s.mean_answer_words) << "\n";
  auto section = [&](const char* title, const std::map<std::string, std::size_t>& m) {
    out << "\n" << title << "\n";
    std::size_t w = 0;
    for (const auto& [k, v] : m) w = std::max(w, k.size());
    for (const auto& [k, v] : m) out << "  " << pad(k, w) << "  " << v << "\n";
  };
  section("glasses", s.by_glasses);
  section("domain", s.by_domain);
  section("category", s.by_category);
  section("difficulty", s.by_difficulty);
  section("dynamism", s.by_dynamism);
  section("question prefix", s.question_prefix);
  return out.str();
}

}  // namespace lensrag
