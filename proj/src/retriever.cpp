#include "lensrag/retriever.hpp"

#include <future>
#include <set>

#include "lensrag/parallel.hpp"
#include "lensrag/rerank.hpp"
#include "lensrag/text_util.hpp"

namespace lensrag {

namespace {

std::vector<std::string> string_list(const json& obj, const char* key) {
  std::vector<std::string> out;
  if (!obj.contains(key) || !obj[key].is_array()) return out;
  for (const auto& v : obj[key]) {
    if (!v.is_string()) continue;
    std::string s = trim(v.get<std::string>());
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

void dedup(std::vector<std::string>& items) {
  std::set<std::string> seen;
  std::erase_if(items, [&](const std::string& s) { return !seen.insert(normalize_query(s)).second; });
}

bool cap(std::vector<std::string>& items, int limit) {
  if (items.size() <= static_cast<std::size_t>(limit)) return false;
  items.resize(static_cast<std::size_t>(limit));
  return true;
}

template <class F>
std::vector<SearchHit> cached_search(PipelineContext& ctx, Trace& trace, ToolKind kind, const std::string& key, F&& fn) {
  return traced(trace, kind, sha256_hex(key), [&](ToolCall& call) {
    bool hit = false;
    auto hits = ctx.cache->l1_get_or_search(
        key, [&] { return with_retries(ctx.cfg.backend_retries, fn); }, &hit);
    call.cache_hit = hit;
    return hits;
  });
}

struct BranchOut {
  Trace trace;
  std::vector<SearchHit> hits;
  std::vector<BBox> regions;
  std::vector<std::string> sub_queries;
};

template <class Item, class Search>
void search_all(PipelineContext& ctx, const std::vector<Item>& items, BranchOut& out, Search&& search) {
  std::vector<Trace> traces(items.size());
  std::vector<std::vector<SearchHit>> hits(items.size());
  parallel_for(items.size(), ctx.cfg.parallelism, [&](std::size_t i) {
    try {
      hits[i] = search(items[i], traces[i]);
    } catch (const Error&) {
      traces[i].flag("search_failed");
    }
  });
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.trace.append(traces[i]);
    out.hits.insert(out.hits.end(), hits[i].begin(), hits[i].end());
  }
}

BranchOut run_visual(PipelineContext& ctx, const ImageBuf& img, const RetrievalPlan& plan) {
  BranchOut out;
  std::vector<GroundedRegion> regions;
  if (plan.objects.empty()) {
    out.trace.flag("visual_full_frame");
    regions.push_back(GroundedRegion{"", BBox{0, 0, img.width(), img.height(), "", 0.0}, img, false});
  } else {
    regions = ground_objects(ctx, img, plan.objects, out.trace);
  }
  for (const auto& r : regions) out.regions.push_back(r.box);
  search_all(ctx, regions, out, [&](const GroundedRegion& r, Trace& t) { return cached_image_search(ctx, r.image, t); });
  return out;
}

std::vector<std::string> sub_queries_for(PipelineContext& ctx, const std::string& question, const RetrievalPlan& plan,
                                         Trace& trace) {
  std::vector<std::string> queries = plan.queries;
  if (queries.empty()) {
    trace.flag("textual_question_fallback");
    queries.push_back(question);
  }
  std::vector<std::string> subs;
  if (ctx.cfg.use_query_decoupler) {
    for (const auto& q : queries) {
      auto parts = decouple(ctx, q, trace);
      subs.insert(subs.end(), parts.begin(), parts.end());
    }
  } else {
    subs = queries;
  }
  dedup(subs);
  if (cap(subs, ctx.cfg.max_subqueries)) trace.flag("subqueries_truncated");
  return subs;
}

BranchOut run_textual(PipelineContext& ctx, const std::string& question, const RetrievalPlan& plan) {
  BranchOut out;
  out.sub_queries = sub_queries_for(ctx, question, plan, out.trace);
  search_all(ctx, out.sub_queries, out, [&](const std::string& q, Trace& t) { return cached_text_search(ctx, q, t); });
  return out;
}

struct Branches {
  std::optional<BranchOut> visual;
  std::optional<BranchOut> textual;
};

Branches run_branches(PipelineContext& ctx, const ImageBuf& img, const std::string& question, const RetrievalPlan& plan) {
  const bool vis_on = ctx.cfg.branch_enabled(Branch::Visual);
  const bool txt_on = ctx.cfg.branch_enabled(Branch::Textual);
  // An enabled branch with nothing to look up is skipped unless it is the
  // only one, in which case it falls back to the full frame or the question.
  const bool do_vis = vis_on && (!plan.objects.empty() || !txt_on || plan.queries.empty());
  const bool do_txt = txt_on && (!plan.queries.empty() || !do_vis);
  Branches b;
  if (do_vis && do_txt && ctx.cfg.parallelism > 1) {
    auto vis = std::async(std::launch::async, [&] { return run_visual(ctx, img, plan); });
    b.textual = run_textual(ctx, question, plan);
    b.visual = vis.get();
  } else {
    if (do_vis) b.visual = run_visual(ctx, img, plan);
    if (do_txt) b.textual = run_textual(ctx, question, plan);
  }
  return b;
}

struct UrlSource {
  std::string url;
  Branch branch;
};

std::vector<UrlSource> merge_urls(const Branches& b) {
  std::vector<UrlSource> out;
  std::set<std::string> seen;
  auto add = [&](const std::optional<BranchOut>& br, Branch kind) {
    if (!br) return;
    for (const auto& h : br->hits) {
      if (seen.insert(h.url).second) out.push_back({h.url, kind});
    }
  };
  add(b.visual, Branch::Visual);
  add(b.textual, Branch::Textual);
  return out;
}

}  // namespace

std::optional<CleanDoc> fetch_document(PipelineContext& ctx, const std::string& url, Trace& trace) {
  const std::string digest = sha256_hex(url);
  ToolCall fetch{ToolKind::PageFetch, digest, false, 0, true, {}};
  ToolCall parse{ToolKind::PageParse, digest, false, 0, true, {}};
  bool fetched = false;
  bool hit = false;
  std::optional<CleanDoc> doc;
  try {
    doc = ctx.cache->l2_get_or_parse(
        url,
        [&] {
          auto t0 = std::chrono::steady_clock::now();
          const std::string raw =
              with_retries(ctx.cfg.fetch_retries, [&] { return ctx.backends.fetcher->fetch_page(url); });
          auto t1 = std::chrono::steady_clock::now();
          fetched = true;
          fetch.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
          CleanDoc d = ctx.backends.reader->read(raw, url);
          parse.duration_ms =
              std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t1).count();
          return d;
        },
        &hit);
  } catch (const Error& e) {
    (fetched ? parse : fetch).ok = false;
    (fetched ? parse : fetch).note = e.what();
    trace.flag("page_error");
  }
  fetch.cache_hit = parse.cache_hit = hit;
  trace.calls.push_back(fetch);
  if (fetch.ok) trace.calls.push_back(parse);
  return doc;
}

std::vector<SearchHit> cached_text_search(PipelineContext& ctx, const std::string& query, Trace& trace) {
  if (!ctx.backends.search) throw BackendUnavailable("no search backend configured");
  return cached_search(ctx, trace, ToolKind::TextSearch, TwoLayerCache::text_key(query),
                       [&] { return ctx.backends.search->text_search(query, ctx.cfg.top_n_pages); });
}

std::vector<SearchHit> cached_image_search(PipelineContext& ctx, const ImageBuf& img, Trace& trace) {
  if (!ctx.backends.search) throw BackendUnavailable("no search backend configured");
  return cached_search(ctx, trace, ToolKind::ImageSearch, TwoLayerCache::image_key(img),
                       [&] { return ctx.backends.search->image_search(img, ctx.cfg.top_n_pages); });
}

RetrievalPlan route_search(PipelineContext& ctx, const ImageBuf& img, const std::string& question,
                           const std::optional<std::string>& lacking, Trace& trace) {
  const auto& cfg = ctx.cfg;
  const std::string system = ctx.prompts.render(
      "search_router_system",
      {{"max_objects", std::to_string(cfg.max_objects)}, {"max_subqueries", std::to_string(cfg.max_subqueries)}});
  const std::string user = ctx.prompts.render(
      "search_router_user",
      {{"query", question}, {"lacking_line", lacking && !lacking->empty() ? "Missing knowledge: " + *lacking + "." : ""}});
  const ChatRequest req = make_request("search_route", system, &img, user, cfg.temperature);
  const RetrievalPlan fallback{{}, {question}};
  std::string reply;
  try {
    reply = traced(trace, ToolKind::SearchRoute, prompt_digest(req), [&](ToolCall&) { return chat_with_retries(ctx, req); });
  } catch (const Error&) {
    trace.flag("router_fallback");
    return fallback;
  }
  const auto j = first_json_object(reply);
  if (!j || !((j->contains("objects") && (*j)["objects"].is_array()) || (j->contains("queries") && (*j)["queries"].is_array()))) {
    trace.flag("router_fallback");
    return fallback;
  }
  RetrievalPlan plan{string_list(*j, "objects"), string_list(*j, "queries")};
  dedup(plan.objects);
  dedup(plan.queries);
  const bool t1 = cap(plan.objects, cfg.max_objects);
  const bool t2 = cap(plan.queries, cfg.max_subqueries);
  if (t1 || t2) trace.flag("router_truncated");
  if (plan.empty()) {
    trace.flag("router_fallback");
    return fallback;
  }
  return plan;
}

std::vector<std::string> decouple(PipelineContext& ctx, const std::string& query, Trace& trace) {
  const std::string system =
      ctx.prompts.render("query_decoupler_system", {{"max_subqueries", std::to_string(ctx.cfg.max_subqueries)}});
  const std::string user = ctx.prompts.render("query_decoupler_user", {{"query", query}});
  const ChatRequest req = make_request("query_decouple", system, nullptr, user, ctx.cfg.temperature);
  std::string reply;
  try {
    reply = traced(trace, ToolKind::QueryDecouple, prompt_digest(req), [&](ToolCall&) { return chat_with_retries(ctx, req); });
  } catch (const Error&) {
    trace.flag("decoupler_fallback");
    return {query};
  }
  const auto j = first_json_object(reply);
  std::vector<std::string> subs = j ? string_list(*j, "sub_queries") : std::vector<std::string>{};
  if (subs.empty()) {
    trace.flag("decoupler_fallback");
    return {query};
  }
  dedup(subs);
  if (cap(subs, ctx.cfg.max_subqueries)) trace.flag("subqueries_truncated");
  return subs;
}

std::vector<GroundedRegion> ground_objects(PipelineContext& ctx, const ImageBuf& img,
                                           const std::vector<std::string>& objects, Trace& trace) {
  const BBox frame{0, 0, img.width(), img.height(), "", 0.0};
  std::vector<GroundedRegion> out;
  for (const auto& label : objects) {
    BBox full = frame;
    full.label = label;
    if (!ctx.cfg.use_object_detector || !ctx.backends.detector) {
      trace.flag("detector_disabled");
      out.push_back({label, full, img, false});
      continue;
    }
    std::vector<BBox> boxes;
    try {
      boxes = traced(trace, ToolKind::ObjectDetect, sha256_hex(image_key(img) + "\x1f" + label), [&](ToolCall&) {
        return with_retries(ctx.cfg.backend_retries, [&] { return ctx.backends.detector->detect(img, label); });
      });
    } catch (const Error&) {
      trace.flag("detector_failed:" + label);
      out.push_back({label, full, img, false});
      continue;
    }
    if (boxes.empty()) {
      trace.flag("no_detection:" + label);
      out.push_back({label, full, img, false});
      continue;
    }
    BBox box = clamp_box(boxes.front(), img.width(), img.height());
    box.label = label;
    try {
      out.push_back({label, box, crop(img, box), true});
    } catch (const EmptyRegion&) {
      trace.flag("no_detection:" + label);
      out.push_back({label, full, img, false});
    }
  }
  return out;
}

RetrievalResult retrieve(PipelineContext& ctx, const ImageBuf& img, const std::string& question,
                         const RetrievalPlan& plan, Trace& trace) {
  const auto& cfg = ctx.cfg;
  RetrievalResult result;
  Branches branches = run_branches(ctx, img, question, plan);
  for (auto* br : {&branches.visual, &branches.textual}) {
    if (!*br) continue;
    trace.append((*br)->trace);
    result.regions.insert(result.regions.end(), (*br)->regions.begin(), (*br)->regions.end());
    result.sub_queries.insert(result.sub_queries.end(), (*br)->sub_queries.begin(), (*br)->sub_queries.end());
  }

  const std::vector<UrlSource> urls = merge_urls(branches);
  for (const auto& u : urls) result.urls.push_back(u.url);
  if (urls.empty()) {
    trace.flag("no_search_results");
    return result;
  }
  if (!ctx.backends.fetcher || !ctx.backends.reader) throw BackendUnavailable("no page fetcher or reader configured");

  std::vector<Trace> page_traces(urls.size());
  std::vector<std::optional<CleanDoc>> docs(urls.size());
  parallel_for(urls.size(), cfg.parallelism,
               [&](std::size_t i) { docs[i] = fetch_document(ctx, urls[i].url, page_traces[i]); });
  for (const auto& t : page_traces) trace.append(t);

  std::vector<EvidenceChunk> chunks;
  for (std::size_t i = 0; i < urls.size(); ++i) {
    if (!docs[i]) continue;
    const auto spans = chunk_spans(docs[i]->body, cfg.chunk_size_chars, cfg.chunk_overlap_chars);
    for (std::size_t j = 0; j < spans.size(); ++j) {
      EvidenceChunk c;
      c.text = spans[j].text;
      c.source_url = urls[i].url;
      c.branch = urls[i].branch;
      c.source_position = static_cast<int>(i);
      c.chunk_index = static_cast<int>(j);
      chunks.push_back(std::move(c));
    }
  }
  result.chunk_count = chunks.size();
  if (chunks.empty()) {
    trace.flag("no_chunks");
    return result;
  }
  if (!ctx.backends.reranker) throw BackendUnavailable("no reranker configured");

  std::vector<std::string> texts;
  for (const auto& c : chunks) texts.push_back(c.text);
  Trace vis_trace, txt_trace;
  std::optional<std::vector<double>> visual, textual;
  auto score_visual = [&] {
    try {
      visual = traced(vis_trace, ToolKind::Rerank, sha256_hex("image\x1f" + image_key(img)), [&](ToolCall& c) {
        c.note = "image";
        return with_retries(cfg.backend_retries, [&] { return ctx.backends.reranker->rerank_image(img, texts); });
      });
    } catch (const Error&) {
      vis_trace.flag("rerank_failed:image");
    }
  };
  auto score_textual = [&] {
    try {
      textual = traced(txt_trace, ToolKind::Rerank, sha256_hex("text\x1f" + question), [&](ToolCall& c) {
        c.note = "text";
        return with_retries(cfg.backend_retries, [&] { return ctx.backends.reranker->rerank_text(question, texts); });
      });
    } catch (const Error&) {
      txt_trace.flag("rerank_failed:text");
    }
  };
  if (cfg.parallelism > 1) {
    auto f = std::async(std::launch::async, score_visual);
    score_textual();
    f.get();
  } else {
    score_visual();
    score_textual();
  }
  trace.append(vis_trace);
  trace.append(txt_trace);
  if (!visual && !textual) return result;

  const auto fused = fuse_scores(visual, textual, cfg.weight_visual, cfg.weight_textual);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (visual) chunks[i].visual_score = (*visual)[i];
    if (textual) chunks[i].textual_score = (*textual)[i];
    chunks[i].fused_score = fused[i];
  }
  result.selected = select(std::move(chunks), cfg.score_threshold, cfg.top_k_chunks);
  if (result.selected.empty()) trace.flag("empty_selection");
  return result;
}

DryRun retrieve_dry_run(PipelineContext& ctx, const ImageBuf& img, const std::string& question) {
  DryRun out;
  out.plan = route_search(ctx, img, question, std::nullopt, out.trace);
  Branches branches = run_branches(ctx, img, question, out.plan);
  for (auto* br : {&branches.visual, &branches.textual}) {
    if (!*br) continue;
    out.trace.append((*br)->trace);
    out.regions.insert(out.regions.end(), (*br)->regions.begin(), (*br)->regions.end());
    out.sub_queries.insert(out.sub_queries.end(), (*br)->sub_queries.begin(), (*br)->sub_queries.end());
  }
  for (const auto& u : merge_urls(branches)) out.urls.push_back(u.url);
  return out;
}

}  // namespace lensrag
