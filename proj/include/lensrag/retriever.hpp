#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lensrag/media.hpp"
#include "lensrag/pipeline.hpp"

namespace lensrag {

/// Asks the search router which objects to look up by image and which facts
/// to look up by text. Unparseable or failed routing falls back to
/// {objects: [], queries: [question]} with flag `router_fallback`.
RetrievalPlan route_search(PipelineContext& ctx, const ImageBuf& img, const std::string& question,
                           const std::optional<std::string>& lacking, Trace& trace);

/// Splits a query into single-hop sub-queries; any failure yields [query].
std::vector<std::string> decouple(PipelineContext& ctx, const std::string& query, Trace& trace);

struct GroundedRegion {
  std::string label;
  BBox box;  // the frame itself when nothing was detected
  ImageBuf image;
  bool detected = false;
};

/// Crops the most confident detection for each label. Without a detection,
/// with the detector disabled or failing, the full frame stands in.
std::vector<GroundedRegion> ground_objects(PipelineContext& ctx, const ImageBuf& img,
                                           const std::vector<std::string>& objects, Trace& trace);

struct RetrievalResult {
  std::vector<std::string> sub_queries;
  std::vector<BBox> regions;
  std::vector<std::string> urls;  // deduplicated union, visual branch first
  std::size_t chunk_count = 0;
  std::vector<EvidenceChunk> selected;
};

/// Dual-branch retrieval: grounding and image search on the visual side,
/// decoupling and text search on the textual side, then fetch, parse and
/// chunk every URL through the cache and keep the chunks that rerank selects.
RetrievalResult retrieve(PipelineContext& ctx, const ImageBuf& img, const std::string& question,
                         const RetrievalPlan& plan, Trace& trace);

/// Search through the layer-1 cache; the ToolCall records cache hits.
std::vector<SearchHit> cached_text_search(PipelineContext& ctx, const std::string& query, Trace& trace);
std::vector<SearchHit> cached_image_search(PipelineContext& ctx, const ImageBuf& img, Trace& trace);

/// Fetch and parse through the layer-2 cache. Emits PageFetch and PageParse
/// calls; a failing page yields nullopt and flag `page_error`.
std::optional<CleanDoc> fetch_document(PipelineContext& ctx, const std::string& url, Trace& trace);

/// Dry run: the plan, sub-queries and URL set, without fetching pages.
struct DryRun {
  RetrievalPlan plan;
  std::vector<std::string> sub_queries;
  std::vector<BBox> regions;
  std::vector<std::string> urls;
  Trace trace;
};
DryRun retrieve_dry_run(PipelineContext& ctx, const ImageBuf& img, const std::string& question);

}  // namespace lensrag
