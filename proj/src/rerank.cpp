#include "lensrag/rerank.hpp"

#include <algorithm>

namespace lensrag {

std::vector<double> fuse_scores(const std::optional<std::vector<double>>& visual,
                                const std::optional<std::vector<double>>& textual, double w1, double w2) {
  if (!visual && !textual) throw InvalidParams("fuse_scores needs at least one modality");
  if (visual && textual && visual->size() != textual->size())
    throw LengthMismatch("visual and textual score lists differ in length");
  const std::size_t n = visual ? visual->size() : textual->size();
  std::vector<double> fused(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    if (visual) s += w1 * (*visual)[i];
    if (textual) s += w2 * (*textual)[i];
    fused[i] = std::clamp(s, 0.0, 1.0);
  }
  return fused;
}

std::vector<EvidenceChunk> select(std::vector<EvidenceChunk> chunks, double tau, int k) {
  if (k < 1) throw InvalidParams("K must be >= 1");
  std::erase_if(chunks, [tau](const EvidenceChunk& c) { return !(c.fused_score > tau); });
  std::stable_sort(chunks.begin(), chunks.end(), [](const EvidenceChunk& a, const EvidenceChunk& b) {
    if (a.fused_score != b.fused_score) return a.fused_score > b.fused_score;
    if (a.source_position != b.source_position) return a.source_position < b.source_position;
    return a.chunk_index < b.chunk_index;
  });
  if (chunks.size() > static_cast<std::size_t>(k)) chunks.resize(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < chunks.size(); ++i) chunks[i].rank = static_cast<int>(i) + 1;
  return chunks;
}

}  // namespace lensrag
