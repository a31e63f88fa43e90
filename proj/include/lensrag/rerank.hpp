#pragma once

#include <optional>
#include <vector>

#include "lensrag/core.hpp"

namespace lensrag {

/// fused[l] = w1 * visual[l] + w2 * textual[l], clamped to [0,1]. An absent
/// modality contributes 0. Throws LengthMismatch when both lists are present
/// with different lengths, InvalidParams when both are absent.
std::vector<double> fuse_scores(const std::optional<std::vector<double>>& visual,
                                const std::optional<std::vector<double>>& textual, double w1, double w2);

/// Keeps chunks with fused_score > tau, orders by fused_score descending
/// (ties by source_position, then chunk_index), keeps the first k and assigns
/// ranks 1..n.
std::vector<EvidenceChunk> select(std::vector<EvidenceChunk> chunks, double tau, int k);

}  // namespace lensrag
