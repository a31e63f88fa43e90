#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace lensrag {

/// Cleaned page content. `body` holds paragraphs separated by one blank line,
/// with no markup, no control characters besides '\n', and valid UTF-8.
struct CleanDoc {
  std::string url;
  std::string title;
  std::string body;

  bool operator==(const CleanDoc&) const = default;
};

void to_json(nlohmann::json& j, const CleanDoc& v);
void from_json(const nlohmann::json& j, CleanDoc& v);

/// Rule-based webpage reader. Drops script/style/nav/header/footer/form (and a
/// few similar) subtrees, turns block elements into paragraph breaks, decodes
/// entities and collapses whitespace. Input without any tag-like sequence is
/// treated as plain text, which makes the function idempotent on its output.
CleanDoc parse_html(std::string_view raw, std::string_view url);

/// A chunk of a body together with its byte offset in that body.
struct TextChunk {
  std::string text;
  std::size_t offset = 0;

  std::size_t end() const { return offset + text.size(); }
  bool operator==(const TextChunk&) const = default;
};

/// Greedy segmentation into chunks of at most `size` bytes. A chunk ends at the
/// last paragraph break inside the window that leaves it at least
/// `size - overlap` long, else at the last such sentence end, else at the
/// window edge (snapped back to a UTF-8 code point boundary). The next chunk
/// starts `overlap` bytes before the previous end.
/// Throws InvalidParams unless size > overlap >= 0.
std::vector<TextChunk> chunk_spans(std::string_view body, int size, int overlap);

std::vector<std::string> chunk(const CleanDoc& doc, int size, int overlap);

}  // namespace lensrag
