#pragma once

#include <string>

#include "lensrag/backends.hpp"

namespace lensrag {

/// Endpoints and credentials of the HTTP adapters. Empty endpoints leave the
/// corresponding capability unset.
struct LiveConfig {
  std::string chat_url;          // POST JSON chat-completion endpoint
  std::string chat_model;
  std::string chat_api_key;
  std::string search_url;        // GET ?q=&engine=&num=&api_key=
  std::string image_search_url;  // POST {"image": base64 PNG, "num"}
  std::string search_engine = "google";
  std::string search_api_key;
  std::string detector_url;      // POST {"image", "label"} -> {"boxes": [...]}
  std::string reranker_url;      // POST {"mode", "query"|"image", "chunks"} -> {"scores": [...]}
  int timeout_ms = 10000;
  int max_in_flight = 4;

  /// Reads LENSRAG_CHAT_URL, LENSRAG_CHAT_MODEL, LENSRAG_CHAT_API_KEY,
  /// LENSRAG_SEARCH_URL, LENSRAG_IMAGE_SEARCH_URL, LENSRAG_SEARCH_ENGINE,
  /// LENSRAG_SEARCH_API_KEY, LENSRAG_DETECTOR_URL and LENSRAG_RERANKER_URL.
  static LiveConfig from_env();
};

/// HTTP adapters for every capability plus the rule-based reader. Throws
/// InvalidParams naming any missing endpoint.
Backends make_live_backends(const LiveConfig& cfg);

/// Splits "http://host:port/path?q" into ("http://host:port", "/path?q").
std::pair<std::string, std::string> split_url(std::string_view url);

}  // namespace lensrag
