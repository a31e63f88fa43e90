#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lensrag/core.hpp"
#include "lensrag/media.hpp"
#include "lensrag/reader.hpp"

namespace lensrag {

// ---------------------------------------------------------------------------
// Chat

enum class Role { System, User };

struct ContentPart {
  std::string text;
  std::optional<ImageBuf> image;  // set for image parts

  static ContentPart of_text(std::string t) { return ContentPart{std::move(t), std::nullopt}; }
  static ContentPart of_image(ImageBuf img) { return ContentPart{{}, std::move(img)}; }
  bool is_image() const { return image.has_value(); }
};

struct ChatMessage {
  Role role = Role::User;
  std::vector<ContentPart> parts;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::string purpose;  // pipeline stage, e.g. "domain_route"; not sent over the wire

  /// Concatenated text of all user messages.
  std::string user_text() const;
  std::string system_text() const;
  std::size_t image_count() const;
};

/// SHA-256 over roles, texts and image keys of the request.
std::string prompt_digest(const ChatRequest& req);

// ---------------------------------------------------------------------------
// Call log

struct CallEntry {
  std::string operation;
  std::string input_digest;
  std::int64_t timestamp_us = 0;  // monotonic, relative to log creation
};

/// Append-only, thread-safe log of backend invocations.
class CallLog {
 public:
  CallLog();
  void append(std::string operation, std::string input_digest);
  std::vector<CallEntry> entries() const;
  std::size_t size() const;
  std::size_t count(std::string_view operation) const;

 private:
  mutable std::mutex mu_;
  std::chrono::steady_clock::time_point origin_;
  std::vector<CallEntry> entries_;
};

// ---------------------------------------------------------------------------
// Capabilities

struct SearchHit {
  std::string url;
  std::string title;
  std::string snippet;
  int position = 1;

  bool operator==(const SearchHit&) const = default;
};

void to_json(nlohmann::json& j, const SearchHit& v);
void from_json(const nlohmann::json& j, SearchHit& v);

/// Base of every backend: owns the call log.
class Backend {
 public:
  virtual ~Backend() = default;
  CallLog& log() { return log_; }
  const CallLog& log() const { return log_; }

 protected:
  CallLog log_;
};

class ChatBackend : public Backend {
 public:
  virtual std::string chat(const ChatRequest& req) = 0;
};

class ObjectDetector : public Backend {
 public:
  /// Boxes for `label`, sorted by confidence descending.
  virtual std::vector<BBox> detect(const ImageBuf& img, std::string_view label) = 0;
};

class Reranker : public Backend {
 public:
  virtual std::vector<double> rerank_text(std::string_view query, const std::vector<std::string>& chunks) = 0;
  virtual std::vector<double> rerank_image(const ImageBuf& img, const std::vector<std::string>& chunks) = 0;
};

class SearchEngine : public Backend {
 public:
  virtual std::vector<SearchHit> text_search(std::string_view query, int top_n) = 0;
  virtual std::vector<SearchHit> image_search(const ImageBuf& img, int top_n) = 0;
};

class PageFetcher : public Backend {
 public:
  virtual std::string fetch_page(std::string_view url) = 0;
};

/// Webpage reader; the default is the rule-based parse_html.
class PageReader : public Backend {
 public:
  virtual CleanDoc read(std::string_view raw, std::string_view url) = 0;
};

class RuleBasedReader final : public PageReader {
 public:
  CleanDoc read(std::string_view raw, std::string_view url) override;
};

struct Backends {
  std::shared_ptr<ChatBackend> chat;
  std::shared_ptr<ObjectDetector> detector;
  std::shared_ptr<Reranker> reranker;
  std::shared_ptr<SearchEngine> search;
  std::shared_ptr<PageFetcher> fetcher;
  std::shared_ptr<PageReader> reader;
};

// ---------------------------------------------------------------------------
// Helpers shared by adapters

/// Validates a score list against the chunk count and clamps into [0,1].
std::vector<double> checked_scores(std::vector<double> scores, std::size_t expected);

/// Syntactic URL check (scheme http/https plus a host); throws InvalidUrl.
void require_valid_url(std::string_view url);

/// Sorts boxes by confidence descending (stable).
void sort_boxes(std::vector<BBox>& boxes);

/// Truncates to top_n and renumbers positions 1..n.
std::vector<SearchHit> take_top(std::vector<SearchHit> hits, int top_n);

/// Calls `fn` up to retries+1 times, retrying on Timeout and
/// BackendUnavailable. The final error propagates.
template <class F>
auto with_retries(int retries, F&& fn) -> decltype(fn()) {
  for (int attempt = 0;; ++attempt) {
    try {
      return fn();
    } catch (const Timeout&) {
      if (attempt >= retries) throw;
    } catch (const BackendUnavailable&) {
      if (attempt >= retries) throw;
    }
  }
}

}  // namespace lensrag
