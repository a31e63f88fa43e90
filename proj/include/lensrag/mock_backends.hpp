#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "lensrag/backends.hpp"

namespace lensrag {

/// Deterministic backends served from a fixture directory:
///
///   chat.json        {"by_digest": {digest: response},
///                     "rules": [{"purpose", "contains", "response"}]}
///   search.json      {"text": {normalized query: [hit] | {"error": "quota"|"unavailable"}},
///                     "image": [{"image": ref, "hits": [hit]}]}
///   detections.json  [{"image": ref | "*", "label", "boxes": [{x, y, w, h, confidence}]}]
///   captions.json    [{"image": ref, "keywords": [text]}]
///   pages.json       {url: {"file"} | {"html"} | {"status": code} | {"timeout": true}}
///
/// An image `ref` is either a content key or {"file", "resize", "crop": [x, y, w, h]}
/// describing how to derive the image from a file in the fixture directory.
/// Missing files mean "no fixtures" for that capability.
Backends make_mock_backends(const std::string& dir);

class MockChat final : public ChatBackend {
 public:
  struct Rule {
    std::string purpose;  // empty matches any
    std::vector<std::string> contains;  // all must occur (case-insensitive) in the prompt text
    std::string response;
  };

  MockChat(std::map<std::string, std::string> by_digest, std::vector<Rule> rules);
  static std::shared_ptr<MockChat> from_file(const std::string& path);

  /// Digest matches win, then the first matching rule. No match throws
  /// BackendUnavailable.
  std::string chat(const ChatRequest& req) override;

 private:
  std::map<std::string, std::string> by_digest_;
  std::vector<Rule> rules_;
};

/// Returns canned replies in order; after the last one, repeats it.
class ScriptedChat final : public ChatBackend {
 public:
  explicit ScriptedChat(std::vector<std::string> replies);
  std::string chat(const ChatRequest& req) override;
  std::vector<ChatRequest> requests() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
  std::vector<ChatRequest> requests_;
};

/// Offline judge: reads question, gold answer and prediction back out of the
/// rendered evaluator prompt and replies {"accuracy": true} when the
/// normalized prediction contains the normalized gold answer.
class MockJudge final : public ChatBackend {
 public:
  std::string chat(const ChatRequest& req) override;
};

class MockDetector final : public ObjectDetector {
 public:
  struct Entry {
    std::string image_key;  // "*" matches every image
    std::string label;
    std::vector<BBox> boxes;
  };
  explicit MockDetector(std::vector<Entry> entries);
  std::vector<BBox> detect(const ImageBuf& img, std::string_view label) override;

 private:
  std::vector<Entry> entries_;
};

class MockReranker final : public Reranker {
 public:
  explicit MockReranker(std::map<std::string, std::vector<std::string>> captions);
  /// Share of the query's content tokens that occur in the chunk.
  std::vector<double> rerank_text(std::string_view query, const std::vector<std::string>& chunks) override;
  /// Share of the image's caption keywords that occur in the chunk.
  std::vector<double> rerank_image(const ImageBuf& img, const std::vector<std::string>& chunks) override;

 private:
  std::map<std::string, std::vector<std::string>> captions_;
};

class MockSearch final : public SearchEngine {
 public:
  struct Outcome {
    std::vector<SearchHit> hits;
    std::string error;  // "", "quota" or "unavailable"
  };
  MockSearch(std::map<std::string, Outcome> text, std::map<std::string, Outcome> image);
  std::vector<SearchHit> text_search(std::string_view query, int top_n) override;
  std::vector<SearchHit> image_search(const ImageBuf& img, int top_n) override;

 private:
  std::vector<SearchHit> serve(const std::map<std::string, Outcome>& table, const std::string& key, int top_n);
  std::map<std::string, Outcome> text_;
  std::map<std::string, Outcome> image_;
};

class MockFetcher final : public PageFetcher {
 public:
  struct Page {
    std::string body;
    int status = 200;
    bool timeout = false;
  };
  explicit MockFetcher(std::map<std::string, Page> pages);
  /// Unknown URLs answer 404.
  std::string fetch_page(std::string_view url) override;

 private:
  std::map<std::string, Page> pages_;
};

}  // namespace lensrag
