#include "lensrag/mock_backends.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "lensrag/text_util.hpp"

namespace lensrag {

namespace {

namespace fs = std::filesystem;

std::optional<json> read_json_file(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  auto j = json::parse(read_file(path.string()), nullptr, false);
  if (j.is_discarded()) throw DatasetError("invalid JSON in fixture " + path.string());
  return j;
}

std::string response_text(const json& r) { return r.is_string() ? r.get<std::string>() : r.dump(); }

// Resolves an image reference to a content key, loading and transforming
// fixture images on demand.
class ImageRefResolver {
 public:
  explicit ImageRefResolver(fs::path dir) : dir_(std::move(dir)) {}

  std::string key(const json& ref) {
    if (ref.is_string()) return ref.get<std::string>();
    ImageBuf img = load(ref.at("file").get<std::string>());
    if (ref.contains("resize")) img = resize_shortest_edge(img, ref["resize"].get<int>());
    if (ref.contains("crop")) {
      const auto& c = ref["crop"];
      BBox box{c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>(), c.at(3).get<int>(), {}, 0.0};
      img = crop(img, box);
    }
    return image_key(img);
  }

 private:
  const ImageBuf& load(const std::string& file) {
    auto it = images_.find(file);
    if (it == images_.end()) it = images_.emplace(file, load_image((dir_ / file).string())).first;
    return it->second;
  }

  fs::path dir_;
  std::map<std::string, ImageBuf> images_;
};

std::string normalize_text(std::string_view s) {
  std::string out;
  for (const auto& t : tokenize(s)) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

double overlap_share(const std::vector<std::string>& wanted, const std::vector<std::string>& chunk_tokens) {
  const std::set<std::string> want(wanted.begin(), wanted.end());
  if (want.empty()) return 0.0;
  const std::set<std::string> have(chunk_tokens.begin(), chunk_tokens.end());
  std::size_t found = 0;
  for (const auto& w : want) found += have.contains(w) ? 1 : 0;
  return static_cast<double>(found) / static_cast<double>(want.size());
}

MockSearch::Outcome parse_outcome(const json& j) {
  MockSearch::Outcome o;
  if (j.is_object() && j.contains("error")) o.error = j["error"].get<std::string>();
  else o.hits = j.get<std::vector<SearchHit>>();
  return o;
}

}  // namespace

Backends make_mock_backends(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw InvalidParams("mock fixture directory not found: " + dir);
  ImageRefResolver images(root);
  Backends b;

  b.chat = fs::exists(root / "chat.json") ? MockChat::from_file((root / "chat.json").string())
                                          : std::make_shared<MockChat>(std::map<std::string, std::string>{},
                                                                       std::vector<MockChat::Rule>{});

  std::map<std::string, MockSearch::Outcome> text, image;
  if (auto j = read_json_file(root / "search.json")) {
    const json text_table = j->value("text", json::object());
    const json image_table = j->value("image", json::array());
    for (const auto& [q, v] : text_table.items()) text[normalize_query(q)] = parse_outcome(v);
    for (const auto& e : image_table) image[images.key(e.at("image"))] = parse_outcome(e.at("hits"));
  }
  b.search = std::make_shared<MockSearch>(std::move(text), std::move(image));

  std::vector<MockDetector::Entry> dets;
  if (auto j = read_json_file(root / "detections.json")) {
    for (const auto& e : *j) {
      MockDetector::Entry entry;
      const auto& ref = e.at("image");
      entry.image_key = ref.is_string() && ref.get<std::string>() == "*" ? "*" : images.key(ref);
      entry.label = e.at("label").get<std::string>();
      for (const auto& bj : e.at("boxes")) {
        BBox box{bj.at("x").get<int>(), bj.at("y").get<int>(), bj.at("w").get<int>(), bj.at("h").get<int>(),
                 entry.label, bj.value("confidence", 1.0)};
        entry.boxes.push_back(box);
      }
      dets.push_back(std::move(entry));
    }
  }
  b.detector = std::make_shared<MockDetector>(std::move(dets));

  std::map<std::string, std::vector<std::string>> captions;
  if (auto j = read_json_file(root / "captions.json")) {
    for (const auto& e : *j) {
      std::vector<std::string> kws;
      for (const auto& k : e.at("keywords")) {
        for (auto& t : tokenize(k.get<std::string>())) kws.push_back(std::move(t));
      }
      captions[images.key(e.at("image"))] = std::move(kws);
    }
  }
  b.reranker = std::make_shared<MockReranker>(std::move(captions));

  std::map<std::string, MockFetcher::Page> pages;
  if (auto j = read_json_file(root / "pages.json")) {
    for (const auto& [url, v] : j->items()) {
      MockFetcher::Page p;
      if (v.contains("file")) p.body = read_file((root / v["file"].get<std::string>()).string());
      if (v.contains("html")) p.body = v["html"].get<std::string>();
      p.status = v.value("status", 200);
      p.timeout = v.value("timeout", false);
      pages[url] = std::move(p);
    }
  }
  b.fetcher = std::make_shared<MockFetcher>(std::move(pages));
  b.reader = std::make_shared<RuleBasedReader>();
  return b;
}

// ---------------------------------------------------------------------------

MockChat::MockChat(std::map<std::string, std::string> by_digest, std::vector<Rule> rules)
    : by_digest_(std::move(by_digest)), rules_(std::move(rules)) {}

std::shared_ptr<MockChat> MockChat::from_file(const std::string& path) {
  auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw DatasetError("invalid JSON in fixture " + path);
  std::map<std::string, std::string> by_digest;
  const json digests = j.value("by_digest", json::object());
  for (const auto& [d, r] : digests.items()) by_digest[d] = response_text(r);
  std::vector<Rule> rules;
  for (const auto& rj : j.value("rules", json::array())) {
    Rule r;
    r.purpose = rj.value("purpose", std::string{});
    if (rj.contains("contains")) {
      if (rj["contains"].is_string()) r.contains.push_back(rj["contains"].get<std::string>());
      else r.contains = rj["contains"].get<std::vector<std::string>>();
    }
    r.response = response_text(rj.at("response"));
    rules.push_back(std::move(r));
  }
  return std::make_shared<MockChat>(std::move(by_digest), std::move(rules));
}

std::string MockChat::chat(const ChatRequest& req) {
  const std::string digest = prompt_digest(req);
  log_.append("chat", digest);
  if (auto it = by_digest_.find(digest); it != by_digest_.end()) return it->second;
  const std::string text = req.system_text() + "\n" + req.user_text();
  for (const auto& rule : rules_) {
    if (!rule.purpose.empty() && rule.purpose != req.purpose) continue;
    const bool all = std::all_of(rule.contains.begin(), rule.contains.end(),
                                 [&](const std::string& c) { return contains_icase(text, c); });
    if (all) return rule.response;
  }
  throw BackendUnavailable("mock chat has no fixture for " + req.purpose + " prompt " + digest);
}

ScriptedChat::ScriptedChat(std::vector<std::string> replies) : replies_(std::move(replies)) {
  if (replies_.empty()) throw InvalidParams("scripted chat needs at least one reply");
}

std::string ScriptedChat::chat(const ChatRequest& req) {
  log_.append("chat", prompt_digest(req));
  std::lock_guard lock(mu_);
  requests_.push_back(req);
  const std::string& r = replies_[std::min(next_, replies_.size() - 1)];
  ++next_;
  return r;
}

std::vector<ChatRequest> ScriptedChat::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::string MockJudge::chat(const ChatRequest& req) {
  const std::string text = req.user_text();
  log_.append("chat", prompt_digest(req));
  const std::string gt = "Ground Truth: ";
  const std::string pred = ", Prediction: ";
  const auto g = text.rfind(gt);
  const auto p = text.rfind(pred);
  if (g == std::string::npos || p == std::string::npos || p < g) return R"({"accuracy": false})";
  const std::string gold = normalize_text(text.substr(g + gt.size(), p - g - gt.size()));
  const std::string prediction = normalize_text(text.substr(p + pred.size()));
  const bool ok = !gold.empty() && (" " + prediction + " ").find(" " + gold + " ") != std::string::npos;
  return ok ? R"({"accuracy": true})" : R"({"accuracy": false})";
}

// ---------------------------------------------------------------------------

MockDetector::MockDetector(std::vector<Entry> entries) : entries_(std::move(entries)) {}

std::vector<BBox> MockDetector::detect(const ImageBuf& img, std::string_view label) {
  if (trim(label).empty()) throw InvalidParams("detector label is empty");
  const std::string key = image_key(img);
  log_.append("detect", sha256_hex(key + "\x1f" + std::string(label)));
  const std::string want = normalize_query(label);
  std::vector<BBox> out;
  for (const auto& e : entries_) {
    if (e.image_key != "*" && e.image_key != key) continue;
    if (normalize_query(e.label) != want) continue;
    out.insert(out.end(), e.boxes.begin(), e.boxes.end());
  }
  sort_boxes(out);
  return out;
}

MockReranker::MockReranker(std::map<std::string, std::vector<std::string>> captions) : captions_(std::move(captions)) {}

std::vector<double> MockReranker::rerank_text(std::string_view query, const std::vector<std::string>& chunks) {
  if (chunks.empty()) throw InvalidParams("rerank needs at least one chunk");
  std::string all(query);
  for (const auto& c : chunks) all += "\x1f" + c;
  log_.append("rerank_text", sha256_hex(all));
  auto wanted = content_tokens(query);
  if (wanted.empty()) wanted = tokenize(query);
  std::vector<double> scores;
  for (const auto& c : chunks) scores.push_back(overlap_share(wanted, tokenize(c)));
  return checked_scores(std::move(scores), chunks.size());
}

std::vector<double> MockReranker::rerank_image(const ImageBuf& img, const std::vector<std::string>& chunks) {
  if (chunks.empty()) throw InvalidParams("rerank needs at least one chunk");
  const std::string key = image_key(img);
  std::string all = key;
  for (const auto& c : chunks) all += "\x1f" + c;
  log_.append("rerank_image", sha256_hex(all));
  std::vector<double> scores(chunks.size(), 0.0);
  if (auto it = captions_.find(key); it != captions_.end()) {
    for (std::size_t i = 0; i < chunks.size(); ++i) scores[i] = overlap_share(it->second, tokenize(chunks[i]));
  }
  return checked_scores(std::move(scores), chunks.size());
}

MockSearch::MockSearch(std::map<std::string, Outcome> text, std::map<std::string, Outcome> image)
    : text_(std::move(text)), image_(std::move(image)) {}

std::vector<SearchHit> MockSearch::serve(const std::map<std::string, Outcome>& table, const std::string& key,
                                         int top_n) {
  if (top_n < 1) throw InvalidParams("top_n must be >= 1");
  auto it = table.find(key);
  if (it == table.end()) return {};
  if (it->second.error == "quota") throw QuotaExceeded("search quota exhausted");
  if (!it->second.error.empty()) throw BackendUnavailable("search backend unavailable");
  return take_top(it->second.hits, top_n);
}

std::vector<SearchHit> MockSearch::text_search(std::string_view query, int top_n) {
  const std::string key = normalize_query(query);
  log_.append("text_search", sha256_hex(key));
  return serve(text_, key, top_n);
}

std::vector<SearchHit> MockSearch::image_search(const ImageBuf& img, int top_n) {
  const std::string key = image_key(img);
  log_.append("image_search", key);
  return serve(image_, key, top_n);
}

MockFetcher::MockFetcher(std::map<std::string, Page> pages) : pages_(std::move(pages)) {}

std::string MockFetcher::fetch_page(std::string_view url) {
  log_.append("fetch_page", sha256_hex(url));
  require_valid_url(url);
  auto it = pages_.find(std::string(url));
  if (it == pages_.end()) throw HttpError(404, std::string(url));
  if (it->second.timeout) throw Timeout("timed out fetching " + std::string(url));
  if (it->second.status >= 400) throw HttpError(it->second.status, std::string(url));
  return it->second.body;
}

}  // namespace lensrag
