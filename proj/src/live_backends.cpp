#include "lensrag/live_backends.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <semaphore>

#include "lensrag/text_util.hpp"

namespace lensrag {

namespace {

std::string env_or(const char* name, std::string fallback = {}) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

class InFlight {
 public:
  explicit InFlight(int limit) : sem_(std::max(1, limit)) {}
  auto guard() {
    sem_.acquire();
    return std::unique_ptr<InFlight, void (*)(InFlight*)>(this, [](InFlight* f) { f->sem_.release(); });
  }

 private:
  std::counting_semaphore<> sem_;
};

std::unique_ptr<httplib::Client> make_client(const std::string& base, int timeout_ms) {
  auto cli = std::make_unique<httplib::Client>(base);
  if (!cli->is_valid()) throw InvalidUrl("unsupported endpoint: " + base);
  const auto t = std::chrono::milliseconds(timeout_ms);
  cli->set_connection_timeout(t);
  cli->set_read_timeout(t);
  cli->set_write_timeout(t);
  cli->set_follow_location(true);
  return cli;
}

void raise_for(const httplib::Result& res, const std::string& what) {
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout)
      throw Timeout(what + ": " + httplib::to_string(err));
    throw BackendUnavailable(what + ": " + httplib::to_string(err));
  }
  if (res->status == 429) throw QuotaExceeded(what + ": rate limited");
  if (res->status >= 500) throw BackendUnavailable(what + ": HTTP " + std::to_string(res->status));
  if (res->status >= 400) throw HttpError(res->status, what);
}

json parse_body(const httplib::Result& res, const std::string& what) {
  auto j = json::parse(res->body, nullptr, false);
  if (j.is_discarded()) throw MalformedResponse(what + ": response is not JSON");
  return j;
}

httplib::Headers auth_headers(const std::string& api_key) {
  httplib::Headers h;
  if (!api_key.empty()) h.emplace("Authorization", "Bearer " + api_key);
  return h;
}

// Adapter talking JSON to one endpoint.
struct Endpoint {
  Endpoint(const std::string& url, int timeout_ms, int in_flight) : inflight(in_flight) {
    auto [base, p] = split_url(url);
    path = p.empty() ? "/" : p;
    client = make_client(base, timeout_ms);
  }

  json post(const json& body, const std::string& api_key, const std::string& what) {
    auto g = inflight.guard();
    auto res = client->Post(path, auth_headers(api_key), body.dump(), "application/json");
    raise_for(res, what);
    return parse_body(res, what);
  }

  std::string path;
  std::unique_ptr<httplib::Client> client;
  InFlight inflight;
};

json message_json(const ChatMessage& m) {
  json content = json::array();
  for (const auto& p : m.parts) {
    if (p.is_image()) content.push_back({{"type", "image"}, {"image", to_base64_png(*p.image)}, {"mime_type", "image/png"}});
    else content.push_back({{"type", "text"}, {"text", p.text}});
  }
  return {{"role", m.role == Role::System ? "system" : "user"}, {"content", content}};
}

class HttpChat final : public ChatBackend {
 public:
  HttpChat(const LiveConfig& c) : ep_(c.chat_url, c.timeout_ms, c.max_in_flight), model_(c.chat_model), key_(c.chat_api_key) {}

  std::string chat(const ChatRequest& req) override {
    log_.append("chat", prompt_digest(req));
    json msgs = json::array();
    for (const auto& m : req.messages) msgs.push_back(message_json(m));
    const json body{{"model", model_}, {"messages", msgs}, {"temperature", req.temperature}, {"max_tokens", req.max_tokens}};
    const json j = ep_.post(body, key_, "chat");
    if (j.contains("text") && j["text"].is_string()) return j["text"].get<std::string>();
    try {
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw MalformedResponse("chat: response has no text");
    }
  }

 private:
  Endpoint ep_;
  std::string model_;
  std::string key_;
};

std::vector<SearchHit> hits_from(const json& j, int top_n) {
  if (!j.contains("results") || !j["results"].is_array()) throw MalformedResponse("search: response has no results");
  std::vector<SearchHit> hits;
  for (const auto& r : j["results"]) {
    if (!r.contains("url") || !r["url"].is_string()) continue;
    hits.push_back(SearchHit{r["url"].get<std::string>(), r.value("title", std::string{}), r.value("snippet", std::string{}), 1});
  }
  return take_top(std::move(hits), top_n);
}

class HttpSearch final : public SearchEngine {
 public:
  explicit HttpSearch(const LiveConfig& c)
      : text_(c.search_url, c.timeout_ms, c.max_in_flight),
        image_(c.image_search_url, c.timeout_ms, c.max_in_flight),
        engine_(c.search_engine),
        key_(c.search_api_key) {}

  std::vector<SearchHit> text_search(std::string_view query, int top_n) override {
    if (top_n < 1) throw InvalidParams("top_n must be >= 1");
    log_.append("text_search", sha256_hex(normalize_query(query)));
    httplib::Params params{{"q", std::string(query)}, {"engine", engine_}, {"num", std::to_string(top_n)}};
    if (!key_.empty()) params.emplace("api_key", key_);
    auto g = text_.inflight.guard();
    auto res = text_.client->Get(text_.path, params, httplib::Headers{});
    raise_for(res, "text_search");
    return hits_from(parse_body(res, "text_search"), top_n);
  }

  std::vector<SearchHit> image_search(const ImageBuf& img, int top_n) override {
    if (top_n < 1) throw InvalidParams("top_n must be >= 1");
    log_.append("image_search", image_key(img));
    const json body{{"image", to_base64_png(img)}, {"engine", engine_}, {"num", top_n}};
    return hits_from(image_.post(body, key_, "image_search"), top_n);
  }

 private:
  Endpoint text_;
  Endpoint image_;
  std::string engine_;
  std::string key_;
};

class HttpDetector final : public ObjectDetector {
 public:
  explicit HttpDetector(const LiveConfig& c) : ep_(c.detector_url, c.timeout_ms, c.max_in_flight) {}

  std::vector<BBox> detect(const ImageBuf& img, std::string_view label) override {
    if (trim(label).empty()) throw InvalidParams("detector label is empty");
    log_.append("detect", sha256_hex(image_key(img) + "\x1f" + std::string(label)));
    const json j = ep_.post({{"image", to_base64_png(img)}, {"label", label}}, {}, "detect");
    std::vector<BBox> boxes;
    try {
      for (const auto& b : j.at("boxes")) {
        boxes.push_back(BBox{b.at("x").get<int>(), b.at("y").get<int>(), b.at("w").get<int>(), b.at("h").get<int>(),
                             b.value("label", std::string(label)), b.value("confidence", 0.0)});
      }
    } catch (const json::exception& e) {
      throw MalformedResponse(std::string("detect: ") + e.what());
    }
    sort_boxes(boxes);
    return boxes;
  }

 private:
  Endpoint ep_;
};

class HttpReranker final : public Reranker {
 public:
  explicit HttpReranker(const LiveConfig& c) : ep_(c.reranker_url, c.timeout_ms, c.max_in_flight) {}

  std::vector<double> rerank_text(std::string_view query, const std::vector<std::string>& chunks) override {
    if (chunks.empty()) throw InvalidParams("rerank needs at least one chunk");
    log_.append("rerank_text", sha256_hex(query));
    return scores(ep_.post({{"mode", "text"}, {"query", query}, {"chunks", chunks}}, {}, "rerank_text"), chunks.size());
  }

  std::vector<double> rerank_image(const ImageBuf& img, const std::vector<std::string>& chunks) override {
    if (chunks.empty()) throw InvalidParams("rerank needs at least one chunk");
    log_.append("rerank_image", image_key(img));
    return scores(ep_.post({{"mode", "image"}, {"image", to_base64_png(img)}, {"chunks", chunks}}, {}, "rerank_image"),
                  chunks.size());
  }

 private:
  static std::vector<double> scores(const json& j, std::size_t n) {
    if (!j.contains("scores") || !j["scores"].is_array()) throw MalformedResponse("rerank: response has no scores");
    std::vector<double> s;
    for (const auto& v : j["scores"]) {
      if (!v.is_number()) throw MalformedResponse("rerank: non-numeric score");
      s.push_back(v.get<double>());
    }
    return checked_scores(std::move(s), n);
  }

  Endpoint ep_;
};

class HttpFetcher final : public PageFetcher {
 public:
  HttpFetcher(int timeout_ms, int in_flight) : timeout_ms_(timeout_ms), inflight_(in_flight) {}

  std::string fetch_page(std::string_view url) override {
    log_.append("fetch_page", sha256_hex(url));
    require_valid_url(url);
    auto [base, path] = split_url(url);
    auto cli = make_client(base, timeout_ms_);
    auto g = inflight_.guard();
    auto res = cli->Get(path.empty() ? "/" : path);
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
        throw Timeout("timed out fetching " + std::string(url));
      throw HttpError(0, std::string(url) + ": " + httplib::to_string(err));
    }
    if (res->status >= 400) throw HttpError(res->status, std::string(url));
    return res->body;
  }

 private:
  int timeout_ms_;
  InFlight inflight_;
};

}  // namespace

LiveConfig LiveConfig::from_env() {
  LiveConfig c;
  c.chat_url = env_or("LENSRAG_CHAT_URL");
  c.chat_model = env_or("LENSRAG_CHAT_MODEL");
  c.chat_api_key = env_or("LENSRAG_CHAT_API_KEY");
  c.search_url = env_or("LENSRAG_SEARCH_URL");
  c.image_search_url = env_or("LENSRAG_IMAGE_SEARCH_URL", c.search_url);
  c.search_engine = env_or("LENSRAG_SEARCH_ENGINE", c.search_engine);
  c.search_api_key = env_or("LENSRAG_SEARCH_API_KEY");
  c.detector_url = env_or("LENSRAG_DETECTOR_URL");
  c.reranker_url = env_or("LENSRAG_RERANKER_URL");
  return c;
}

std::pair<std::string, std::string> split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw InvalidUrl("URL has no scheme: " + std::string(url));
  const auto path_start = url.find_first_of("/?#", scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  std::string path(url.substr(path_start));
  if (const auto hash = path.find('#'); hash != std::string::npos) path.resize(hash);
  if (path.empty() || path[0] != '/') path.insert(path.begin(), '/');
  return {std::string(url.substr(0, path_start)), path};
}

Backends make_live_backends(const LiveConfig& cfg) {
  std::vector<std::string> missing;
  if (cfg.chat_url.empty()) missing.push_back("LENSRAG_CHAT_URL");
  if (cfg.search_url.empty()) missing.push_back("LENSRAG_SEARCH_URL");
  if (cfg.detector_url.empty()) missing.push_back("LENSRAG_DETECTOR_URL");
  if (cfg.reranker_url.empty()) missing.push_back("LENSRAG_RERANKER_URL");
  if (!missing.empty()) {
    std::string msg = "live backends need";
    for (const auto& m : missing) msg += " " + m;
    throw InvalidParams(msg);
  }
  Backends b;
  b.chat = std::make_shared<HttpChat>(cfg);
  b.search = std::make_shared<HttpSearch>(cfg);
  b.detector = std::make_shared<HttpDetector>(cfg);
  b.reranker = std::make_shared<HttpReranker>(cfg);
  b.fetcher = std::make_shared<HttpFetcher>(cfg.timeout_ms, cfg.max_in_flight);
  b.reader = std::make_shared<RuleBasedReader>();
  return b;
}

}  // namespace lensrag
