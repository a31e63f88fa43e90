#include "lensrag/backends.hpp"

#include <algorithm>
#include <cctype>

#include "lensrag/text_util.hpp"

namespace lensrag {

std::string ChatRequest::user_text() const {
  std::string out;
  for (const auto& m : messages) {
    if (m.role != Role::User) continue;
    for (const auto& p : m.parts) {
      if (p.is_image()) continue;
      if (!out.empty()) out.push_back('\n');
      out += p.text;
    }
  }
  return out;
}

std::string ChatRequest::system_text() const {
  std::string out;
  for (const auto& m : messages) {
    if (m.role != Role::System) continue;
    for (const auto& p : m.parts) {
      if (!p.is_image()) out += p.text;
    }
  }
  return out;
}

std::size_t ChatRequest::image_count() const {
  std::size_t n = 0;
  for (const auto& m : messages) n += static_cast<std::size_t>(std::count_if(m.parts.begin(), m.parts.end(), [](const ContentPart& p) { return p.is_image(); }));
  return n;
}

std::string prompt_digest(const ChatRequest& req) {
  std::string canon;
  for (const auto& m : req.messages) {
    canon += m.role == Role::System ? "system\x1f" : "user\x1f";
    for (const auto& p : m.parts) {
      if (p.is_image()) canon += "image:" + image_key(*p.image);
      else canon += "text:" + p.text;
      canon += '\x1e';
    }
    canon += '\x1d';
  }
  return sha256_hex(canon);
}

CallLog::CallLog() : origin_(std::chrono::steady_clock::now()) {}

void CallLog::append(std::string operation, std::string input_digest) {
  std::lock_guard lock(mu_);
  const auto now = std::chrono::steady_clock::now();
  auto ts = std::chrono::duration_cast<std::chrono::microseconds>(now - origin_).count();
  if (!entries_.empty()) ts = std::max(ts, entries_.back().timestamp_us);
  entries_.push_back({std::move(operation), std::move(input_digest), ts});
}

std::vector<CallEntry> CallLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t CallLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::size_t CallLog::count(std::string_view operation) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [&](const CallEntry& e) { return e.operation == operation; }));
}

void to_json(nlohmann::json& j, const SearchHit& v) {
  j = nlohmann::json{{"url", v.url}, {"title", v.title}, {"snippet", v.snippet}, {"position", v.position}};
}

void from_json(const nlohmann::json& j, SearchHit& v) {
  v.url = j.at("url").get<std::string>();
  v.title = j.value("title", std::string{});
  v.snippet = j.value("snippet", std::string{});
  v.position = j.value("position", 1);
}

CleanDoc RuleBasedReader::read(std::string_view raw, std::string_view url) {
  log_.append("read", sha256_hex(std::string(url)));
  return parse_html(raw, url);
}

std::vector<double> checked_scores(std::vector<double> scores, std::size_t expected) {
  if (scores.size() != expected)
    throw LengthMismatch("reranker returned " + std::to_string(scores.size()) + " scores for " + std::to_string(expected) + " chunks");
  for (double& s : scores) s = std::isnan(s) ? 0.0 : std::clamp(s, 0.0, 1.0);
  return scores;
}

void require_valid_url(std::string_view url) {
  const std::string lower = to_lower(url);
  std::size_t host_start = 0;
  if (lower.starts_with("http://")) host_start = 7;
  else if (lower.starts_with("https://")) host_start = 8;
  else throw InvalidUrl("unsupported URL scheme: " + std::string(url));
  if (host_start >= url.size() || url[host_start] == '/' ) throw InvalidUrl("URL has no host: " + std::string(url));
  for (unsigned char c : url) {
    if (c <= 0x20 || c == 0x7F) throw InvalidUrl("URL contains whitespace or control characters: " + std::string(url));
  }
}

void sort_boxes(std::vector<BBox>& boxes) {
  std::stable_sort(boxes.begin(), boxes.end(), [](const BBox& a, const BBox& b) { return a.confidence > b.confidence; });
}

std::vector<SearchHit> take_top(std::vector<SearchHit> hits, int top_n) {
  if (top_n < 1) throw InvalidParams("top_n must be >= 1");
  if (hits.size() > static_cast<std::size_t>(top_n)) hits.resize(static_cast<std::size_t>(top_n));
  for (std::size_t i = 0; i < hits.size(); ++i) hits[i].position = static_cast<int>(i) + 1;
  return hits;
}

}  // namespace lensrag
