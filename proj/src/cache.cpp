#include "lensrag/cache.hpp"

#include <fstream>

#include "lensrag/text_util.hpp"

namespace lensrag {

namespace {

constexpr std::uint8_t kTagL1 = 1;
constexpr std::uint8_t kTagL2 = 2;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_record(std::string& out, std::uint8_t tag, const std::string& key, const std::string& value) {
  out.push_back(static_cast<char>(tag));
  put_u32(out, static_cast<std::uint32_t>(key.size()));
  out += key;
  put_u32(out, static_cast<std::uint32_t>(value.size()));
  out += value;
}

class RecordReader {
 public:
  explicit RecordReader(std::string_view data) : data_(data) {}
  bool done() const { return pos_ >= data_.size(); }

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string bytes(std::uint32_t n) {
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw DatasetError("truncated cache file");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

void to_json(nlohmann::json& j, const CacheStats& v) {
  j = nlohmann::json{{"l1_hits", v.l1_hits},       {"l1_misses", v.l1_misses},   {"l2_hits", v.l2_hits},
                     {"l2_misses", v.l2_misses},   {"l1_entries", v.l1_entries}, {"l2_entries", v.l2_entries}};
}

std::string TwoLayerCache::text_key(std::string_view query) { return "txt:" + normalize_query(query); }

std::string TwoLayerCache::image_key(const ImageBuf& img) { return "img:" + lensrag::image_key(img); }

TwoLayerCache::Hits TwoLayerCache::l1_get_or_search(const std::string& key, const std::function<Hits()>& searcher,
                                                    bool* was_hit) {
  std::optional<std::chrono::steady_clock::duration> ttl;
  if (ttl_) ttl = *ttl_;
  return l1_.get_or_fill(key, searcher, ttl, l1_hits_, l1_misses_, was_hit);
}

CleanDoc TwoLayerCache::l2_get_or_parse(const std::string& url, const std::function<CleanDoc()>& parser,
                                        bool* was_hit) {
  if (url.empty()) throw InvalidParams("empty URL");
  std::optional<std::chrono::steady_clock::duration> ttl;
  if (ttl_) ttl = *ttl_;
  return l2_.get_or_fill(url, parser, ttl, l2_hits_, l2_misses_, was_hit);
}

CacheStats TwoLayerCache::stats() const {
  CacheStats s;
  s.l1_hits = l1_hits_.load();
  s.l1_misses = l1_misses_.load();
  s.l2_hits = l2_hits_.load();
  s.l2_misses = l2_misses_.load();
  s.l1_entries = l1_.size();
  s.l2_entries = l2_.size();
  return s;
}

void TwoLayerCache::clear() {
  l1_.clear();
  l2_.clear();
}

void TwoLayerCache::save(const std::string& path) const {
  std::string out;
  for (const auto& [key, hits] : l1_.snapshot()) put_record(out, kTagL1, key, nlohmann::json(hits).dump());
  for (const auto& [url, doc] : l2_.snapshot()) put_record(out, kTagL2, url, nlohmann::json(doc).dump());
  write_file(path, out);
}

void TwoLayerCache::load(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) return;
  probe.close();
  const std::string data = read_file(path);
  RecordReader in(data);
  while (!in.done()) {
    const std::uint8_t tag = in.u8();
    const std::string key = in.bytes(in.u32());
    const std::string value = in.bytes(in.u32());
    const auto j = nlohmann::json::parse(value, nullptr, false);
    if (j.is_discarded()) throw DatasetError("corrupt cache record for key " + key);
    if (tag == kTagL1) l1_.put(key, j.get<Hits>());
    else if (tag == kTagL2) l2_.put(key, j.get<CleanDoc>());
    else throw DatasetError("unknown cache record tag " + std::to_string(tag));
  }
}

}  // namespace lensrag
