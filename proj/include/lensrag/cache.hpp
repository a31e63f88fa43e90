#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lensrag/backends.hpp"
#include "lensrag/media.hpp"
#include "lensrag/reader.hpp"

namespace lensrag {

struct CacheStats {
  std::uint64_t l1_hits = 0;
  std::uint64_t l1_misses = 0;
  std::uint64_t l2_hits = 0;
  std::uint64_t l2_misses = 0;
  std::size_t l1_entries = 0;
  std::size_t l2_entries = 0;

  bool operator==(const CacheStats&) const = default;
};

void to_json(nlohmann::json& j, const CacheStats& v);

namespace detail {

/// Key -> value store where concurrent misses on one key share a single fill.
/// Failed fills are removed so the next get retries.
template <class V>
class SingleFlightMap {
 public:
  using Clock = std::chrono::steady_clock;

  V get_or_fill(const std::string& key, const std::function<V()>& fill, std::optional<Clock::duration> ttl,
                std::atomic<std::uint64_t>& hits, std::atomic<std::uint64_t>& misses, bool* was_hit) {
    std::unique_lock lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end() && it->second.ready && ttl && Clock::now() - it->second.stored > *ttl) {
      entries_.erase(it);
      it = entries_.end();
    }
    if (it != entries_.end()) {
      ++hits;
      auto fut = it->second.value;
      lock.unlock();
      if (was_hit) *was_hit = true;
      return fut.get();
    }
    ++misses;
    std::promise<V> promise;
    const std::uint64_t generation = ++generation_;
    entries_[key] = Entry{promise.get_future().share(), false, Clock::now(), generation};
    lock.unlock();
    if (was_hit) *was_hit = false;
    try {
      V value = fill();
      promise.set_value(value);
      lock.lock();
      auto cur = entries_.find(key);
      if (cur != entries_.end() && cur->second.generation == generation) {
        cur->second.ready = true;
        cur->second.stored = Clock::now();
      }
      return value;
    } catch (...) {
      lock.lock();
      auto cur = entries_.find(key);
      if (cur != entries_.end() && cur->second.generation == generation) entries_.erase(cur);
      lock.unlock();
      promise.set_exception(std::current_exception());
      throw;
    }
  }

  void put(const std::string& key, V value) {
    std::promise<V> promise;
    promise.set_value(std::move(value));
    std::lock_guard lock(mu_);
    entries_[key] = Entry{promise.get_future().share(), true, Clock::now(), ++generation_};
  }

  void clear() {
    std::lock_guard lock(mu_);
    std::erase_if(entries_, [](const auto& kv) { return kv.second.ready; });
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& [k, e] : entries_) n += e.ready ? 1 : 0;
    return n;
  }

  std::vector<std::pair<std::string, V>> snapshot() const {
    std::lock_guard lock(mu_);
    std::vector<std::pair<std::string, V>> out;
    for (const auto& [k, e] : entries_) {
      if (e.ready) out.emplace_back(k, e.value.get());
    }
    return out;
  }

 private:
  struct Entry {
    std::shared_future<V> value;
    bool ready = false;
    Clock::time_point stored;
    std::uint64_t generation = 0;
  };

  mutable std::mutex mu_;
  std::map<std::string, Entry> entries_;
  std::uint64_t generation_ = 0;
};

}  // namespace detail

/// Two-layer cache. Layer 1 maps a search key (normalized text query or image
/// content key) to its hits; layer 2 maps a URL to its parsed content.
class TwoLayerCache {
 public:
  using Hits = std::vector<SearchHit>;

  explicit TwoLayerCache(std::optional<std::chrono::milliseconds> ttl = std::nullopt) : ttl_(ttl) {}

  static std::string text_key(std::string_view query);
  static std::string image_key(const ImageBuf& img);

  Hits l1_get_or_search(const std::string& key, const std::function<Hits()>& searcher, bool* was_hit = nullptr);
  CleanDoc l2_get_or_parse(const std::string& url, const std::function<CleanDoc()>& parser, bool* was_hit = nullptr);

  CacheStats stats() const;
  /// Empties both layers; counters are kept.
  void clear();

  /// Persistence file: a sequence of records, each
  /// u8 layer tag (1 or 2), u32 key length, key, u32 value length, value JSON.
  /// Integers are little-endian.
  void save(const std::string& path) const;
  /// Loads entries from `path`; a missing file is not an error.
  void load(const std::string& path);

 private:
  std::optional<std::chrono::milliseconds> ttl_;
  detail::SingleFlightMap<Hits> l1_;
  detail::SingleFlightMap<CleanDoc> l2_;
  std::atomic<std::uint64_t> l1_hits_{0}, l1_misses_{0}, l2_hits_{0}, l2_misses_{0};
};

}  // namespace lensrag
