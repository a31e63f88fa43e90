#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <latch>
#include <thread>

#include "lensrag/cache.hpp"
#include "lensrag/evalharness.hpp"
#include "lensrag/media.hpp"
#include "lensrag/rerank.hpp"
#include "lensrag/text_util.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace lensrag;
using namespace lensrag::testing;

TEST_SUITE("property.rerank") {
  TEST_CASE("selection matches a brute-force oracle on 1000 random sets") {
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 1000; ++trial) {
      ScoredSet s = random_scored_set(rng);
      const auto fused = fuse_scores(s.visual, s.textual, s.w1, s.w2);
      for (std::size_t i = 0; i < fused.size(); ++i) s.chunks[i].fused_score = fused[i];
      const auto got = select(s.chunks, s.tau, s.k);
      const auto want = brute_force_selection(s);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < want.size(); ++i) {
        REQUIRE(got[i].text == s.chunks[want[i]].text);
        REQUIRE(got[i].rank == static_cast<int>(i) + 1);
      }
    }
  }

  TEST_CASE("raising a chunk's score never lowers its rank") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      ScoredSet s = random_scored_set(rng, 60);
      s.tau = 0.0;
      s.k = 1000;
      const auto fused = fuse_scores(s.visual, s.textual, s.w1, s.w2);
      for (std::size_t i = 0; i < fused.size(); ++i) s.chunks[i].fused_score = fused[i];
      const std::size_t victim = rng() % s.chunks.size();
      auto rank_of = [&](const std::vector<EvidenceChunk>& sel) {
        for (const auto& c : sel)
          if (c.text == s.chunks[victim].text) return c.rank;
        return 1 << 30;
      };
      const int before = rank_of(select(s.chunks, s.tau, s.k));
      auto bumped = s.chunks;
      bumped[victim].fused_score = std::min(1.0, bumped[victim].fused_score + 0.25);
      CHECK(rank_of(select(bumped, s.tau, s.k)) <= before);
    }
  }

  TEST_CASE("with w1 = 0 the fused score is the scaled text score") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      ScoredSet s = random_scored_set(rng, 50);
      const auto fused = fuse_scores(s.visual, s.textual, 0.0, 1.0);
      for (std::size_t i = 0; i < fused.size(); ++i) CHECK(fused[i] == s.textual[i]);
    }
  }

  TEST_CASE("selection output is bounded and above threshold") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
      ScoredSet s = random_scored_set(rng, 200);
      const auto fused = fuse_scores(s.visual, s.textual, s.w1, s.w2);
      for (std::size_t i = 0; i < fused.size(); ++i) s.chunks[i].fused_score = fused[i];
      const auto sel = select(s.chunks, s.tau, s.k);
      CHECK(sel.size() <= static_cast<std::size_t>(s.k));
      for (std::size_t i = 0; i < sel.size(); ++i) {
        CHECK(sel[i].fused_score > s.tau);
        if (i) CHECK(sel[i - 1].fused_score >= sel[i].fused_score);
      }
    }
  }
}

TEST_SUITE("property.reader") {
  TEST_CASE("500 random documents: idempotence, reconstruction, no residual tags") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 500; ++trial) {
      const std::string html = random_html(rng);
      const auto doc = parse_html(html, "https://r.example/");
      INFO(html);
      REQUIRE_FALSE(has_residual_tag(doc.body));
      REQUIRE(parse_html(doc.body, "").body == doc.body);
      const int size = std::uniform_int_distribution<int>(20, 400)(rng);
      const int overlap = std::uniform_int_distribution<int>(0, size - 1)(rng);
      const auto chunks = chunk_spans(doc.body, size, overlap);
      const auto rebuilt = reconstruct(chunks);
      REQUIRE(rebuilt);
      REQUIRE(*rebuilt == doc.body);
      for (const auto& c : chunks) REQUIRE(c.text.size() <= static_cast<std::size_t>(size));
    }
  }

  TEST_CASE("fixture pages carry no residual tags") {
    int pages = 0;
    for (const auto& e : std::filesystem::directory_iterator(mock_dir() + "/pages")) {
      const auto doc = parse_html(read_file(e.path().string()), "");
      CHECK_FALSE(has_residual_tag(doc.body));
      CHECK_FALSE(doc.body.empty());
      ++pages;
    }
    CHECK(pages >= 20);
  }
}

TEST_SUITE("property.media") {
  TEST_CASE("resizing 100 random sizes: oracle dimensions and idempotence") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const int w = std::uniform_int_distribution<int>(1, 2200)(rng);
      const int h = std::uniform_int_distribution<int>(1, 2200)(rng);
      const auto img = noise_image(w, h, static_cast<std::uint32_t>(trial));
      const auto once = resize_shortest_edge(img, 1024);
      const auto [ew, eh] = expected_dims(w, h, 1024);
      INFO(w << "x" << h);
      CHECK(once.width() == ew);
      CHECK(once.height() == eh);
      CHECK(std::min(once.width(), once.height()) == std::min({w, h, 1024}));
      CHECK(resize_shortest_edge(once, 1024) == once);
      if (std::min(w, h) <= 1024) CHECK(once == img);
    }
  }
}

TEST_SUITE("property.cache") {
  TEST_CASE("64-way stampedes over several keys run each thunk once") {
    TwoLayerCache cache;
    std::array<std::atomic<int>, 4> calls{};
    std::latch start(64);
    std::vector<std::thread> ts;
    for (int i = 0; i < 64; ++i)
      ts.emplace_back([&, i] {
        const int key = i % 4;
        start.arrive_and_wait();
        cache.l2_get_or_parse("https://k/" + std::to_string(key), [&] {
          ++calls[static_cast<std::size_t>(key)];
          std::this_thread::sleep_for(std::chrono::milliseconds(10));
          return CleanDoc{"u", "", std::to_string(key)};
        });
      });
    for (auto& t : ts) t.join();
    for (const auto& c : calls) CHECK(c.load() == 1);
    CHECK(cache.stats().l2_hits + cache.stats().l2_misses == 64);
  }
}

TEST_SUITE("property.core") {
  TEST_CASE("random records survive a JSON round trip") {
    std::mt19937_64 rng(3);
    auto str = [&] { return "s" + std::to_string(rng() % 1000) + (rng() % 2 ? "\xC3\xA9\n\"" : ""); };
    for (int trial = 0; trial < 200; ++trial) {
      AnswerRecord r;
      r.task_id = str();
      r.answer = str();
      r.mode = rng() % 2 ? AnswerMode::Direct : AnswerMode::Retrieved;
      if (rng() % 2) r.plan = RetrievalPlan{{str()}, {str(), str()}};
      r.detected_regions.push_back(BBox{int(rng() % 50), 1, 2, 3, str(), 0.25});
      EvidenceChunk c;
      c.text = str();
      c.fused_score = 0.75;
      if (rng() % 2) c.visual_score = 0.5;
      r.selected_chunks.push_back(c);
      for (int k = 0; k < 5; ++k) {
        ToolCall call;
        call.kind = static_cast<ToolKind>(rng() % 6);
        call.duration_ms = static_cast<std::int64_t>(rng() % 1000);
        call.cache_hit = rng() % 2;
        r.tool_calls.push_back(call);
      }
      if (rng() % 3 == 0) r.error = str();
      r.flags = {str()};
      const json j = r;
      CHECK(json::parse(j.dump()).get<AnswerRecord>() == r);
    }
  }
}

TEST_SUITE("property.evalharness") {
  TEST_CASE("aggregation is invariant under task permutation") {
    std::mt19937_64 rng(17);
    std::vector<QueryTask> tasks;
    std::vector<Judgment> js;
    std::vector<AnswerRecord> rs;
    for (int i = 0; i < 60; ++i) {
      QueryTask t;
      t.id = "t" + std::to_string(i);
      t.hops = 1 + static_cast<int>(rng() % 4);
      if (t.hops >= 2) t.category = Category::MultiHop;
      t.difficulty = static_cast<Difficulty>(rng() % 3);
      t.domain_label = rng() % 2 ? "Food" : "Plant";
      tasks.push_back(t);
      js.push_back(Judgment{t.id, rng() % 2 == 0, "", {}});
      AnswerRecord r;
      r.task_id = t.id;
      for (std::uint64_t k = rng() % 3; k > 0; --k) {
        ToolCall c;
        c.kind = rng() % 2 ? ToolKind::TextSearch : ToolKind::ImageSearch;
        r.tool_calls.push_back(c);
      }
      rs.push_back(r);
    }
    const auto base = report_to_json(aggregate(js, tasks, rs));
    for (int trial = 0; trial < 20; ++trial) {
      std::shuffle(tasks.begin(), tasks.end(), rng);
      std::shuffle(js.begin(), js.end(), rng);
      std::shuffle(rs.begin(), rs.end(), rng);
      CHECK(report_to_json(aggregate(js, tasks, rs)) == base);
    }
  }
}
