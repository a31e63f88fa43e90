#include <doctest.h>

#include "lensrag/errors.hpp"
#include "lensrag/evalharness.hpp"
#include "lensrag/prompts.hpp"
#include "lensrag/text_util.hpp"
#include "test_support.hpp"

using namespace lensrag;

TEST_SUITE("prompts") {
  TEST_CASE("placeholders are substituted") {
    CHECK(render("Q: {query} / {query}", {{"query", "x"}}) == "Q: x / x");
    CHECK(render("no placeholders", {}) == "no placeholders");
  }

  TEST_CASE("braces around non-identifiers stay verbatim") {
    CHECK(render(R"({"domain": <domain>} {a})", {{"a", "1"}}) == R"({"domain": <domain>} 1)");
    CHECK(render("{ spaced } {} {1x}", {}) == "{ spaced } {} {1x}");
  }

  TEST_CASE("a missing variable is an error") { CHECK_THROWS_AS(render("{nope}", {}), InvalidParams); }

  TEST_CASE("a line holding only an empty placeholder is dropped") {
    CHECK(render("a\n{loc}\nb", {{"loc", ""}}) == "a\nb");
    CHECK(render("a\n{loc}\nb", {{"loc", "here"}}) == "a\nhere\nb");
    CHECK(render("a {loc}\nb", {{"loc", ""}}) == "a \nb");
  }

  TEST_CASE("substituted values are not expanded again") {
    CHECK(render("{a}", {{"a", "{b}"}, {"b", "x"}}) == "{b}");
  }

  TEST_CASE("the built-in set covers every stage") {
    const auto& p = PromptSet::builtin();
    for (const char* name : {"direct_answer_system", "direct_answer_user", "domain_router_system", "domain_router_user",
                             "evaluator_system", "evaluator_user", "heuristic_rag_user", "query_decoupler_system",
                             "query_decoupler_user", "rag_answer_system", "rag_answer_user", "search_router_system",
                             "search_router_user", "vqa_system", "vqa_user"})
      CHECK_NOTHROW(p.get(name));
    CHECK_THROWS_AS(p.get("unknown"), InvalidParams);
  }

  TEST_CASE("direct answer prompt carries the sentinel instruction") {
    const auto sys = PromptSet::builtin().render("direct_answer_system", {{"domain_guidelines", ""}});
    CHECK(sys.find("I have no knowledge about <lacking_knowledge>") != std::string::npos);
    const auto user = PromptSet::builtin().render("direct_answer_user", {{"query", "Q?"}, {"location_line", ""}});
    CHECK(user.rfind("Given the <image>, please conduct step-by-step reasoning to address the query: Q?\n\nOutput Format:", 0) == 0);
  }

  TEST_CASE("evaluator request is byte-exact") {
    const std::string expected_user =
        "General Reasoning Guidelines: \"Your task is to determine if a prediction correctly answers a question based on "
        "the ground truth.\"\n"
        "Rules:\n"
        "1. The prediction is correct if it captures all the key information from the ground truth.\n"
        "2. The prediction is correct even if phrased differently as long as the meaning is the same.\n"
        "3. The prediction is incorrect if it contains incorrect information or is missing essential details. \"Output a "
        "JSON object with a single field 'accuracy' whose value is true or false.\"\n"
        "Question: Who painted it?, Ground Truth: American, Prediction: Andy Warhol";
    const auto req = evaluator_request(PromptSet::builtin(), "Who painted it?", "American", "Andy Warhol");
    CHECK(req.user_text() == expected_user);
    CHECK(req.system_text() == "You are an expert evaluator of question-answering systems.");
    CHECK(req.image_count() == 0);
    CHECK(req.temperature == 0.0);
  }

  TEST_CASE("override directories replace single templates") {
    const auto dir = lensrag::testing::scratch_dir("prompt_override");
    write_file((dir / "vqa_user.txt").string(), "Custom {query}");
    const auto p = PromptSet::with_overrides(dir.string());
    CHECK(p.render("vqa_user", {{"query", "q"}}) == "Custom q");
    CHECK(p.get("vqa_system") == PromptSet::builtin().get("vqa_system"));
  }
}
