#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "lensrag/backends.hpp"
#include "lensrag/cache.hpp"
#include "lensrag/core.hpp"
#include "lensrag/prompts.hpp"

namespace lensrag {

/// Everything a pipeline stage needs. Backends and cache are shared handles.
struct PipelineContext {
  PipelineConfig cfg;
  Backends backends;
  std::shared_ptr<TwoLayerCache> cache = std::make_shared<TwoLayerCache>();
  PromptSet prompts = PromptSet::builtin();
};

/// Tool calls and flags collected by one stage; merged in a fixed order so
/// traces do not depend on thread scheduling.
struct Trace {
  std::vector<ToolCall> calls;
  std::vector<std::string> flags;

  void flag(std::string f);
  void append(const Trace& other);
};

/// Runs fn(call), timing it and appending the ToolCall to `trace`. A thrown
/// error marks the call failed, records its message and propagates.
template <class F>
auto traced(Trace& trace, ToolKind kind, std::string digest, F&& fn) -> decltype(fn(std::declval<ToolCall&>())) {
  ToolCall call;
  call.kind = kind;
  call.input_digest = std::move(digest);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    auto result = fn(call);
    call.duration_ms = elapsed();
    trace.calls.push_back(std::move(call));
    return result;
  } catch (const std::exception& e) {
    call.duration_ms = elapsed();
    call.ok = false;
    call.note = e.what();
    trace.calls.push_back(std::move(call));
    throw;
  }
}

/// Issues one chat request with the configured retries.
std::string chat_with_retries(PipelineContext& ctx, const ChatRequest& req);

/// Builds a system + user request with the image placed before the user text.
ChatRequest make_request(std::string purpose, std::string system, const ImageBuf* image, std::string user,
                         double temperature);

}  // namespace lensrag
