#include "lensrag/pipeline.hpp"

#include <algorithm>

namespace lensrag {

void Trace::flag(std::string f) {
  if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(std::move(f));
}

void Trace::append(const Trace& other) {
  calls.insert(calls.end(), other.calls.begin(), other.calls.end());
  for (const auto& f : other.flags) flag(f);
}

std::string chat_with_retries(PipelineContext& ctx, const ChatRequest& req) {
  if (!ctx.backends.chat) throw BackendUnavailable("no chat backend configured");
  return with_retries(ctx.cfg.backend_retries, [&] { return ctx.backends.chat->chat(req); });
}

ChatRequest make_request(std::string purpose, std::string system, const ImageBuf* image, std::string user,
                         double temperature) {
  ChatRequest req;
  req.purpose = std::move(purpose);
  req.temperature = temperature;
  req.messages.push_back(ChatMessage{Role::System, {ContentPart::of_text(std::move(system))}});
  ChatMessage u{Role::User, {}};
  if (image) u.parts.push_back(ContentPart::of_image(*image));
  u.parts.push_back(ContentPart::of_text(std::move(user)));
  req.messages.push_back(std::move(u));
  return req;
}

}  // namespace lensrag
