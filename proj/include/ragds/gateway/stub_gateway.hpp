#pragma once

#include "ragds/gateway/types.hpp"

#include <atomic>
#include <map>
#include <mutex>

namespace ragds::gateway {

/// Fallback hook for prompts that have no scripted response. It may return
/// nullopt to defer to the fixed fallback text, or throw GatewayError to
/// simulate an endpoint failure.
using Responder =
    std::function<std::optional<std::string>(std::span<const ChatTurn>, const CompletionParams&)>;

struct StubScript {
  /// Keyed by prompt_hash() of the full message list, or by
  /// user_prompt_hash() of the last user message.
  std::map<std::string, std::string> responses;
  std::string fallback = "UNKNOWN";
  Responder responder;
  std::size_t embedding_dim = 64;
  /// Replaces hash_embedding() when set; must return unit vectors of a
  /// fixed dimension.
  std::function<std::vector<float>(std::string_view)> embedder;
};

/// In-process endpoint for offline runs and tests. Responses depend only on
/// the request, never on call order: the lookup is exact prompt hash, then
/// last-user-message hash, then the responder, then the fallback text.
/// Embeddings are unit vectors seeded from a hash of model id and text,
/// unless the script supplies its own embedder.
class StubGateway final : public Gateway {
 public:
  explicit StubGateway(EndpointProfile profile, StubScript script = {}, LogSink log = {});

  /// Scripts a response for an exact message list.
  void script(std::span<const ChatTurn> messages, std::string response);
  /// Scripts a response for any request whose last user message is `content`.
  void script_user(std::string_view content, std::string response);

  ChatResult chat_complete(std::span<const ChatTurn> messages,
                           const CompletionParams& params) override;
  std::vector<std::vector<float>> embed_texts(std::span<const std::string> texts) override;

  const EndpointProfile& profile() const override { return profile_; }
  Metrics metrics() const override;

  /// The vector embed_texts() returns for `text` under `model` and `dim`.
  static std::vector<float> hash_embedding(std::string_view model, std::string_view text,
                                           std::size_t dim);

 private:
  EndpointProfile profile_;
  LogSink log_;
  mutable std::mutex mu_;
  StubScript script_;
  Metrics metrics_;
};

}  // namespace ragds::gateway
