#pragma once

#include "ragds/gateway/limiter.hpp"
#include "ragds/gateway/retry.hpp"
#include "ragds/gateway/types.hpp"

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>

namespace ragds::gateway {

/// Talks to `<base_url>/v1/chat/completions` and `<base_url>/v1/embeddings`
/// using the common JSON request/response shape. Timeout, 429 and 5xx are
/// retried with exponential backoff up to `max_attempts` total attempts;
/// any other 4xx fails immediately.
class HttpGateway final : public Gateway {
 public:
  struct Options {
    LogSink log;
    /// Replaces std::this_thread::sleep_for between retries.
    Sleeper sleep;
    std::uint64_t jitter_seed = 0x5eed;
    /// Resolves credential_ref; defaults to std::getenv.
    std::function<std::optional<std::string>(const std::string&)> env;
  };

  explicit HttpGateway(EndpointProfile profile);
  HttpGateway(EndpointProfile profile, Options options);
  ~HttpGateway() override;

  ChatResult chat_complete(std::span<const ChatTurn> messages,
                           const CompletionParams& params) override;
  std::vector<std::vector<float>> embed_texts(std::span<const std::string> texts) override;

  const EndpointProfile& profile() const override { return profile_; }
  Metrics metrics() const override;

 private:
  struct Response {
    int status = 0;
    std::string body;
  };

  std::string post_with_retries(const std::string& path, const std::string& body,
                                const std::string& request_hash, std::string_view event);
  Response post_once(const std::string& path, const std::string& body);
  void log(std::string_view line) const;

  EndpointProfile profile_;
  Options options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  ConcurrencyLimiter limiter_;
  Backoff backoff_;
  mutable std::mutex metrics_mu_;
  Metrics metrics_;
};

}  // namespace ragds::gateway
