#pragma once

#include "ragds/common/error.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ragds::gateway {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view s);

struct ChatTurn {
  Role role = Role::User;
  std::string content;

  bool operator==(const ChatTurn&) const = default;
};

struct CompletionParams {
  double temperature = 0.7;
  int max_output_tokens = 1024;
  std::optional<std::int64_t> seed;
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t total_tokens = 0;
};

struct ChatResult {
  std::string text;
  Usage usage;
};

/// Where and how to reach one model. The credential itself never lives
/// here: `credential_ref` names the environment variable that holds it.
struct EndpointProfile {
  std::string base_url;
  std::string credential_ref;
  std::string model;
  std::chrono::milliseconds timeout{60'000};
  int max_attempts = 3;
  int max_concurrent = 4;
  int embed_batch_size = 32;
  std::chrono::milliseconds backoff_base{500};
};

/// Throws std::invalid_argument when a numeric field is out of range.
void validate(const EndpointProfile& profile);

enum class ErrorKind {
  Timeout,
  RateLimited,
  ServerError,
  BadRequest,
  BadResponse,
  ExhaustedRetries,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

class GatewayError : public Error {
 public:
  GatewayError(ErrorKind kind, const std::string& message, int attempts = 1)
      : Error(std::string(to_string(kind)) + ": " + message), kind_(kind), attempts_(attempts) {}

  ErrorKind kind() const noexcept { return kind_; }
  int attempts() const noexcept { return attempts_; }
  bool retryable() const noexcept {
    return kind_ == ErrorKind::Timeout || kind_ == ErrorKind::RateLimited ||
           kind_ == ErrorKind::ServerError;
  }

 private:
  ErrorKind kind_;
  int attempts_;
};

/// Hex SHA-256 over the role/content sequence; the reproducibility key for
/// a request and the lookup key for stub scripts.
std::string prompt_hash(std::span<const ChatTurn> messages);

/// Hash of a single user message, i.e. prompt_hash({{User, content}}).
std::string user_prompt_hash(std::string_view content);

struct Metrics {
  std::int64_t chat_calls = 0;
  std::int64_t embed_calls = 0;
  std::int64_t http_requests = 0;
  std::int64_t retries = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  int max_in_flight = 0;
};

/// Receives one JSON line per request attempt.
using LogSink = std::function<void(std::string_view line)>;

/// A chat-completion and embedding endpoint bound to one profile.
/// Implementations are safe to share between threads.
class Gateway {
 public:
  virtual ~Gateway() = default;

  virtual ChatResult chat_complete(std::span<const ChatTurn> messages,
                                   const CompletionParams& params) = 0;

  /// One vector per input text, in input order.
  virtual std::vector<std::vector<float>> embed_texts(std::span<const std::string> texts) = 0;

  virtual const EndpointProfile& profile() const = 0;
  virtual Metrics metrics() const = 0;
};

}  // namespace ragds::gateway
