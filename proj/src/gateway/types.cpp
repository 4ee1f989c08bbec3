#include "ragds/gateway/types.hpp"

#include "ragds/common/hash.hpp"

#include <stdexcept>

namespace ragds::gateway {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view s) {
  if (s == "system") return Role::System;
  if (s == "user") return Role::User;
  if (s == "assistant") return Role::Assistant;
  throw std::invalid_argument("unknown chat role: " + std::string(s));
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::ServerError: return "ServerError";
    case ErrorKind::BadRequest: return "BadRequest";
    case ErrorKind::BadResponse: return "BadResponse";
    case ErrorKind::ExhaustedRetries: return "ExhaustedRetries";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

void validate(const EndpointProfile& p) {
  if (p.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  if (p.max_concurrent < 1) throw std::invalid_argument("max_concurrent must be >= 1");
  if (p.embed_batch_size < 1) throw std::invalid_argument("embed_batch_size must be >= 1");
  if (p.timeout.count() <= 0) throw std::invalid_argument("timeout must be > 0");
  if (p.backoff_base.count() < 0) throw std::invalid_argument("backoff_base must be >= 0");
}

std::string prompt_hash(std::span<const ChatTurn> messages) {
  std::string canonical;
  for (const auto& turn : messages) {
    canonical.append(to_string(turn.role));
    canonical.push_back('\x1f');
    canonical.append(turn.content);
    canonical.push_back('\x1e');
  }
  return sha256_hex(canonical);
}

std::string user_prompt_hash(std::string_view content) {
  const ChatTurn turn{Role::User, std::string(content)};
  return prompt_hash(std::span<const ChatTurn>(&turn, 1));
}

}  // namespace ragds::gateway
