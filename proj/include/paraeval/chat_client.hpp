#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace paraeval {

struct ChatRequest {
  std::string model;
  std::string system;
  std::string user;
  double temperature = 0.7;
  double top_p = 0.95;
  std::optional<std::uint64_t> seed;
};

/// A chat-completions backend. Implementations must be thread-safe.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Returns the assistant message text. Throws TransportError when no
  /// usable response could be obtained.
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// OpenAI-compatible request body: model, [system, user] messages,
/// temperature, top_p and, when set, seed.
nlohmann::json chat_request_json(const ChatRequest& request);

/// Extracts choices[0].message.content; throws TransportError on any other shape.
std::string parse_chat_response(std::string_view body);

struct OpenAIChatOptions {
  /// Full URL of the chat-completions endpoint.
  std::string endpoint;
  /// Sent as a bearer token when non-empty; never logged.
  std::string api_key;
  std::chrono::milliseconds timeout{60000};
  /// Extra attempts after a connection failure or a retryable status
  /// (408, 409, 429, 5xx).
  std::size_t transport_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{30000};
};

class OpenAIChatClient final : public ChatClient {
 public:
  explicit OpenAIChatClient(OpenAIChatOptions options);
  std::string complete(const ChatRequest& request) override;

 private:
  OpenAIChatOptions options_;
  std::string origin_;
  std::string path_;
};

}  // namespace paraeval
