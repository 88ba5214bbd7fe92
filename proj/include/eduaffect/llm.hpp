#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace eduaffect {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 256;

  // Throws ConfigError unless there is at least one user message and
  // temperature >= 0.
  void validate() const;

  const std::string& last_user_message() const;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct Completion {
  std::string text;
  std::string model;
  bool cached = false;
  std::optional<TokenUsage> usage;
};

struct ProviderConfig {
  std::string base_url;     // e.g. https://api.openai.com/v1
  std::string api_key_env;  // env var name; empty means no auth header
  int requests_per_minute = 60;
  int max_retries = 5;
  int backoff_initial_ms = 1000;
  int backoff_cap_ms = 30000;
  int timeout_s = 30;
};

// Hex SHA-256 of the canonicalized request (model, messages, temperature,
// max_tokens). Equal requests hash equal; independent of JSON field order.
std::string cache_key(const ChatRequest& request);

// Content-addressed on-disk completion store, one file per key at
// {dir}/{first 2 hex}/{digest}.json. Writes are atomic (tmp + rename).
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir);

  std::optional<Completion> get(const std::string& key) const;
  void put(const std::string& key, const ChatRequest& request, const Completion& completion);

  struct Stats {
    std::size_t entries = 0;
    std::uintmax_t bytes = 0;
  };
  Stats stats() const;
  void clear();

  // Re-hashes each stored request against its filename; returns the paths of
  // corrupt entries (unreadable, truncated, or digest mismatch).
  std::vector<std::filesystem::path> verify() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path entry_path(const std::string& key) const;

  std::filesystem::path dir_;
  mutable std::mutex write_mutex_;
};

// Global minimum-spacing limiter: grants are at least 60s/rpm apart.
class RateLimiter {
 public:
  explicit RateLimiter(int requests_per_minute);
  void acquire();

 private:
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_;
  std::mutex mutex_;
};

class Client {
 public:
  virtual ~Client() = default;
  virtual Completion complete(const ChatRequest& request) = 0;
};

// Deterministic keyword-rule backend; pure function of the request.
Completion mock_complete(const ChatRequest& request);

class MockClient final : public Client {
 public:
  Completion complete(const ChatRequest& request) override { return mock_complete(request); }
};

// Chat-completions HTTP client with retry, exponential backoff, global rate
// limiting, and optional read-through disk cache.
class HttpClient final : public Client {
 public:
  explicit HttpClient(ProviderConfig config, std::shared_ptr<DiskCache> cache = nullptr);

  Completion complete(const ChatRequest& request) override;

 private:
  ProviderConfig config_;
  std::shared_ptr<DiskCache> cache_;
  std::shared_ptr<RateLimiter> limiter_;
  std::string host_;         // scheme://host[:port]
  std::string path_prefix_;  // e.g. /v1
};

}  // namespace eduaffect
