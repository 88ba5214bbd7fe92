#include "eduaffect/llm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include <openssl/evp.h>

#include <httplib.h>
#include <json.hpp>

#include "eduaffect/errors.hpp"

namespace eduaffect {

namespace {

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

nlohmann::json request_to_json(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  return nlohmann::json{{"model", request.model},
                        {"messages", messages},
                        {"temperature", request.temperature},
                        {"max_tokens", request.max_tokens}};
}

nlohmann::json completion_to_json(const Completion& completion) {
  nlohmann::json j{{"text", completion.text}, {"model", completion.model}};
  if (completion.usage) {
    j["usage"] = {{"prompt_tokens", completion.usage->prompt_tokens},
                  {"completion_tokens", completion.usage->completion_tokens}};
  }
  return j;
}

Completion completion_from_json(const nlohmann::json& j) {
  Completion c;
  c.text = j.at("text").get<std::string>();
  c.model = j.value("model", std::string{});
  if (j.contains("usage")) {
    c.usage = TokenUsage{j["usage"].value("prompt_tokens", std::int64_t{0}),
                         j["usage"].value("completion_tokens", std::int64_t{0})};
  }
  return c;
}

// Rendered builtin prompts embed the student text in single quotes; keyword
// rules apply to that segment so template wording never triggers them.
std::string student_segment(const std::string& message) {
  auto first = message.find('\'');
  auto last = message.rfind('\'');
  if (first == std::string::npos || last <= first) return message;
  return message.substr(first + 1, last - first - 1);
}

struct KeywordRule {
  const char* needle;
  const char* label;
  bool positive;
};

// Rule order decides the primary label when several keywords appear.
constexpr KeywordRule kEmotionRules[] = {
    {"frustrat", "frustration", false}, {"confus", "confusion", false},
    {"bored", "boredom", false},        {"boring", "boredom", false},
    {"worried", "anxiety", false},      {"anxious", "anxiety", false},
    {"love", "joy", true},              {"enjoy", "joy", true},
    {"excited", "joy", true},
};

std::vector<std::string> matched_labels(const std::string& lower_segment, bool* any_positive,
                                        bool* any_negative) {
  std::vector<std::string> labels;
  for (const auto& rule : kEmotionRules) {
    if (lower_segment.find(rule.needle) == std::string::npos) continue;
    if (any_positive && rule.positive) *any_positive = true;
    if (any_negative && !rule.positive) *any_negative = true;
    if (std::find(labels.begin(), labels.end(), rule.label) == labels.end())
      labels.emplace_back(rule.label);
  }
  return labels;
}

std::string mock_answer(const std::string& message) {
  if (message.find("Rate the contextual relevance") != std::string::npos) {
    return "Score: 8/10";
  }

  const std::string segment = student_segment(message);
  const std::string lower = to_lower(segment);

  if (message.find("general emotional tone") != std::string::npos) {
    bool pos = false, neg = false;
    matched_labels(lower, &pos, &neg);
    std::string tone = pos && neg ? "mixed" : pos ? "positive" : neg ? "negative" : "neutral";
    return "Tone: " + tone + ".";
  }

  if (message.find("engagement level") != std::string::npos) {
    bool high = segment.size() > 400 || segment.find('?') != std::string::npos;
    return high ? "Engagement level: high" : "Engagement level: low";
  }

  if (message.find("signs of confusion") != std::string::npos) {
    bool confusion = lower.find("confus") != std::string::npos;
    bool frustration = lower.find("frustrat") != std::string::npos;
    std::string out = "Signs of confusion: ";
    out += confusion ? "yes" : "no";
    out += ". Signs of frustration: ";
    out += frustration ? "yes" : "no";
    out += ".";
    return out;
  }

  // Emotion prompt.
  auto labels = matched_labels(lower, nullptr, nullptr);
  if (labels.empty()) return "The primary emotion expressed is neutral.";
  if (labels.size() == 1) return "The primary emotion expressed is " + labels.front() + ".";
  if (message.find("step by step") != std::string::npos) {
    return "Weighing the cues step by step, the strongest signal comes first.\nAnswer: " +
           labels.front();
  }
  if (message.find("Prior assessment:") != std::string::npos) {
    return "The primary emotion expressed is " + labels.front() + ".";
  }
  // A single-round prompt gets no commitment on mixed signals.
  return "The student response mixes several feelings at once.";
}

}  // namespace

void ChatRequest::validate() const {
  if (temperature < 0) throw ConfigError("temperature must be >= 0");
  if (max_tokens <= 0) throw ConfigError("max_tokens must be positive");
  for (const auto& m : messages) {
    if (m.role == "user") return;
  }
  throw ConfigError("request must contain at least one user message");
}

const std::string& ChatRequest::last_user_message() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == "user") return it->content;
  }
  throw ConfigError("request has no user message");
}

std::string cache_key(const ChatRequest& request) {
  return sha256_hex(request_to_json(request).dump());
}

Completion mock_complete(const ChatRequest& request) {
  request.validate();
  const std::string& message = request.last_user_message();
  Completion completion;
  completion.text = mock_answer(message);
  completion.model = request.model;
  completion.cached = false;
  completion.usage = TokenUsage{static_cast<std::int64_t>(message.size() / 4),
                                static_cast<std::int64_t>(completion.text.size() / 4)};
  return completion;
}

DiskCache::DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path DiskCache::entry_path(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<Completion> DiskCache::get(const std::string& key) const {
  std::ifstream in(entry_path(key));
  if (!in) return std::nullopt;
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("completion")) return std::nullopt;
  return completion_from_json(j["completion"]);
}

void DiskCache::put(const std::string& key, const ChatRequest& request,
                    const Completion& completion) {
  std::lock_guard<std::mutex> lock(write_mutex_);
  auto path = entry_path(key);
  std::filesystem::create_directories(path.parent_path());
  nlohmann::json j{{"key", key},
                   {"request", request_to_json(request)},
                   {"completion", completion_to_json(completion)}};
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump();
  }
  std::filesystem::rename(tmp, path);
}

DiskCache::Stats DiskCache::stats() const {
  Stats s;
  if (!std::filesystem::exists(dir_)) return s;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      ++s.entries;
      s.bytes += entry.file_size();
    }
  }
  return s;
}

void DiskCache::clear() {
  if (!std::filesystem::exists(dir_)) return;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    std::filesystem::remove_all(entry.path());
  }
}

std::vector<std::filesystem::path> DiskCache::verify() const {
  std::vector<std::filesystem::path> corrupt;
  if (!std::filesystem::exists(dir_)) return corrupt;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("request") || !j.contains("completion")) {
      corrupt.push_back(entry.path());
      continue;
    }
    std::string expected = entry.path().stem().string();
    if (sha256_hex(j["request"].dump()) != expected) corrupt.push_back(entry.path());
  }
  std::sort(corrupt.begin(), corrupt.end());
  return corrupt;
}

RateLimiter::RateLimiter(int requests_per_minute)
    : interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(60.0 / std::max(1, requests_per_minute)))),
      next_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point grant;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto now = std::chrono::steady_clock::now();
    if (next_ < now) next_ = now;
    grant = next_;
    next_ += interval_;
  }
  std::this_thread::sleep_until(grant);
}

HttpClient::HttpClient(ProviderConfig config, std::shared_ptr<DiskCache> cache)
    : config_(std::move(config)),
      cache_(std::move(cache)),
      limiter_(std::make_shared<RateLimiter>(config_.requests_per_minute)) {
  auto scheme_end = config_.base_url.find("://");
  std::size_t path_start = scheme_end == std::string::npos
                               ? config_.base_url.find('/')
                               : config_.base_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    host_ = config_.base_url;
  } else {
    host_ = config_.base_url.substr(0, path_start);
    path_prefix_ = config_.base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

Completion HttpClient::complete(const ChatRequest& request) {
  request.validate();
  const std::string key = cache_key(request);
  if (cache_) {
    if (auto hit = cache_->get(key)) {
      hit->cached = true;
      return *hit;
    }
  }

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* api_key = std::getenv(config_.api_key_env.c_str());
    if (!api_key) throw AuthMissing(config_.api_key_env);
    headers.emplace("Authorization", std::string("Bearer ") + api_key);
  }

  const std::string body = request_to_json(request).dump();
  std::mt19937 rng{std::random_device{}()};

  int last_status = 0;
  std::string last_body;
  bool saw_response = false;

  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      double backoff = std::min<double>(config_.backoff_cap_ms,
                                        config_.backoff_initial_ms * std::pow(2.0, attempt - 1));
      std::uniform_real_distribution<double> jitter(0.75, 1.25);
      auto sleep_ms = static_cast<std::int64_t>(backoff * jitter(rng));
      std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
    }

    limiter_->acquire();
    httplib::Client cli(host_);
    cli.set_connection_timeout(config_.timeout_s, 0);
    cli.set_read_timeout(config_.timeout_s, 0);
    auto res = cli.Post(path_prefix_ + "/chat/completions", headers, body, "application/json");

    if (!res) continue;  // connection failure or timeout: transient
    saw_response = true;
    last_status = res->status;
    last_body = res->body;

    if (res->status == 429 || res->status >= 500) continue;
    if (res->status != 200) throw ProviderError(res->status, res->body);

    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw ProviderError(res->status, "invalid JSON in response body");
    Completion completion;
    try {
      completion.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(res->status, std::string("unexpected response shape: ") + e.what());
    }
    completion.model = j.value("model", request.model);
    if (j.contains("usage")) {
      completion.usage = TokenUsage{j["usage"].value("prompt_tokens", std::int64_t{0}),
                                    j["usage"].value("completion_tokens", std::int64_t{0})};
    }
    completion.cached = false;
    if (cache_) cache_->put(key, request, completion);
    return completion;
  }

  if (!saw_response) throw TimeoutError("no response from " + host_ + " after retries");
  throw ProviderError(last_status, last_body);
}

}  // namespace eduaffect
