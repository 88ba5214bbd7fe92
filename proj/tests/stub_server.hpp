#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "eduaffect/llm.hpp"

namespace testutil {

// Local chat-completions endpoint for exercising the HTTP client. By default
// every request is answered by routing its messages through mock_complete;
// a script of status codes can be prepended to force failures first.
class StubServer {
 public:
  explicit StubServer(std::vector<int> status_script = {}) : script_(std::move(status_script)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      {
        std::lock_guard<std::mutex> lock(mutex_);
        timestamps_.push_back(std::chrono::steady_clock::now());
      }
      int n = calls_.fetch_add(1);
      if (n < static_cast<int>(script_.size()) && script_[n] != 200) {
        res.status = script_[n];
        res.set_content("{\"error\":\"scripted failure\"}", "application/json");
        return;
      }
      nlohmann::json j = nlohmann::json::parse(req.body);
      eduaffect::ChatRequest request;
      request.model = j.value("model", "stub");
      for (const auto& m : j.at("messages")) {
        request.messages.push_back({m.at("role"), m.at("content")});
      }
      auto completion = eduaffect::mock_complete(request);
      nlohmann::json body{
          {"model", request.model},
          {"choices", {{{"message", {{"role", "assistant"}, {"content", completion.text}}}}}},
          {"usage", {{"prompt_tokens", 1}, {"completion_tokens", 1}}}};
      res.set_content(body.dump(), "application/json");
    });

    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int calls() const { return calls_.load(); }

  std::vector<std::chrono::steady_clock::time_point> timestamps() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return timestamps_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::vector<int> script_;
  std::atomic<int> calls_{0};
  mutable std::mutex mutex_;
  std::vector<std::chrono::steady_clock::time_point> timestamps_;
};

}  // namespace testutil
