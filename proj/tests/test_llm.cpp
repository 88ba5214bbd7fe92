#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>

#include "eduaffect/llm.hpp"
#include "helpers.hpp"
#include "stub_server.hpp"

using namespace eduaffect;
using testutil::StubServer;
using testutil::TempDir;

namespace {

ChatRequest simple_request(const std::string& content, const std::string& model = "m") {
  ChatRequest request;
  request.model = model;
  request.messages = {{"user", content}};
  return request;
}

ProviderConfig fast_provider(const std::string& base_url) {
  ProviderConfig p;
  p.base_url = base_url;
  p.requests_per_minute = 100000;
  p.max_retries = 2;
  p.backoff_initial_ms = 1;
  p.backoff_cap_ms = 4;
  p.timeout_s = 5;
  return p;
}

}  // namespace

TEST_CASE("cache_key is deterministic and field-sensitive") {
  ChatRequest a = simple_request("hello");
  ChatRequest b = simple_request("hello");
  CHECK(cache_key(a) == cache_key(b));

  b.temperature = 0.7;
  CHECK(cache_key(a) != cache_key(b));

  ChatRequest c = simple_request("hello", "other-model");
  CHECK(cache_key(a) != cache_key(c));
}

TEST_CASE("10000 distinct requests produce 10000 distinct keys") {
  std::set<std::string> keys;
  for (int i = 0; i < 10000; ++i) {
    keys.insert(cache_key(simple_request("msg " + std::to_string(i))));
  }
  CHECK(keys.size() == 10000);
}

TEST_CASE("mock emotion rules") {
  auto text_of = [](const std::string& prompt) { return mock_complete(simple_request(prompt)).text; };

  CHECK(text_of("Analyze the following student response and identify the primary emotion "
                "expressed: '...making me feel frustrated.'") ==
        "The primary emotion expressed is frustration.");
  CHECK(text_of("Analyze the following student response and identify the primary emotion "
                "expressed: 'I handed in the homework.'") ==
        "The primary emotion expressed is neutral.");
  CHECK(text_of("State the primary emotion of the following student response: 'I am so confused "
                "right now.'") == "The primary emotion expressed is confusion.");
}

TEST_CASE("mock tone, engagement, behavior, and judge rules") {
  auto text_of = [](const std::string& prompt) { return mock_complete(simple_request(prompt)).text; };

  CHECK(text_of("Assess the general emotional tone of the following student response, choosing "
                "one of positive, negative, mixed, or neutral: 'I am frustrated.'") ==
        "Tone: negative.");
  CHECK(text_of("Assess the general emotional tone of the following student response, choosing "
                "one of positive, negative, mixed, or neutral: 'I enjoy this.'") ==
        "Tone: positive.");
  CHECK(text_of("Assess the general emotional tone of the following student response, choosing "
                "one of positive, negative, mixed, or neutral: 'I enjoy it but I am confused.'") ==
        "Tone: mixed.");
  CHECK(text_of("Assess the general emotional tone of the following student response, choosing "
                "one of positive, negative, mixed, or neutral: 'The sky is blue.'") ==
        "Tone: neutral.");

  CHECK(text_of("Evaluate the engagement level of the student based on their participation in "
                "the discussion: 'Could you explain this again?'") == "Engagement level: high");
  CHECK(text_of("Evaluate the engagement level of the student based on their participation in "
                "the discussion: 'ok.'") == "Engagement level: low");

  CHECK(text_of("Identify signs of confusion or frustration in the student's question: 'I am "
                "confused about step two.'") ==
        "Signs of confusion: yes. Signs of frustration: no.");

  CHECK(text_of("Rate the contextual relevance of the following emotion/engagement assessment "
                "to the student text on a scale of 0-10. Student text: 'x'. Assessment: "
                "emotion=joy. Reply exactly: Score: n/10.") == "Score: 8/10");
}

TEST_CASE("mock_complete is a pure function of the request") {
  ChatRequest request = simple_request("Analyze the following student response and identify the "
                                       "primary emotion expressed: 'I love this class.'");
  Completion a = mock_complete(request);
  Completion b = mock_complete(request);
  CHECK(a.text == b.text);
  CHECK(a.model == b.model);
  CHECK_FALSE(a.cached);
}

TEST_CASE("disk cache round-trip, layout, stats, clear") {
  TempDir dir;
  DiskCache cache(dir.path / "cache");
  ChatRequest request = simple_request("hello cache");
  std::string key = cache_key(request);

  CHECK_FALSE(cache.get(key).has_value());

  Completion completion;
  completion.text = "stored text";
  completion.model = "m";
  cache.put(key, request, completion);

  auto layout = dir.path / "cache" / key.substr(0, 2) / (key + ".json");
  CHECK(std::filesystem::exists(layout));

  auto hit = cache.get(key);
  REQUIRE(hit.has_value());
  CHECK(hit->text == "stored text");

  auto stats = cache.stats();
  CHECK(stats.entries == 1);
  CHECK(stats.bytes > 0);

  CHECK(cache.verify().empty());

  cache.clear();
  CHECK(cache.stats().entries == 0);
  CHECK_FALSE(cache.get(key).has_value());
}

TEST_CASE("verify reports exactly the corrupted entry") {
  TempDir dir;
  DiskCache cache(dir.path / "cache");
  ChatRequest a = simple_request("first");
  ChatRequest b = simple_request("second");
  Completion completion;
  completion.text = "t";
  cache.put(cache_key(a), a, completion);
  cache.put(cache_key(b), b, completion);

  auto victim = dir.path / "cache" / cache_key(a).substr(0, 2) / (cache_key(a) + ".json");
  std::filesystem::resize_file(victim, 10);  // truncate

  auto corrupt = cache.verify();
  REQUIRE(corrupt.size() == 1);
  CHECK(corrupt[0] == victim);
}

TEST_CASE("http client serves repeat requests from the cache") {
  StubServer stub;
  TempDir dir;
  auto cache = std::make_shared<DiskCache>(dir.path / "cache");
  HttpClient client(fast_provider(stub.base_url()), cache);

  ChatRequest request = simple_request("Analyze the following student response and identify the "
                                       "primary emotion expressed: 'I am frustrated.'");
  Completion first = client.complete(request);
  CHECK_FALSE(first.cached);
  CHECK(first.text == "The primary emotion expressed is frustration.");
  CHECK(stub.calls() == 1);

  Completion second = client.complete(request);
  CHECK(second.cached);
  CHECK(second.text == first.text);
  CHECK(stub.calls() == 1);  // zero network calls on the hit
}

TEST_CASE("429 then 200 needs exactly one retry") {
  StubServer stub({429, 200});
  HttpClient client(fast_provider(stub.base_url()));
  Completion completion = client.complete(simple_request("hi there"));
  CHECK_FALSE(completion.text.empty());
  CHECK(stub.calls() == 2);
}

TEST_CASE("retries exhaust after max_retries+1 attempts") {
  StubServer stub({500, 500, 500, 500, 500, 500});
  ProviderConfig provider = fast_provider(stub.base_url());
  provider.max_retries = 3;
  HttpClient client(provider);
  CHECK_THROWS_AS(client.complete(simple_request("always failing")), ProviderError);
  CHECK(stub.calls() == provider.max_retries + 1);
}

TEST_CASE("non-transient provider errors are not retried") {
  StubServer stub({400});
  HttpClient client(fast_provider(stub.base_url()));
  try {
    client.complete(simple_request("bad request"));
    FAIL("expected ProviderError");
  } catch (const ProviderError& e) {
    CHECK(e.status() == 400);
  }
  CHECK(stub.calls() == 1);
}

TEST_CASE("missing api key env var fails before any request") {
  StubServer stub;
  ProviderConfig provider = fast_provider(stub.base_url());
  provider.api_key_env = "EDU_AFFECT_TEST_KEY_THAT_DOES_NOT_EXIST";
  HttpClient client(provider);
  CHECK_THROWS_AS(client.complete(simple_request("x")), AuthMissing);
  CHECK(stub.calls() == 0);
}

TEST_CASE("rate limiter spaces requests to the configured rate") {
  StubServer stub;
  ProviderConfig provider = fast_provider(stub.base_url());
  provider.requests_per_minute = 1200;  // 50ms spacing
  HttpClient client(provider);

  auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 5; ++i) {
    client.complete(simple_request("distinct message " + std::to_string(i)));
  }
  auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(stub.calls() == 5);
  // 4 gaps of >= 60/1200 seconds each, minus scheduler slack
  CHECK(elapsed >= 4 * (60.0 / 1200.0) - 0.02);
}

TEST_CASE("chat request validation") {
  ChatRequest request;
  request.model = "m";
  CHECK_THROWS_AS(request.validate(), ConfigError);
  request.messages = {{"system", "be helpful"}};
  CHECK_THROWS_AS(request.validate(), ConfigError);
  request.messages.push_back({"user", "hi"});
  CHECK_NOTHROW(request.validate());
  request.temperature = -1;
  CHECK_THROWS_AS(request.validate(), ConfigError);
}
