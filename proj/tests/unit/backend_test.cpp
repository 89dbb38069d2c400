#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <thread>

#include "emocap/backend.hpp"
#include "emocap/error.hpp"
#include "emocap/gateway.hpp"
#include "emocap/response_cache.hpp"
#include "fixtures.hpp"
#include "openai_stub.hpp"

using namespace emocap;
using fx::OpenAiStub;

namespace {

BackendConfig live_config(const std::string& endpoint) {
  BackendConfig cfg;
  cfg.kind = BackendKind::live;
  cfg.endpoint = endpoint;
  cfg.api_key_env = "EMOCAP_TEST_KEY_UNSET";
  return cfg;
}

std::vector<std::chrono::milliseconds> g_sleeps;

void record_sleep(std::chrono::milliseconds d) { g_sleeps.push_back(d); }

}  // namespace

TEST(MockBackend, ConstantAndTranscript) {
  MockBackend c = MockBackend::constant("Fear");
  EXPECT_EQ(c.complete({"p", "h", 3}), "Fear");

  MockBackend t = MockBackend::from_transcript({{"h1", {"a", "b"}}});
  EXPECT_EQ(t.complete({"p", "h1", 0}), "a");
  EXPECT_EQ(t.complete({"p", "h1", 3}), "b");
  EXPECT_THROW(t.complete({"p", "h2", 0}), ReplayMissError);
}

// Expected indices come from an independent implementation of the
// splitmix64/FNV-1a mixing used by the seeded mock.
TEST(MockBackend, SeededIsFrozenAndOrderFree) {
  const auto vocab = default_lexicon().label_names();
  MockBackend m = MockBackend::seeded(42, vocab);
  const std::string hash = "46c477e01fa1ff9a806c6960523ac24c7e0e434a8293232e143edcb9851a1b56";
  const std::vector<int> expected = {1, 2, 12, 3, 0, 2, 12, 4, 3, 0};
  for (int i = 9; i >= 0; --i) {
    EXPECT_EQ(m.complete({"", hash, i}), vocab[std::size_t(expected[std::size_t(i)])]) << i;
  }
}

TEST(MockBackend, LoadTranscriptFile) {
  fx::TempDir dir;
  std::ofstream(dir / "t.json") << R"({"h": ["Fear", "Anger"], "g": "Sadness"})";
  MockBackend m = MockBackend::load_transcript(dir / "t.json");
  EXPECT_EQ(m.complete({"", "h", 1}), "Anger");
  EXPECT_EQ(m.complete({"", "g", 5}), "Sadness");
  std::ofstream(dir / "bad.json") << R"({"h": 4})";
  EXPECT_THROW(MockBackend::load_transcript(dir / "bad.json"), SchemaError);
}

TEST(ResponseCache, PersistsAndReloads) {
  fx::TempDir dir;
  {
    ResponseCache cache(dir / "c.jsonl");
    cache.put("h", 0, " Fear", "m");
    cache.put("h", 1, "Anger\n", "m");
    cache.put("h", 1, "Sadness", "m");  // last write wins
    EXPECT_EQ(cache.get("h", 1), "Sadness");
  }
  ResponseCache again(dir / "c.jsonl");
  EXPECT_EQ(again.size(), 2u);
  EXPECT_EQ(again.responses("h"), (std::vector<std::string>{" Fear", "Sadness"}));
  EXPECT_FALSE(again.get("h", 2).has_value());
}

TEST(ResponseCache, SkipsTornFinalLine) {
  fx::TempDir dir;
  {
    ResponseCache cache(dir / "c.jsonl");
    cache.put("h", 0, "Fear", "m");
  }
  std::ofstream(dir / "c.jsonl", std::ios::app) << R"({"prompt_hash":"h","ind)";
  ResponseCache again(dir / "c.jsonl");
  EXPECT_EQ(again.size(), 1u);
  EXPECT_EQ(again.skipped_lines(), 1u);
}

TEST(ResponseCache, ConcurrentWritersAreSerialized) {
  fx::TempDir dir;
  ResponseCache cache(dir / "c.jsonl");
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i) {
        cache.put("h" + std::to_string(t), i, "x", "m");
        EXPECT_TRUE(cache.get("h" + std::to_string(t), i).has_value());
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(ResponseCache(dir / "c.jsonl").size(), 200u);
}

TEST(ReplayBackend, ServesCacheAndMissesLoudly) {
  auto cache = std::make_shared<ResponseCache>();
  cache->put("h", 0, "Fear", "m");
  ReplayBackend r(cache);
  EXPECT_EQ(r.complete({"", "h", 0}), "Fear");
  EXPECT_THROW(r.complete({"", "h", 1}), ReplayMissError);
}

TEST(BackendConfig, JsonRoundTripAndValidation) {
  BackendConfig cfg = live_config("http://localhost:1/v1");
  cfg.temperature = 0.5;
  cfg.retry.max_attempts = 5;
  const BackendConfig back = nlohmann::json(cfg).get<BackendConfig>();
  EXPECT_EQ(back.endpoint, cfg.endpoint);
  EXPECT_EQ(back.retry.max_attempts, 5);
  EXPECT_DOUBLE_EQ(back.temperature, 0.5);
  BackendConfig bad = cfg;
  bad.endpoint.clear();
  EXPECT_THROW(bad.validate(), SchemaError);
  bad = cfg;
  bad.temperature = -1;
  EXPECT_THROW(bad.validate(), SchemaError);
  EXPECT_THROW(parse_backend_kind("cloud"), SchemaError);
}

TEST(MakeBackend, RefusesMock) {
  EXPECT_THROW(make_backend(BackendConfig{}, nullptr), SchemaError);
}

TEST(LiveBackend, PostsCompletionRequestAndCaches) {
  OpenAiStub stub([](const nlohmann::json&, int) { return OpenAiStub::text(" Fear"); });
  auto cache = std::make_shared<ResponseCache>();
  BackendConfig cfg = live_config(stub.endpoint());
  LiveBackend live(cfg, cache);
  EXPECT_EQ(live.complete({"the prompt", "h", 2}), " Fear");
  ASSERT_EQ(stub.requests(), 1);
  const auto body = stub.bodies()[0];
  EXPECT_EQ(body["model"], "text-davinci-003");
  EXPECT_EQ(body["prompt"], "the prompt");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["max_tokens"], 16);
  EXPECT_EQ(stub.auth_headers()[0], "");
  EXPECT_EQ(cache->get("h", 2), " Fear");
}

TEST(LiveBackend, SendsBearerKeyFromEnvironment) {
  OpenAiStub stub([](const nlohmann::json&, int) { return OpenAiStub::text("Fear"); });
  ::setenv("EMOCAP_TEST_KEY_SET", "sk-test", 1);
  BackendConfig cfg = live_config(stub.endpoint());
  cfg.api_key_env = "EMOCAP_TEST_KEY_SET";
  LiveBackend live(cfg, nullptr);
  live.complete({"p", "h", 0});
  EXPECT_EQ(stub.auth_headers()[0], "Bearer sk-test");
  ::unsetenv("EMOCAP_TEST_KEY_SET");
}

TEST(LiveBackend, RetriesRateLimitWithBackoff) {
  OpenAiStub stub([](const nlohmann::json&, int n) {
    if (n < 2) return OpenAiStub::Reply{429, "{}"};
    return OpenAiStub::text("Anger");
  });
  LiveBackend live(live_config(stub.endpoint()), nullptr);
  g_sleeps.clear();
  live.set_sleeper(record_sleep);
  EXPECT_EQ(live.complete({"p", "h", 0}), "Anger");
  EXPECT_EQ(stub.requests(), 3);
  EXPECT_EQ(g_sleeps, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500),
                                                              std::chrono::milliseconds(1000)}));
}

TEST(LiveBackend, PersistentRateLimitRaises) {
  OpenAiStub stub([](const nlohmann::json&, int) { return OpenAiStub::Reply{429, "{}"}; });
  LiveBackend live(live_config(stub.endpoint()), nullptr);
  live.set_sleeper([](std::chrono::milliseconds) {});
  EXPECT_THROW(live.complete({"p", "h", 0}), RateLimitError);
  EXPECT_EQ(stub.requests(), 3);
}

TEST(LiveBackend, ServerErrorsBecomeNetworkError) {
  OpenAiStub stub([](const nlohmann::json&, int) { return OpenAiStub::Reply{503, "{}"}; });
  LiveBackend live(live_config(stub.endpoint()), nullptr);
  live.set_sleeper([](std::chrono::milliseconds) {});
  EXPECT_THROW(live.complete({"p", "h", 0}), NetworkError);
}

TEST(LiveBackend, ClientErrorsAndBadBodiesAreProtocolErrors) {
  OpenAiStub reject([](const nlohmann::json&, int) { return OpenAiStub::Reply{400, "{}"}; });
  LiveBackend a(live_config(reject.endpoint()), nullptr);
  EXPECT_THROW(a.complete({"p", "h", 0}), ProtocolError);
  EXPECT_EQ(reject.requests(), 1);

  OpenAiStub garbled([](const nlohmann::json&, int) { return OpenAiStub::Reply{200, R"({"choices":[]})"}; });
  LiveBackend b(live_config(garbled.endpoint()), nullptr);
  EXPECT_THROW(b.complete({"p", "h", 0}), ProtocolError);
}

TEST(LiveBackend, UnreachableEndpointIsNetworkError) {
  BackendConfig cfg = live_config("http://127.0.0.1:1/v1");
  cfg.timeout = std::chrono::seconds(2);
  LiveBackend live(cfg, nullptr);
  live.set_sleeper([](std::chrono::milliseconds) {});
  EXPECT_THROW(live.complete({"p", "h", 0}), NetworkError);
}

TEST(LiveBackend, ReplayAfterLiveIsIdentical) {
  OpenAiStub stub([](const nlohmann::json&, int n) { return OpenAiStub::text("answer " + std::to_string(n)); });
  fx::TempDir dir;
  auto cache = std::make_shared<ResponseCache>(dir / "cache.jsonl");
  const BackendConfig cfg = live_config(stub.endpoint());
  LiveBackend live(cfg, cache);
  const Caption c = render(fx::passenger_scene(), "red", CaptionVariant::full, NamePool::defaults());
  const auto labels = default_lexicon().label_names();
  const PromptSpec p = build_prompt(c, labels);
  const CompletionBatch first = complete_n(p, cfg, 10, live);

  auto reloaded = std::make_shared<ResponseCache>(dir / "cache.jsonl");
  ReplayBackend replay(reloaded);
  const CompletionBatch second = complete_n(p, cfg, 10, replay);
  EXPECT_EQ(first.raw_completions, second.raw_completions);
  EXPECT_EQ(first.prompt_hash, second.prompt_hash);
  EXPECT_EQ(stub.requests(), 10);
}
