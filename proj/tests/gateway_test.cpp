#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rti/detector.hpp"
#include "rti/gateway.hpp"
#include "support/synthetic.hpp"

using namespace rti::gateway;

namespace {

TranslationRequest request_for(const std::string& text) {
  return TranslationRequest{text, "en", "zh", "test-mt"};
}

const std::map<std::string, std::string>& tiny_dictionary() {
  static const std::map<std::string, std::string> dict = {
      {"two", "二"}, {"books", "书"}, {"interesting", "趣"}, {"read", "读"}, {"we", "我们"}};
  return dict;
}

}  // namespace

TEST_SUITE_BEGIN("gateway");

TEST_CASE("cache round trip and conflict detection") {
  TranslationCache cache;
  Translation t{request_for("two interesting books"), "二 趣 书", Origin::mock};
  cache.put(t);
  cache.put(t);  // idempotent for identical values

  auto hit = cache.get(request_for("two interesting books"));
  REQUIRE(hit.has_value());
  CHECK(hit->target_text == "二 趣 书");
  CHECK(hit->origin == Origin::cache);

  CHECK_FALSE(cache.get(request_for("unknown text")).has_value());

  Translation conflicting = t;
  conflicting.target_text = "别的";
  try {
    cache.put(conflicting);
    FAIL("expected CacheConflict");
  } catch (const GatewayError& e) {
    CHECK(e.kind() == GatewayErrorKind::CacheConflict);
  }
}

TEST_CASE("cache keys collapse whitespace") {
  TranslationCache cache;
  cache.put({request_for("two   interesting\tbooks"), "二 趣 书", Origin::mock});
  CHECK(cache.get(request_for("two interesting books")).has_value());
  // Different backends do not share entries.
  TranslationRequest other = request_for("two interesting books");
  other.backend_id = "other-mt";
  CHECK_FALSE(cache.get(other).has_value());
}

TEST_CASE("cache persists through a JSON file") {
  testsupport::TempDir tmp;
  auto path = tmp.path() / "cache.json";
  {
    TranslationCache cache;
    cache.put({request_for("two interesting books"), "二 趣 书", Origin::network});
    cache.save(path);
  }
  TranslationCache loaded = TranslationCache::load(path);
  CHECK(loaded.size() == 1);
  CHECK(loaded.get(request_for("two interesting books"))->target_text == "二 趣 书");
  // Missing files load as empty caches.
  CHECK(TranslationCache::load(tmp.path() / "absent.json").size() == 0);
}

TEST_CASE("cache files serialize deterministically") {
  testsupport::TempDir tmp;
  TranslationCache cache;
  cache.put({request_for("zeta last"), "末", Origin::network});
  cache.put({request_for("alpha first"), "首", Origin::network});
  cache.put({request_for("middle  entry"), "中", Origin::network});

  auto path_a = tmp.path() / "a.json";
  auto path_b = tmp.path() / "b.json";
  cache.save(path_a);
  TranslationCache::load(path_a).save(path_b);

  std::ifstream a(path_a, std::ios::binary), b(path_b, std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  // Keys are sorted, so insertion order does not leak into the file.
  CHECK(sa.str().find("alpha first") < sa.str().find("middle entry"));
  CHECK(sa.str().find("middle entry") < sa.str().find("zeta last"));
}

TEST_CASE("mock translation is compositional") {
  Translation t = mock_translate(request_for("two interesting books"), tiny_dictionary(), {});
  CHECK(t.target_text == "二 趣 书");
  CHECK(t.origin == Origin::mock);
}

TEST_CASE("mock translation rejects unknown tokens") {
  try {
    mock_translate(request_for("two shiny books"), tiny_dictionary(), {});
    FAIL("expected UnknownToken");
  } catch (const GatewayError& e) {
    CHECK(e.kind() == GatewayErrorKind::UnknownToken);
  }
}

TEST_CASE("under-translation fault drops the RTI-only token from the container") {
  // Derived by hand: without the fault both sides cover the RTI tokens,
  // distance 0. Dropping 书 from the container leaves one unmatched
  // occurrence on the RTI side, so the distance becomes 1.
  rti::detector::TokenizationMode mode{rti::detector::TokenizerKind::whitespace,
                                       rti::detector::PunctuationPolicy::strip};
  Translation rti_side = mock_translate(request_for("two interesting books"), tiny_dictionary(), {});

  FaultSpec drop;
  drop.kind = FaultKind::under_translation;
  drop.token = "书";
  Translation faulted =
      mock_translate(request_for("we read two interesting books"), tiny_dictionary(), {drop});
  CHECK(faulted.target_text == "我们 读 二 趣");

  CHECK(rti::detector::bow_distance(rti::detector::bag_of_words(rti_side.target_text, mode),
                                    rti::detector::bag_of_words(faulted.target_text, mode)) == 1);

  Translation clean =
      mock_translate(request_for("we read two interesting books"), tiny_dictionary(), {});
  CHECK(rti::detector::bow_distance(rti::detector::bag_of_words(rti_side.target_text, mode),
                                    rti::detector::bag_of_words(clean.target_text, mode)) == 0);
}

TEST_CASE("over-translation in the container is invisible to the distance") {
  rti::detector::TokenizationMode mode{rti::detector::TokenizerKind::whitespace,
                                       rti::detector::PunctuationPolicy::strip};
  Translation rti_side = mock_translate(request_for("two interesting books"), tiny_dictionary(), {});

  FaultSpec dup;
  dup.kind = FaultKind::over_translation;
  dup.token = "读";
  Translation faulted =
      mock_translate(request_for("we read two interesting books"), tiny_dictionary(), {dup});
  CHECK(faulted.target_text == "我们 读 读 二 趣 书");

  CHECK(rti::detector::bow_distance(rti::detector::bag_of_words(rti_side.target_text, mode),
                                    rti::detector::bag_of_words(faulted.target_text, mode)) == 0);
}

TEST_CASE("mistranslation substitutes the designated wrong token") {
  FaultSpec swap;
  swap.kind = FaultKind::mistranslation;
  swap.token = "书";
  swap.replacement = "树";
  Translation t = mock_translate(request_for("two interesting books"), tiny_dictionary(), {swap});
  CHECK(t.target_text == "二 趣 树");
}

TEST_CASE("faults are deterministic given a seed") {
  FaultSpec seeded;
  seeded.kind = FaultKind::under_translation;
  seeded.seed = 31337;
  auto once = mock_translate(request_for("we read two interesting books"), tiny_dictionary(),
                             {seeded});
  auto again = mock_translate(request_for("we read two interesting books"), tiny_dictionary(),
                              {seeded});
  CHECK(once.target_text == again.target_text);

  FaultSpec by_index;
  by_index.kind = FaultKind::under_translation;
  by_index.index = 0;
  CHECK(mock_translate(request_for("two interesting books"), tiny_dictionary(), {by_index})
            .target_text == "趣 书");
}

TEST_CASE("dropping every token is an empty translation error") {
  FaultSpec drop_all;
  drop_all.kind = FaultKind::under_translation;
  drop_all.token = "二";
  try {
    mock_translate(request_for("two two"), {{"two", "二"}}, {drop_all});
    FAIL("expected EmptyTranslation");
  } catch (const GatewayError& e) {
    CHECK(e.kind() == GatewayErrorKind::EmptyTranslation);
  }
}

TEST_CASE("gateway serves cache-first and writes through") {
  TranslationCache cache;
  cache.put({request_for("two interesting books"), "cached 译文", Origin::network});
  Gateway gw(std::move(cache), std::make_unique<MockBackend>(tiny_dictionary()));

  // Cache wins over the backend.
  CHECK(gw.translate(request_for("two interesting books")).target_text == "cached 译文");
  // Misses go to the backend and are cached afterwards.
  CHECK(gw.translate(request_for("we read books")).origin == Origin::mock);
  CHECK(gw.cache().get(request_for("we read books")).has_value());
}

TEST_CASE("replay-only mode raises CacheMiss for unseeded text") {
  Gateway gw(TranslationCache{}, nullptr);
  try {
    gw.translate(request_for("two interesting books"));
    FAIL("expected CacheMiss");
  } catch (const GatewayError& e) {
    CHECK(e.kind() == GatewayErrorKind::CacheMiss);
  }
}

TEST_CASE("translate_many preserves request order") {
  Gateway gw(TranslationCache{}, std::make_unique<MockBackend>(tiny_dictionary()));
  std::vector<TranslationRequest> requests = {
      request_for("books"), request_for("two books"), request_for("books"),
      request_for("interesting books"), request_for("we read two interesting books")};
  auto results = gw.translate_many(requests, 4);
  REQUIRE(results.size() == requests.size());
  CHECK(results[0].target_text == "书");
  CHECK(results[1].target_text == "二 书");
  CHECK(results[2].target_text == "书");
  CHECK(results[3].target_text == "趣 书");
  CHECK(results[4].target_text == "我们 读 二 趣 书");
}

TEST_CASE("rest backend translates, retries and writes through") {
  std::atomic<int> hits{0};
  httplib::Server server;
  server.Post("/translate", [&](const httplib::Request& req, httplib::Response& res) {
    int n = ++hits;
    // First attempt fails with a retryable status.
    if (n == 1) {
      res.status = 503;
      res.set_content("busy", "text/plain");
      return;
    }
    auto body = nlohmann::json::parse(req.body);
    CHECK(req.get_header_value("X-Api-Key") == "sekrit");
    CHECK(body.at("source").get<std::string>() == "en");
    nlohmann::json out{
        {"data", {{"translations", {{{"text", "译 " + body.at("q").get<std::string>()}}}}}}};
    res.set_content(out.dump(), "application/json");
  });

  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  setenv("RTICHECK_TEST_KEY", "sekrit", 1);
  RestConfig cfg;
  cfg.url = "http://127.0.0.1:" + std::to_string(port) + "/translate";
  cfg.body = R"({"q":"{text}","source":"{src}","target":"{tgt}"})";
  cfg.headers = {{"X-Api-Key", "{api_key}"}};
  cfg.response_path = "data.translations[0].text";
  cfg.api_key_env = "RTICHECK_TEST_KEY";
  cfg.initial_backoff_ms = 10;

  Gateway gw(TranslationCache{}, std::make_unique<RestBackend>(cfg));
  Translation t = gw.translate(request_for("two \"interesting\" books"));
  CHECK(t.target_text == "译 two \"interesting\" books");
  CHECK(t.origin == Origin::network);
  CHECK(hits == 2);  // one 503 then one success

  // Second call is served from the cache without touching the network.
  Translation cached = gw.translate(request_for("two \"interesting\" books"));
  CHECK(cached.origin == Origin::cache);
  CHECK(hits == 2);

  server.stop();
  server_thread.join();
}

TEST_CASE("rest backend supports GET with url-encoded text") {
  httplib::Server server;
  server.Get("/t", [](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json out{{"translation", "译 " + req.get_param_value("q")}};
    res.set_content(out.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RestConfig cfg;
  cfg.url = "http://127.0.0.1:" + std::to_string(port) + "/t?q={text}&from={src}&to={tgt}";
  cfg.method = "GET";
  cfg.response_path = "translation";

  RestBackend backend(cfg);
  Translation t = backend.translate(request_for("two interesting books & more"));
  CHECK(t.target_text == "译 two interesting books & more");

  server.stop();
  server_thread.join();
}

TEST_CASE("rest backend surfaces terminal failures") {
  httplib::Server server;
  server.Post("/translate", [](const httplib::Request&, httplib::Response& res) {
    res.status = 403;
    res.set_content("{\"error\":\"forbidden\"}", "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RestConfig cfg;
  cfg.url = "http://127.0.0.1:" + std::to_string(port) + "/translate";
  cfg.body = R"({"q":"{text}"})";
  cfg.response_path = "text";
  cfg.initial_backoff_ms = 1;

  RestBackend backend(cfg);
  try {
    backend.translate(request_for("books"));
    FAIL("expected NetworkFailure");
  } catch (const GatewayError& e) {
    CHECK(e.kind() == GatewayErrorKind::NetworkFailure);
    CHECK(e.status() == 403);
  }

  server.stop();
  server_thread.join();
}

TEST_SUITE_END();
