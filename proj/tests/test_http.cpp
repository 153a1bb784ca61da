#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "namegame/scoring.hpp"

using namespace namegame;
using namespace namegame::scoring;
using nlohmann::json;

namespace {

// in-process wire-protocol server for exercising HttpBackend
class TestServer {
 public:
  explicit TestServer(httplib::Server::Handler handler) {
    server_.Post("/score", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/score";
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpBackend fast_backend(const std::string& endpoint) {
  return HttpBackend(endpoint, std::chrono::milliseconds(2000), 3,
                     std::chrono::milliseconds(1));
}

}  // namespace

TEST_CASE("http backend round trip") {
  TestServer server([](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    json scores = json::array();
    for (const auto& c : body.at("continuations"))
      scores.push_back(-0.5 * (1.0 + c.get<std::string>().size()));
    res.set_content(json{{"scores", scores}, {"normalized", true}}.dump(),
                    "application/json");
  });
  auto backend = fast_backend(server.endpoint());
  ScoreRequest req{"prompt", {"7", "10"}};
  const auto resp = backend.score(req);
  REQUIRE(resp.scores.size() == 2);
  CHECK(resp.scores[0] == doctest::Approx(-1.0));
  CHECK(resp.scores[1] == doctest::Approx(-1.5));
  CHECK(resp.normalized);
}

TEST_CASE("http backend protocol errors are permanent") {
  SUBCASE("4xx rejection") {
    TestServer server([](const httplib::Request&, httplib::Response& res) {
      res.status = 400;
      res.set_content("bad prompt", "text/plain");
    });
    auto backend = fast_backend(server.endpoint());
    ScoreRequest req{"prompt", {"a"}};
    CHECK_THROWS_AS(backend.score(req), ProtocolError);
  }
  SUBCASE("mismatched response length") {
    TestServer server([](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"scores": [1.0]})", "application/json");
    });
    auto backend = fast_backend(server.endpoint());
    ScoreRequest req{"prompt", {"a", "b"}};
    CHECK_THROWS_AS(backend.score(req), ProtocolError);
  }
  SUBCASE("invalid JSON body") {
    TestServer server([](const httplib::Request&, httplib::Response& res) {
      res.set_content("not json", "application/json");
    });
    auto backend = fast_backend(server.endpoint());
    ScoreRequest req{"prompt", {"a"}};
    CHECK_THROWS_AS(backend.score(req), ProtocolError);
  }
  SUBCASE("missing scores array") {
    TestServer server([](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"result": []})", "application/json");
    });
    auto backend = fast_backend(server.endpoint());
    ScoreRequest req{"prompt", {"a"}};
    CHECK_THROWS_AS(backend.score(req), ProtocolError);
  }
}

TEST_CASE("http backend retries transport failures") {
  SUBCASE("unreachable endpoint raises TransportError after retries") {
    HttpBackend backend("http://127.0.0.1:1/score",
                        std::chrono::milliseconds(200), 2,
                        std::chrono::milliseconds(1));
    ScoreRequest req{"prompt", {"a"}};
    CHECK_THROWS_AS(backend.score(req), TransportError);
  }
  SUBCASE("5xx then success recovers") {
    std::atomic<int> calls{0};
    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
      if (calls.fetch_add(1) == 0) {
        res.status = 503;
        return;
      }
      const json body = json::parse(req.body);
      json scores = json::array();
      for (std::size_t i = 0; i < body.at("continuations").size(); ++i)
        scores.push_back(-1.0);
      res.set_content(json{{"scores", scores}}.dump(), "application/json");
    });
    auto backend = fast_backend(server.endpoint());
    ScoreRequest req{"prompt", {"a"}};
    const auto resp = backend.score(req);
    CHECK(resp.scores[0] == -1.0);
    CHECK(calls.load() == 2);
    CHECK_FALSE(resp.normalized);
  }
}

TEST_CASE("scoring client over http caches per pair") {
  std::atomic<int> calls{0};
  TestServer server([&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    const json body = json::parse(req.body);
    json scores = json::array();
    for (const auto& c : body.at("continuations"))
      scores.push_back(-static_cast<double>(c.get<std::string>().size()));
    res.set_content(json{{"scores", scores}}.dump(), "application/json");
  });

  testutil::TempDir tmp;
  BackendConfig config;
  config.endpoint = server.endpoint();
  config.cache_dir = tmp.path / "cache";
  config.retry_backoff = std::chrono::milliseconds(1);
  ScoringClient client(make_backend(config), config);

  ScoreRequest req{"prompt", {"1", "22", "333"}};
  const auto first = client.score(req);
  const auto second = client.score(req);
  CHECK(first.scores == second.scores);
  CHECK(calls.load() == 1);
}
