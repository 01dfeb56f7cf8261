#include "dgrc/http_backend.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <thread>

#include "dgrc/error.hpp"
#include "dgrc/http_server.hpp"
#include "dgrc/mock_backend.hpp"
#include "dgrc/wire.hpp"

namespace dgrc {
namespace {

using namespace std::chrono_literals;

// httplib server on an ephemeral port, run on a background thread.
class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpOptions fast_options(const std::string& url) {
  HttpOptions o;
  o.url = url;
  o.model_id = "remote";
  o.initial_backoff = 5ms;
  o.timeout = 10s;
  return o;
}

TEST(HttpBackendTest, MatchesInProcessMock) {
  MockBackend mock(MockOptions{.seed = 4});
  LocalServer local;
  mount_wire_routes(local.server(), mock);
  HttpBackend http(fast_options(local.url()));

  DecodingParams p;
  p.strategy = Strategy::kSample;
  p.temperature = 0.7;
  p.n = 3;
  p.seed = 2;
  const Context chat = render_chat("The librarian likes pasta.", Header::kNone);
  const Context text{std::string("Marco said, \"The librarian likes pasta,\" and Ellie replied, \"")};
  EXPECT_EQ(http.generate(chat, p), mock.generate(chat, p));
  EXPECT_EQ(http.generate(text, greedy_params(40, 1)), mock.generate(text, greedy_params(40, 1)));
  EXPECT_EQ(http.score(chat, "Oh really."), mock.score(chat, "Oh really."));
  EXPECT_EQ(http.score(text, "Oh really."), mock.score(text, "Oh really."));
}

TEST(HttpBackendTest, LeadingSpaceAfterHeader) {
  LocalServer local;
  std::vector<std::string> seen;
  std::mutex mutex;
  local.server().Post(wire::kScorePath, [&](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    {
      std::lock_guard lock(mutex);
      seen.push_back(body["continuation"].get<std::string>());
    }
    res.set_content(R"({"tokens":["x"],"token_logprobs":[-1.0]})", "application/json");
  });
  HttpBackend http(fast_options(local.url()));
  http.score(render_chat("A b.", Header::kReject), "Yes.");
  http.score(render_chat("A b.", Header::kNone), "Yes.");
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0], " Yes.");
  EXPECT_EQ(seen[1], "Yes.");
}

TEST(HttpBackendTest, ServerErrorsAreRetried) {
  MockBackend mock;
  LocalServer local;
  std::atomic<int> calls{0};
  local.server().Post(wire::kScorePath, [&](const httplib::Request& req, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 503;
      return;
    }
    const auto r = wire::parse_score_request(nlohmann::json::parse(req.body));
    res.set_content(wire::score_response(mock.score(r.context, r.continuation)).dump(),
                    "application/json");
  });
  HttpBackend http(fast_options(local.url()));
  const Context ctx{std::string("hello")};
  EXPECT_EQ(http.score(ctx, "Oh."), mock.score(ctx, "Oh."));
  EXPECT_EQ(calls.load(), 3);
}

TEST(HttpBackendTest, PersistentServerErrorExhaustsRetries) {
  LocalServer local;
  std::atomic<int> calls{0};
  local.server().Post(wire::kScorePath, [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  HttpBackend http(fast_options(local.url()));
  try {
    http.score(Context{std::string("hello")}, "Oh.");
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.attempts(), 3);
  }
  EXPECT_EQ(calls.load(), 3);
}

TEST(HttpBackendTest, ClientErrorsAreFatal) {
  LocalServer local;
  std::atomic<int> calls{0};
  local.server().Post(wire::kScorePath, [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 422;
    res.set_content("bad", "text/plain");
  });
  HttpBackend http(fast_options(local.url()));
  try {
    http.score(Context{std::string("hello")}, "Oh.");
    FAIL() << "expected BackendRejected";
  } catch (const BackendRejected& e) {
    EXPECT_EQ(e.status(), 422);
  }
  EXPECT_EQ(calls.load(), 1);
}

TEST(HttpBackendTest, MissingLogprobsIsProtocolError) {
  LocalServer local;
  local.server().Post(wire::kGeneratePath, [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices":[{"text":"a","tokens":["a"]}]})", "application/json");
  });
  HttpBackend http(fast_options(local.url()));
  EXPECT_THROW(http.generate(Context{std::string("x")}, greedy_params(40, 0)), ProtocolError);
}

TEST(HttpBackendTest, UnreachableServerIsTransportError) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  auto opts = fast_options("http://127.0.0.1:" + std::to_string(port));
  opts.timeout = 1s;
  HttpBackend http(opts);
  EXPECT_THROW(http.score(Context{std::string("x")}, "y"), TransportError);
}

TEST(HttpBackendTest, InFlightRequestsAreBounded) {
  LocalServer local;
  std::atomic<int> current{0};
  std::atomic<int> peak{0};
  local.server().Post(wire::kScorePath, [&](const httplib::Request&, httplib::Response& res) {
    const int now = ++current;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(40ms);
    --current;
    res.set_content(R"({"tokens":["x"],"token_logprobs":[-1.0]})", "application/json");
  });
  auto opts = fast_options(local.url());
  opts.max_in_flight = 2;
  HttpBackend http(opts);
  std::vector<std::jthread> clients;
  for (int i = 0; i < 6; ++i) {
    clients.emplace_back([&] { http.score(Context{std::string("x")}, "y"); });
  }
  clients.clear();
  EXPECT_LE(peak.load(), 2);
  EXPECT_GE(peak.load(), 1);
}

TEST(HttpBackendTest, PathPrefixIsHonoured) {
  MockBackend mock;
  LocalServer local;
  local.server().Post("/api/v1/score", [&](const httplib::Request& req, httplib::Response& res) {
    const auto r = wire::parse_score_request(nlohmann::json::parse(req.body));
    res.set_content(wire::score_response(mock.score(r.context, r.continuation)).dump(),
                    "application/json");
  });
  HttpBackend http(fast_options(local.url() + "/api/"));
  EXPECT_NO_THROW(http.score(Context{std::string("x")}, "y"));
}

TEST(HttpBackendTest, RejectsBadConfiguration) {
  EXPECT_THROW(HttpBackend(HttpOptions{}), ConfigError);
  EXPECT_THROW(HttpBackend(fast_options("https://example.com")), ConfigError);
  auto o = fast_options("http://localhost:1");
  o.max_in_flight = 0;
  EXPECT_THROW(HttpBackend{o}, ConfigError);
}

TEST(HttpBackendTest, RoutesAnswerMalformedRequestsWith400) {
  MockBackend mock;
  LocalServer local;
  mount_wire_routes(local.server(), mock);
  httplib::Client client(local.url());
  const auto res = client.Post(wire::kScorePath, "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  const auto empty = client.Post(wire::kScorePath,
                                 R"({"model":"m","mode":"text","context_text":"x","continuation":" "})",
                                 "application/json");
  ASSERT_TRUE(empty);
  EXPECT_EQ(empty->status, 400);
}

}  // namespace
}  // namespace dgrc
