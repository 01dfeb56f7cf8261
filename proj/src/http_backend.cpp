#include "dgrc/http_backend.hpp"

#include <spdlog/spdlog.h>

#include <thread>

#include "dgrc/error.hpp"
#include "dgrc/http_server.hpp"
#include "dgrc/wire.hpp"

namespace dgrc {
namespace {

using nlohmann::json;

class SlotGuard {
 public:
  SlotGuard(std::mutex& mutex, std::condition_variable& cv, int& in_flight, int limit)
      : mutex_(mutex), cv_(cv), in_flight_(in_flight) {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return in_flight_ < limit; });
    ++in_flight_;
  }
  ~SlotGuard() {
    {
      std::lock_guard lock(mutex_);
      --in_flight_;
    }
    cv_.notify_one();
  }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::mutex& mutex_;
  std::condition_variable& cv_;
  int& in_flight_;
};

bool needs_leading_space(const Context& context) {
  return context_header(context) != Header::kNone;
}

}  // namespace

HttpBackend::HttpBackend(HttpOptions options) : options_(std::move(options)) {
  if (options_.url.empty()) throw ConfigError("http backend requires a url");
  if (options_.max_in_flight < 1) throw ConfigError("max_in_flight must be positive");
  if (options_.max_attempts < 1) throw ConfigError("max_attempts must be positive");
  const std::string scheme = "http://";
  if (options_.url.rfind(scheme, 0) != 0) {
    throw ConfigError("only http:// urls are supported: " + options_.url);
  }
  const std::size_t path = options_.url.find('/', scheme.size());
  scheme_host_port_ = options_.url.substr(0, path);
  if (path != std::string::npos) {
    path_prefix_ = options_.url.substr(path);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

json HttpBackend::post(const char* path, const json& body) {
  SlotGuard slot(slots_mutex_, slots_cv_, in_flight_, options_.max_in_flight);
  const std::string payload = body.dump();
  const std::string target = path_prefix_ + path;
  auto backoff = options_.initial_backoff;
  std::string last_error;

  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    const auto response = client.Post(target, payload, "application/json");

    if (!response) {
      last_error = "transport error: " + httplib::to_string(response.error());
    } else if (response->status >= 400 && response->status < 500) {
      throw BackendRejected("POST " + target + " rejected with HTTP " +
                                std::to_string(response->status) + ": " + response->body,
                            response->status);
    } else if (response->status >= 500) {
      last_error = "HTTP " + std::to_string(response->status);
    } else {
      try {
        return json::parse(response->body);
      } catch (const json::parse_error& e) {
        throw ProtocolError("POST " + target + " returned invalid JSON: " + e.what());
      }
    }

    if (attempt < options_.max_attempts) {
      spdlog::warn("POST {} failed ({}), retry {}/{} in {} ms", target, last_error,
                   attempt, options_.max_attempts - 1, backoff.count());
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError("POST " + target + " failed: " + last_error, options_.max_attempts);
}

std::vector<GenResult> HttpBackend::generate(const Context& context,
                                             const DecodingParams& params) {
  params.validate();
  auto results = wire::parse_generate_response(
      post(wire::kGeneratePath, wire::generate_request(options_.model_id, context, params)));
  const int limit = params.strategy == Strategy::kGreedy ? 1 : params.n;
  if (static_cast<int>(results.size()) > limit) results.resize(limit);
  return results;
}

ScoreResult HttpBackend::score(const Context& context, std::string_view continuation) {
  if (continuation.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw InvalidInput("continuation is empty");
  }
  std::string sent(continuation);
  if (needs_leading_space(context) && sent.front() != ' ') sent.insert(0, 1, ' ');
  return wire::parse_score_response(
      post(wire::kScorePath, wire::score_request(options_.model_id, context, sent)));
}

BackendIdentity HttpBackend::identity() const {
  return {"http", options_.model_id, {{"url", options_.url}}};
}

void mount_wire_routes(httplib::Server& server, Backend& backend) {
  const auto reply = [](httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };
  server.Post(wire::kGeneratePath, [&backend, reply](const httplib::Request& req,
                                                     httplib::Response& res) {
    try {
      const auto request = wire::parse_generate_request(json::parse(req.body));
      const auto results = backend.generate(request.context, request.params);
      reply(res, 200, wire::generate_response(results));
    } catch (const json::parse_error& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const InvalidInput& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
      reply(res, 500, {{"error", e.what()}});
    }
  });
  server.Post(wire::kScorePath, [&backend, reply](const httplib::Request& req,
                                                  httplib::Response& res) {
    try {
      const auto request = wire::parse_score_request(json::parse(req.body));
      reply(res, 200, wire::score_response(backend.score(request.context, request.continuation)));
    } catch (const json::parse_error& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const InvalidInput& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
      reply(res, 500, {{"error", e.what()}});
    }
  });
}

}  // namespace dgrc
