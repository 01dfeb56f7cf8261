#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>

#include "dgrc/backend.hpp"

namespace dgrc {

struct HttpOptions {
  std::string url;  // http://host[:port][/prefix]
  std::string model_id;
  int max_in_flight = 4;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::seconds timeout{120};
};

// Client for the generate/score wire protocol. 5xx responses and transport
// failures are retried with exponential backoff; 4xx responses are fatal.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpOptions options);

  std::vector<GenResult> generate(const Context& context,
                                  const DecodingParams& params) override;
  ScoreResult score(const Context& context,
                    std::string_view continuation) override;
  BackendIdentity identity() const override;

 private:
  nlohmann::json post(const char* path, const nlohmann::json& body);

  HttpOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;

  std::mutex slots_mutex_;
  std::condition_variable slots_cv_;
  int in_flight_ = 0;
};

}  // namespace dgrc
