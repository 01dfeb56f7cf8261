#pragma once

#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "dgrc/backend.hpp"
#include "json.hpp"

namespace dgrc {

// Canonical form: sorted keys, no insignificant whitespace.
std::string canonical_json(const nlohmann::json& value);

// Hex SHA-256 of the canonical JSON of (backend identity, request).
std::string request_digest(const BackendIdentity& backend,
                           const nlohmann::json& request);

// Content-addressed response store: `<dir>/<digest>.json` holding the
// canonical JSON response. Reads are lock-free; writes are serialized and
// atomic (write to a temporary file, then rename).
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  // Unparseable entries are reported as misses and logged.
  std::optional<nlohmann::json> get(const std::string& key);
  void put(const std::string& key, const nlohmann::json& response);

  std::size_t entry_count() const;
  std::uintmax_t clear();

  const std::filesystem::path& dir() const { return dir_; }
  std::int64_t hits() const { return hits_.load(); }
  std::int64_t misses() const { return misses_.load(); }

 private:
  std::filesystem::path path_for(const std::string& key) const;

  std::filesystem::path dir_;
  std::mutex write_mutex_;
  std::atomic<std::int64_t> hits_{0};
  std::atomic<std::int64_t> misses_{0};
};

// Serves generate/score from the cache, forwarding misses to `inner`.
class CachingBackend : public Backend {
 public:
  CachingBackend(Backend& inner, ResponseCache& cache);

  std::vector<GenResult> generate(const Context& context,
                                  const DecodingParams& params) override;
  ScoreResult score(const Context& context,
                    std::string_view continuation) override;
  BackendIdentity identity() const override { return identity_; }

 private:
  Backend& inner_;
  ResponseCache& cache_;
  BackendIdentity identity_;
};

}  // namespace dgrc
