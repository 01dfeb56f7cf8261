#include "dgrc/cache.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <sstream>

#include "dgrc/error.hpp"
#include "dgrc/hashing.hpp"
#include "dgrc/wire.hpp"

namespace dgrc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string canonical_json(const json& value) { return value.dump(); }

std::string request_digest(const BackendIdentity& backend, const json& request) {
  const json material = {
      {"backend", backend.kind},
      {"backend_config", backend.config},
      {"model", backend.model_id},
      {"request", request},
  };
  return sha256_hex(canonical_json(material));
}

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

fs::path ResponseCache::path_for(const std::string& key) const {
  return dir_ / (key + ".json");
}

std::optional<json> ResponseCache::get(const std::string& key) {
  const fs::path path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    json value = json::parse(buffer.str());
    ++hits_;
    return value;
  } catch (const json::parse_error&) {
    spdlog::warn("corrupt cache entry {}, treating as miss", path.string());
    ++misses_;
    return std::nullopt;
  }
}

void ResponseCache::put(const std::string& key, const json& response) {
  const fs::path path = path_for(key);
  const std::string payload = canonical_json(response);
  std::lock_guard lock(write_mutex_);
  const fs::path temp = path.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache entry " + temp.string());
    out << payload;
  }
  fs::rename(temp, path);
}

std::size_t ResponseCache::entry_count() const {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") ++count;
  }
  return count;
}

std::uintmax_t ResponseCache::clear() {
  std::lock_guard lock(write_mutex_);
  std::uintmax_t removed = 0;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      fs::remove(entry.path());
      ++removed;
    }
  }
  return removed;
}

CachingBackend::CachingBackend(Backend& inner, ResponseCache& cache)
    : inner_(inner), cache_(cache), identity_(inner.identity()) {}

std::vector<GenResult> CachingBackend::generate(const Context& context,
                                                const DecodingParams& params) {
  const std::string key = request_digest(
      identity_, wire::generate_request(identity_.model_id, context, params));
  if (auto hit = cache_.get(key)) {
    try {
      return wire::parse_generate_response(*hit);
    } catch (const ProtocolError&) {
      spdlog::warn("cache entry {} has an invalid payload, refetching", key);
    }
  }
  auto results = inner_.generate(context, params);
  cache_.put(key, wire::generate_response(results));
  return results;
}

ScoreResult CachingBackend::score(const Context& context, std::string_view continuation) {
  const std::string key = request_digest(
      identity_, wire::score_request(identity_.model_id, context, continuation));
  if (auto hit = cache_.get(key)) {
    try {
      return wire::parse_score_response(*hit);
    } catch (const ProtocolError&) {
      spdlog::warn("cache entry {} has an invalid payload, refetching", key);
    }
  }
  auto result = inner_.score(context, continuation);
  cache_.put(key, wire::score_response(result));
  return result;
}

}  // namespace dgrc
