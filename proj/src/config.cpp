#include "dgrc/config.hpp"

#include <fstream>
#include <sstream>

#include "dgrc/error.hpp"
#include "dgrc/http_backend.hpp"
#include "dgrc/mock_backend.hpp"
#include "dgrc/oracle_backend.hpp"

namespace dgrc {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path default_data_dir() { return fs::path(DGRC_DATA_DIR); }

PromptMode RunConfig::effective_mode() const {
  if (mode) return *mode;
  return backend.instruct ? PromptMode::kChat : PromptMode::kBase;
}

void RunConfig::validate() const {
  if (experiment != 1 && experiment != 2) throw ConfigError("experiment must be 1 or 2");
  if (backend.kind != "http" && backend.kind != "mock" && backend.kind != "oracle") {
    throw ConfigError("backend kind must be http, mock or oracle, got '" + backend.kind + "'");
  }
  if (backend.kind == "http" && backend.url.empty()) {
    throw ConfigError("http backend requires --url");
  }
  if (backend.kind == "oracle" && (!backend.oracle_delta || !(*backend.oracle_delta >= 0.0))) {
    throw ConfigError("oracle backend requires --oracle-delta >= 0");
  }
  if (backend.max_in_flight < 1) throw ConfigError("max_in_flight must be positive");
  if (k < 1) throw ConfigError("k must be at least 1");
  if (workers < 1) throw ConfigError("workers must be positive");
  if (n_boot < 1) throw ConfigError("n_boot must be positive");
  expand_grid(grid, seed);
}

json RunConfig::to_json() const {
  json b = {{"kind", backend.kind},
            {"url", backend.url},
            {"model_id", backend.effective_model_id()},
            {"instruct", backend.instruct},
            {"oracle_delta", backend.oracle_delta ? json(*backend.oracle_delta) : json(nullptr)},
            {"oracle_coord_scale", backend.oracle_coord_scale},
            {"oracle_digression_scale", backend.oracle_digression_scale},
            {"max_in_flight", backend.max_in_flight}};
  return {{"seed", seed},
          {"experiment", experiment},
          {"items", items_path.string()},
          {"names", names_path.string()},
          {"backend", std::move(b)},
          {"mode", to_string(effective_mode())},
          {"grid", dgrc::to_json(grid)},
          {"k", k},
          {"exp2_regenerate_per_header", exp2_regenerate_per_header},
          {"n_boot", n_boot}};
}

RunConfig RunConfig::from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    if (j.contains("seed")) c.seed = j["seed"].get<std::int64_t>();
    if (j.contains("experiment")) c.experiment = j["experiment"].get<int>();
    if (j.contains("items")) c.items_path = j["items"].get<std::string>();
    if (j.contains("names")) c.names_path = j["names"].get<std::string>();
    if (j.contains("mode") && !j["mode"].is_null()) {
      c.mode = parse_prompt_mode(j["mode"].get<std::string>());
    }
    if (j.contains("grid")) c.grid = grid_from_json(j["grid"], c.grid);
    if (j.contains("k")) c.k = j["k"].get<std::size_t>();
    if (j.contains("cache_dir")) c.cache_dir = fs::path(j["cache_dir"].get<std::string>());
    if (j.contains("use_cache")) c.use_cache = j["use_cache"].get<bool>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("exp2_regenerate_per_header")) {
      c.exp2_regenerate_per_header = j["exp2_regenerate_per_header"].get<bool>();
    }
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("n_boot")) c.n_boot = j["n_boot"].get<int>();
    if (j.contains("backend")) {
      const auto& b = j["backend"];
      if (!b.is_object()) throw ConfigError("backend must be a JSON object");
      if (b.contains("kind")) c.backend.kind = b["kind"].get<std::string>();
      if (b.contains("url")) c.backend.url = b["url"].get<std::string>();
      if (b.contains("model_id")) c.backend.model_id = b["model_id"].get<std::string>();
      if (b.contains("instruct")) c.backend.instruct = b["instruct"].get<bool>();
      if (b.contains("oracle_delta") && !b["oracle_delta"].is_null()) {
        c.backend.oracle_delta = b["oracle_delta"].get<double>();
      }
      if (b.contains("oracle_coord_scale")) {
        c.backend.oracle_coord_scale = b["oracle_coord_scale"].get<double>();
      }
      if (b.contains("oracle_digression_scale")) {
        c.backend.oracle_digression_scale = b["oracle_digression_scale"].get<double>();
      }
      if (b.contains("max_in_flight")) c.backend.max_in_flight = b["max_in_flight"].get<int>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_json(const json& j) { return from_json(j, RunConfig{}); }

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, RunConfig{});
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config, std::int64_t seed,
                                      std::span<const StimulusItem> items) {
  const auto scoring_seed = static_cast<std::uint64_t>(seed);
  if (config.kind == "mock") {
    return std::make_unique<MockBackend>(
        MockOptions{.model_id = config.effective_model_id(), .seed = scoring_seed});
  }
  if (config.kind == "oracle") {
    if (!config.oracle_delta) throw ConfigError("oracle backend requires a delta");
    OracleOptions options;
    options.model_id = config.effective_model_id();
    options.seed = scoring_seed;
    options.delta = *config.oracle_delta;
    options.coord_scale = config.oracle_coord_scale;
    options.digression_scale = config.oracle_digression_scale;
    return std::make_unique<OracleBackend>(options, items);
  }
  if (config.kind == "http") {
    HttpOptions options;
    options.url = config.url;
    options.model_id = config.effective_model_id();
    options.max_in_flight = config.max_in_flight;
    return std::make_unique<HttpBackend>(options);
  }
  throw ConfigError("unknown backend kind '" + config.kind + "'");
}

}  // namespace dgrc
