#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "dgrc/backend.hpp"
#include "dgrc/pipeline.hpp"
#include "dgrc/prompts.hpp"
#include "json.hpp"

namespace dgrc {

std::filesystem::path default_data_dir();

struct BackendConfig {
  std::string kind = "mock";  // http | mock | oracle
  std::string url;
  std::string model_id;       // defaults to `kind`
  bool instruct = false;      // declared by the user
  std::optional<double> oracle_delta;
  double oracle_coord_scale = 1.0;
  double oracle_digression_scale = 1.0;
  int max_in_flight = 4;

  std::string effective_model_id() const { return model_id.empty() ? kind : model_id; }
};

struct RunConfig {
  std::int64_t seed = 0;
  int experiment = 1;
  std::filesystem::path items_path = default_data_dir() / "items_300.tsv";
  std::filesystem::path names_path = default_data_dir() / "names.txt";
  BackendConfig backend;
  // Unset: chat for instruct models, base otherwise.
  std::optional<PromptMode> mode;
  GridSpec grid;
  std::size_t k = 10;
  std::optional<std::filesystem::path> cache_dir;
  bool use_cache = true;
  std::filesystem::path out_dir = "dgrc_out";
  bool exp2_regenerate_per_header = false;
  int workers = 4;
  int n_boot = 10000;

  PromptMode effective_mode() const;
  // Throws ConfigError.
  void validate() const;

  nlohmann::json to_json() const;
  // Keys absent from `json` keep their value from `defaults`.
  static RunConfig from_json(const nlohmann::json& json, RunConfig defaults);
  static RunConfig from_json(const nlohmann::json& json);
  static RunConfig load(const std::filesystem::path& path);
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config, std::int64_t seed,
                                      std::span<const StimulusItem> items);

}  // namespace dgrc
