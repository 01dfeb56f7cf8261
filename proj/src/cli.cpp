#include "dgrc/cli.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <vector>

#include "CLI11.hpp"
#include "dgrc/cache.hpp"
#include "dgrc/config.hpp"
#include "dgrc/error.hpp"
#include "dgrc/hashing.hpp"
#include "dgrc/report.hpp"

namespace dgrc {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kDefaultCacheDir = ".dgrc_cache";

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

fs::path resolve_cache_dir(const std::optional<fs::path>& configured) {
  if (configured) return *configured;
  if (const char* env = std::getenv("DGRC_CACHE_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return kDefaultCacheDir;
}

// ---- build-stimuli --------------------------------------------------------

struct BuildStimuliArgs {
  std::string items = (default_data_dir() / "items_300.tsv").string();
  std::string structure = "both";
  bool swap_only = false;
  bool no_swap = false;
  std::string out = "variants.jsonl";
};

int cmd_build_stimuli(const BuildStimuliArgs& args, std::ostream& out, std::ostream& err) {
  if (!fs::exists(args.items)) {
    err << "error: items file not found: " << args.items << "\n";
    return kExitUsage;
  }
  if (args.swap_only && args.no_swap) {
    err << "error: --swap and --no-swap are mutually exclusive\n";
    return kExitUsage;
  }
  std::vector<StimulusItem> items;
  try {
    items = load_items(args.items);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::vector<Structure> structures;
  if (args.structure == "arc" || args.structure == "both") structures.push_back(Structure::kArc);
  if (args.structure == "coord" || args.structure == "both") structures.push_back(Structure::kCoord);
  std::vector<bool> swaps;
  if (!args.swap_only) swaps.push_back(false);
  if (!args.no_swap) swaps.push_back(true);

  std::string lines;
  std::size_t count = 0;
  for (const auto& item : items) {
    for (const auto structure : structures) {
      for (const bool swapped : swaps) {
        lines += to_json(build_variant(item, structure, swapped)).dump() + '\n';
        ++count;
      }
    }
  }
  write_text_file(args.out, lines);
  out << items.size() << " items, " << count << " variants written to " << args.out << "\n";
  return kExitOk;
}

// ---- run ------------------------------------------------------------------

struct RunFlags {
  std::string config;
  std::string items;
  std::string names;
  int experiment = 1;
  std::string backend;
  std::string url;
  std::string model;
  bool instruct = false;
  double oracle_delta = 0.0;
  double oracle_coord_scale = 1.0;
  double oracle_digression_scale = 1.0;
  std::int64_t seed = 0;
  std::size_t k = 10;
  std::string out;
  std::string cache_dir;
  bool no_cache = false;
  std::string mode;
  int workers = 4;
  int max_in_flight = 4;
  int samples_per_config = 5;
  int max_tokens = 40;
  int n_boot = 10000;
  bool exp2_regenerate = false;
};

struct RunOptions {
  CLI::Option* items;
  CLI::Option* names;
  CLI::Option* experiment;
  CLI::Option* backend;
  CLI::Option* url;
  CLI::Option* model;
  CLI::Option* instruct;
  CLI::Option* oracle_delta;
  CLI::Option* oracle_coord_scale;
  CLI::Option* oracle_digression_scale;
  CLI::Option* seed;
  CLI::Option* k;
  CLI::Option* out;
  CLI::Option* cache_dir;
  CLI::Option* no_cache;
  CLI::Option* mode;
  CLI::Option* workers;
  CLI::Option* max_in_flight;
  CLI::Option* samples_per_config;
  CLI::Option* max_tokens;
  CLI::Option* n_boot;
  CLI::Option* exp2_regenerate;
};

RunConfig resolve_run_config(const RunFlags& f, const RunOptions& o) {
  RunConfig c;
  if (!f.config.empty()) c = RunConfig::load(f.config);
  const auto given = [](CLI::Option* opt) { return opt->count() > 0; };
  if (given(o.items)) c.items_path = f.items;
  if (given(o.names)) c.names_path = f.names;
  if (given(o.experiment)) c.experiment = f.experiment;
  if (given(o.backend)) c.backend.kind = f.backend;
  if (given(o.url)) c.backend.url = f.url;
  if (given(o.model)) c.backend.model_id = f.model;
  if (given(o.instruct)) c.backend.instruct = f.instruct;
  if (given(o.oracle_delta)) c.backend.oracle_delta = f.oracle_delta;
  if (given(o.oracle_coord_scale)) c.backend.oracle_coord_scale = f.oracle_coord_scale;
  if (given(o.oracle_digression_scale)) {
    c.backend.oracle_digression_scale = f.oracle_digression_scale;
  }
  if (given(o.max_in_flight)) c.backend.max_in_flight = f.max_in_flight;
  if (given(o.seed)) c.seed = f.seed;
  if (given(o.k)) c.k = f.k;
  if (given(o.out)) c.out_dir = f.out;
  if (given(o.cache_dir)) c.cache_dir = fs::path(f.cache_dir);
  if (given(o.no_cache)) c.use_cache = false;
  if (given(o.mode)) c.mode = parse_prompt_mode(f.mode);
  if (given(o.workers)) c.workers = f.workers;
  if (given(o.samples_per_config)) c.grid.samples_per_config = f.samples_per_config;
  if (given(o.max_tokens)) c.grid.max_tokens = f.max_tokens;
  if (given(o.n_boot)) c.n_boot = f.n_boot;
  if (given(o.exp2_regenerate)) c.exp2_regenerate_per_header = true;
  c.validate();
  return c;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<StimulusItem> items;
  std::optional<NamePool> names;
  try {
    if (!fs::exists(config.items_path)) {
      throw ConfigError("items file not found: " + config.items_path.string());
    }
    items = load_items(config.items_path);
    if (config.effective_mode() == PromptMode::kBase) names = NamePool::load(config.names_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string started_at = utc_timestamp();
  auto backend = make_backend(config.backend, config.seed, items);
  CountingBackend counting(*backend);
  std::optional<ResponseCache> cache;
  std::optional<CachingBackend> caching;
  Backend* top = &counting;
  if (config.use_cache) {
    cache.emplace(resolve_cache_dir(config.cache_dir));
    caching.emplace(counting, *cache);
    top = &*caching;
  }

  const std::string model_id = config.backend.effective_model_id();
  const ModelHandle model{model_id, top,
                          PromptSettings{config.effective_mode(), names ? &*names : nullptr,
                                         static_cast<std::uint64_t>(config.seed)}};
  ExperimentConfig experiment;
  experiment.grid = config.grid;
  experiment.k = config.k;
  experiment.seed = config.seed;
  experiment.workers = config.workers;
  experiment.exp2_regenerate_per_header = config.exp2_regenerate_per_header;

  const std::span<const ModelHandle> models(&model, 1);
  const ExperimentOutput output = config.experiment == 1
                                      ? run_experiment1(items, models, experiment)
                                      : run_experiment2(items, models, experiment);

  const ModelRegistry registry{{model_id, config.backend.instruct}};
  const json effective = config.to_json();
  const BackendIdentity identity = backend->identity();
  const json manifest = {
      {"tool", "dgrc"},
      {"code_version", DGRC_VERSION},
      {"experiment", config.experiment},
      {"seed", config.seed},
      {"config", effective},
      {"config_hash", sha256_hex(canonical_json(effective))},
      {"grid", {{"spec", to_json(config.grid)},
                {"configurations", expand_grid(config.grid, config.seed).size()}}},
      {"backend", {{"kind", identity.kind}, {"model_id", identity.model_id},
                   {"config", identity.config}}},
      {"models", {{model_id, config.backend.instruct}}},
      {"items", {{"path", config.items_path.string()},
                 {"count", items.size()},
                 {"sha256", sha256_hex(read_text_file(config.items_path))}}},
      {"cache", config.use_cache ? json(resolve_cache_dir(config.cache_dir).string())
                                 : json(nullptr)},
      {"counts", {{"rows", output.rows.size()},
                  {"generation_units", output.generation_units},
                  {"scoring_units", output.scoring_units},
                  {"failed_units", output.failures.size()},
                  {"shortfall_pools", output.shortfall_pools},
                  {"backend_generate_requests", counting.generate_calls()},
                  {"backend_score_requests", counting.score_calls()},
                  {"cache_hits", cache ? cache->hits() : 0}}},
      {"started_at", started_at},
      {"finished_at", utc_timestamp()},
  };
  write_run_outputs(config.out_dir, output, registry, manifest,
                    BootstrapOptions{.n_boot = config.n_boot,
                                     .seed = static_cast<std::uint64_t>(config.seed)});

  out << "experiment " << config.experiment << ": " << output.rows.size() << " rows, "
      << output.failures.size() << " failed units\n"
      << "backend requests: " << counting.generate_calls() << " generate, "
      << counting.score_calls() << " score";
  if (cache) out << "; cache hits: " << cache->hits();
  out << "\nwrote " << config.out_dir.string() << "\n";
  for (const auto& failure : output.failures) {
    err << "failed: " << failure.unit << ": " << failure.message << "\n";
  }
  return output.failures.empty() ? kExitOk : kExitFailure;
}

// ---- report / cache ---------------------------------------------------------

int cmd_report(const std::vector<std::string>& result_dirs, const std::string& out_dir,
               int n_boot, std::uint64_t seed, std::ostream& out) {
  std::vector<PreferenceResult> rows;
  ModelRegistry registry;
  for (const auto& dir : result_dirs) {
    auto run = load_run_results(dir);
    rows.insert(rows.end(), run.rows.begin(), run.rows.end());
    registry.insert(run.registry.begin(), run.registry.end());
  }
  std::sort(rows.begin(), rows.end(), row_order);
  const auto written =
      write_report(out_dir, rows, registry, BootstrapOptions{.n_boot = n_boot, .seed = seed});
  for (const auto& path : written) out << "wrote " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"DGRC evaluation harness: divide, generate, recombine, compare", "dgrc"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress details");

  BuildStimuliArgs build;
  auto* build_cmd = app.add_subcommand("build-stimuli", "Write ARC/COORD utterance variants");
  build_cmd->add_option("--items", build.items, "Stimulus table (TSV)");
  build_cmd->add_option("--structure", build.structure, "arc, coord or both")
      ->check(CLI::IsMember({"arc", "coord", "both"}));
  build_cmd->add_flag("--swap", build.swap_only, "Only swapped variants");
  build_cmd->add_flag("--no-swap", build.no_swap, "Only unswapped variants");
  build_cmd->add_option("--out", build.out, "Output JSON-lines file");

  RunFlags flags;
  RunOptions opts{};
  auto* run_cmd = app.add_subcommand("run", "Run experiment 1 or 2");
  run_cmd->add_option("--config", flags.config, "JSON run configuration");
  opts.items = run_cmd->add_option("--items", flags.items, "Stimulus table (TSV)");
  opts.names = run_cmd->add_option("--names", flags.names, "Name list for base prompts");
  opts.experiment = run_cmd->add_option("--experiment", flags.experiment, "1 or 2")
                        ->check(CLI::IsMember({1, 2}));
  opts.backend = run_cmd->add_option("--backend", flags.backend, "http, mock or oracle")
                     ->check(CLI::IsMember({"http", "mock", "oracle"}));
  opts.url = run_cmd->add_option("--url", flags.url, "Wire-protocol server URL");
  opts.model = run_cmd->add_option("--model", flags.model, "Model id");
  opts.instruct = run_cmd->add_flag("--instruct", flags.instruct, "Model is instruct-tuned");
  opts.oracle_delta = run_cmd->add_option("--oracle-delta", flags.oracle_delta, "Oracle bias");
  opts.oracle_coord_scale = run_cmd->add_option(
      "--oracle-coord-scale", flags.oracle_coord_scale, "Oracle bias multiplier for COORD");
  opts.oracle_digression_scale =
      run_cmd->add_option("--oracle-digression-scale", flags.oracle_digression_scale,
                          "Oracle bias multiplier for ARC under the digression header");
  opts.seed = run_cmd->add_option("--seed", flags.seed, "Run seed");
  opts.k = run_cmd->add_option("--k", flags.k, "Candidates kept per sub-utterance");
  opts.out = run_cmd->add_option("--out", flags.out, "Output directory");
  opts.cache_dir = run_cmd->add_option("--cache-dir", flags.cache_dir,
                                       "Response cache (default $DGRC_CACHE_DIR)");
  opts.no_cache = run_cmd->add_flag("--no-cache", flags.no_cache, "Disable the response cache");
  opts.mode = run_cmd->add_option("--mode", flags.mode, "chat or base prompts")
                  ->check(CLI::IsMember({"chat", "base"}));
  opts.workers = run_cmd->add_option("--workers", flags.workers, "Concurrent work units");
  opts.max_in_flight =
      run_cmd->add_option("--max-in-flight", flags.max_in_flight, "HTTP request limit");
  opts.samples_per_config = run_cmd->add_option("--samples-per-config",
                                                flags.samples_per_config, "Samples per config");
  opts.max_tokens = run_cmd->add_option("--max-tokens", flags.max_tokens, "Generation length");
  opts.n_boot = run_cmd->add_option("--n-boot", flags.n_boot, "Bootstrap resamples");
  opts.exp2_regenerate = run_cmd->add_flag("--exp2-regenerate-per-header",
                                           flags.exp2_regenerate,
                                           "Experiment 2: generate under each header");

  std::vector<std::string> report_results;
  std::string report_out = "dgrc_report";
  int report_boot = 10000;
  std::uint64_t report_seed = 0;
  auto* report_cmd = app.add_subcommand("report", "Write plot data from run results");
  report_cmd->add_option("--results", report_results, "Run output directories")->required();
  report_cmd->add_option("--out", report_out, "Report directory");
  report_cmd->add_option("--n-boot", report_boot, "Bootstrap resamples");
  report_cmd->add_option("--seed", report_seed, "Bootstrap seed");

  std::string cache_action;
  std::string cache_dir_flag;
  auto* cache_cmd = app.add_subcommand("cache", "Inspect or clear the response cache");
  cache_cmd->add_option("action", cache_action, "inspect or clear")
      ->required()
      ->check(CLI::IsMember({"inspect", "clear"}));
  cache_cmd->add_option("--cache-dir", cache_dir_flag, "Cache directory");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (*build_cmd) return cmd_build_stimuli(build, out, err);
    if (*run_cmd) return cmd_run(resolve_run_config(flags, opts), out, err);
    if (*report_cmd) {
      return cmd_report(report_results, report_out, report_boot, report_seed, out);
    }
    if (*cache_cmd) {
      const fs::path dir = resolve_cache_dir(
          cache_dir_flag.empty() ? std::nullopt : std::optional<fs::path>(cache_dir_flag));
      if (!fs::exists(dir)) {
        out << dir.string() << ": no cache\n";
        return kExitOk;
      }
      ResponseCache cache(dir);
      if (cache_action == "clear") {
        out << "removed " << cache.clear() << " entries from " << dir.string() << "\n";
      } else {
        out << dir.string() << ": " << cache.entry_count() << " entries\n";
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace dgrc
