#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dgrc/metrics.hpp"
#include "dgrc/pipeline.hpp"
#include "json.hpp"

namespace dgrc {

// Files written for every run.
inline constexpr const char* kResultsFile = "results.jsonl";
inline constexpr const char* kCandidatesFile = "candidates.jsonl";
inline constexpr const char* kLongFile = "long.csv";
inline constexpr const char* kAggregateFile = "aggregate.csv";
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kFailuresFile = "failures.jsonl";

std::string results_jsonl(std::span<const PreferenceResult> rows);
std::vector<PreferenceResult> parse_results_jsonl(std::string_view text);

void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

void write_run_outputs(const std::filesystem::path& out_dir, const ExperimentOutput& output,
                       const ModelRegistry& registry, const nlohmann::json& manifest,
                       const BootstrapOptions& bootstrap);

// Results and model registry of one run directory.
struct RunResults {
  std::vector<PreferenceResult> rows;
  ModelRegistry registry;
};
RunResults load_run_results(const std::filesystem::path& run_dir);

// Plot data keyed by each figure's facets:
//   fig2.json                    Experiment 1: model x instruct x structure x swapped
//   fig_exp1_interaction.json    Experiment 1: instruct x structure
//   fig3.json                    Experiment 2: model x instruct x structure x header
//   fig_exp2_interaction.json    Experiment 2: header x structure
// Only figures whose experiment is present are written. Throws before writing
// anything when `rows` is empty. Returns the written paths.
std::vector<std::filesystem::path> write_report(const std::filesystem::path& out_dir,
                                                std::span<const PreferenceResult> rows,
                                                const ModelRegistry& registry,
                                                const BootstrapOptions& bootstrap);

}  // namespace dgrc
