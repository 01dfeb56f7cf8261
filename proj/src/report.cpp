#include "dgrc/report.hpp"

#include <fstream>
#include <sstream>

#include "dgrc/error.hpp"

namespace dgrc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string results_jsonl(std::span<const PreferenceResult> rows) {
  std::string out;
  for (const auto& row : rows) out += to_json(row).dump() + '\n';
  return out;
}

std::vector<PreferenceResult> parse_results_jsonl(std::string_view text) {
  std::vector<PreferenceResult> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(preference_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return rows;
}

void write_text_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << contents;
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_run_outputs(const fs::path& out_dir, const ExperimentOutput& output,
                       const ModelRegistry& registry, const json& manifest,
                       const BootstrapOptions& bootstrap) {
  fs::create_directories(out_dir);
  write_text_file(out_dir / kResultsFile, results_jsonl(output.rows));

  std::string candidates;
  for (const auto& record : output.records) candidates += to_json(record).dump() + '\n';
  write_text_file(out_dir / kCandidatesFile, candidates);

  write_text_file(out_dir / kLongFile, export_long(output.rows, registry));
  const auto aggregates = output.rows.empty()
                              ? std::vector<AggregateRow>{}
                              : aggregate(output.rows, GroupKeys{}, registry, bootstrap);
  write_text_file(out_dir / kAggregateFile, aggregate_csv(aggregates));

  const fs::path failures_path = out_dir / kFailuresFile;
  if (output.failures.empty()) {
    fs::remove(failures_path);
  } else {
    std::string failures;
    for (const auto& f : output.failures) {
      failures += json{{"unit", f.unit}, {"error", f.message}}.dump() + '\n';
    }
    write_text_file(failures_path, failures);
  }
  write_text_file(out_dir / kManifestFile, manifest.dump(2) + '\n');
}

RunResults load_run_results(const fs::path& run_dir) {
  RunResults results;
  const fs::path results_path = run_dir / kResultsFile;
  if (!fs::exists(results_path)) throw Error("no results found: " + results_path.string());
  results.rows = parse_results_jsonl(read_text_file(results_path));

  const fs::path manifest_path = run_dir / kManifestFile;
  if (!fs::exists(manifest_path)) throw Error("no manifest found: " + manifest_path.string());
  try {
    const json manifest = json::parse(read_text_file(manifest_path));
    for (const auto& [model, instruct] : manifest.at("models").items()) {
      results.registry[model] = instruct.get<bool>();
    }
  } catch (const json::exception& e) {
    throw Error("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  return results;
}

namespace {

json figure(std::string_view name, std::span<const PreferenceResult> rows,
            const GroupKeys& keys, const ModelRegistry& registry,
            const BootstrapOptions& bootstrap, std::vector<std::string> facets) {
  json entries = json::array();
  for (const auto& row : aggregate(rows, keys, registry, bootstrap)) {
    entries.push_back(to_json(row));
  }
  return {{"figure", name},
          {"facets", std::move(facets)},
          {"statistic", "mean vp2_pref over items"},
          {"ci", {{"method", "percentile bootstrap"},
                  {"level", bootstrap.level},
                  {"n_boot", bootstrap.n_boot},
                  {"seed", bootstrap.seed}}},
          {"entries", std::move(entries)}};
}

}  // namespace

std::vector<fs::path> write_report(const fs::path& out_dir,
                                   std::span<const PreferenceResult> rows,
                                   const ModelRegistry& registry,
                                   const BootstrapOptions& bootstrap) {
  if (rows.empty()) throw Error("no result rows to report");
  std::vector<PreferenceResult> exp1;
  std::vector<PreferenceResult> exp2;
  for (const auto& row : rows) (row.header == Header::kNone ? exp1 : exp2).push_back(row);

  std::vector<std::pair<std::string, json>> files;
  if (!exp1.empty()) {
    files.emplace_back("fig2.json",
                       figure("experiment1", exp1,
                              {.model = true, .instruct = true, .structure = true,
                               .swapped = true, .header = false},
                              registry, bootstrap,
                              {"model", "instruct", "structure", "swapped"}));
    files.emplace_back("fig_exp1_interaction.json",
                       figure("experiment1_interaction", exp1,
                              {.model = false, .instruct = true, .structure = true,
                               .swapped = false, .header = false},
                              registry, bootstrap, {"instruct", "structure"}));
  }
  if (!exp2.empty()) {
    files.emplace_back("fig3.json",
                       figure("experiment2", exp2,
                              {.model = true, .instruct = true, .structure = true,
                               .swapped = false, .header = true},
                              registry, bootstrap,
                              {"model", "instruct", "structure", "header"}));
    files.emplace_back("fig_exp2_interaction.json",
                       figure("experiment2_interaction", exp2,
                              {.model = false, .instruct = false, .structure = true,
                               .swapped = false, .header = true},
                              registry, bootstrap, {"header", "structure"}));
  }

  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (const auto& [name, data] : files) {
    write_text_file(out_dir / name, data.dump(2) + '\n');
    written.push_back(out_dir / name);
  }
  return written;
}

}  // namespace dgrc
