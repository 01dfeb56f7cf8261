#include "dgrc/metrics.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>

#include "dgrc/error.hpp"
#include "dgrc/hashing.hpp"

namespace dgrc {
namespace {

using nlohmann::json;

bool instruct_of(const ModelRegistry& registry, const std::string& model_id) {
  const auto it = registry.find(model_id);
  if (it == registry.end()) throw InvalidInput("unknown model_id '" + model_id + "'");
  return it->second;
}

// Linear-interpolated quantile of sorted data.
double quantile(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

using GroupKey = std::tuple<std::string, int, int, int, int>;

}  // namespace

json to_json(const PreferenceResult& row) {
  return {
      {"item_id", row.item_id},     {"model_id", row.model_id},
      {"structure", to_string(row.structure)},
      {"swapped", row.swapped},     {"header", to_string(row.header)},
      {"vp2_pref", row.vp2_pref},   {"n1", row.n1},
      {"n2", row.n2},               {"ties", row.ties},
      {"comparisons", row.comparisons()},
  };
}

PreferenceResult preference_from_json(const json& j) {
  try {
    PreferenceResult row;
    row.item_id = j.at("item_id").get<std::string>();
    row.model_id = j.at("model_id").get<std::string>();
    row.structure = parse_structure(j.at("structure").get<std::string>());
    row.swapped = j.at("swapped").get<bool>();
    row.header = parse_header(j.at("header").get<std::string>());
    row.vp2_pref = j.at("vp2_pref").get<double>();
    row.n1 = j.at("n1").get<int>();
    row.n2 = j.at("n2").get<int>();
    row.ties = j.at("ties").get<std::int64_t>();
    return row;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed result row: ") + e.what());
  }
}

bool row_order(const PreferenceResult& a, const PreferenceResult& b) {
  return std::tie(a.model_id, a.item_id, a.structure, a.swapped, a.header) <
         std::tie(b.model_id, b.item_id, b.structure, b.swapped, b.header);
}

double per_token_score(double logprob_sum, int n_tokens) {
  if (n_tokens < 1) throw InvalidInput("per-token score needs at least one token");
  return logprob_sum / static_cast<double>(n_tokens);
}

Preference vp2_preference(std::span<const double> scores1,
                          std::span<const double> scores2) {
  if (scores1.empty()) throw InvalidInput("vp2_preference: slot-1 scores are empty");
  if (scores2.empty()) throw InvalidInput("vp2_preference: slot-2 scores are empty");
  std::vector<double> sorted1(scores1.begin(), scores1.end());
  std::sort(sorted1.begin(), sorted1.end());
  Preference out;
  for (const double s : scores2) {
    const auto [lo, hi] = std::equal_range(sorted1.begin(), sorted1.end(), s);
    out.wins += lo - sorted1.begin();
    out.ties += hi - lo;
  }
  const auto total = static_cast<std::int64_t>(scores1.size() * scores2.size());
  out.value = static_cast<double>(out.wins) / static_cast<double>(total);
  return out;
}

std::vector<AggregateRow> aggregate(std::span<const PreferenceResult> rows,
                                    const GroupKeys& keys,
                                    const ModelRegistry& registry,
                                    const BootstrapOptions& options) {
  if (options.n_boot < 1) throw ConfigError("n_boot must be positive");
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw ConfigError("confidence level must lie in (0, 1)");
  }

  // group -> item -> (sum, count)
  std::map<GroupKey, std::map<std::string, std::pair<double, int>>> groups;
  for (const auto& row : rows) {
    const bool instruct = instruct_of(registry, row.model_id);
    GroupKey key{keys.model ? row.model_id : std::string(),
                 keys.instruct ? static_cast<int>(instruct) : -1,
                 keys.structure ? static_cast<int>(row.structure) : -1,
                 keys.swapped ? static_cast<int>(row.swapped) : -1,
                 keys.header ? static_cast<int>(row.header) : -1};
    auto& cell = groups[key][row.item_id];
    cell.first += row.vp2_pref;
    cell.second += 1;
  }

  std::vector<AggregateRow> out;
  std::uint64_t group_index = 0;
  for (const auto& [key, items] : groups) {
    AggregateRow agg;
    const auto& [model, instruct, structure, swapped, header] = key;
    if (keys.model) agg.model = model;
    if (keys.instruct) agg.instruct = instruct == 1;
    if (keys.structure) agg.structure = static_cast<Structure>(structure);
    if (keys.swapped) agg.swapped = swapped == 1;
    if (keys.header) agg.header = static_cast<Header>(header);

    std::vector<double> values;
    values.reserve(items.size());
    for (const auto& [item, cell] : items) values.push_back(cell.first / cell.second);
    agg.n_items = values.size();
    double total = 0.0;
    for (const double v : values) total += v;
    agg.mean = total / static_cast<double>(values.size());

    if (values.size() < 2) {
      agg.ci_low = agg.ci_high = agg.mean;
      agg.degenerate = true;
      spdlog::warn("aggregate group with {} item(s): interval collapsed to the mean",
                   values.size());
    } else {
      std::vector<double> means(options.n_boot);
      const std::uint64_t n = values.size();
      for (int r = 0; r < options.n_boot; ++r) {
        SplitMix64 rng(Hasher64(options.seed)
                           .add(group_index)
                           .add(static_cast<std::uint64_t>(r))
                           .digest());
        double sum = 0.0;
        for (std::uint64_t i = 0; i < n; ++i) sum += values[rng.below(n)];
        means[r] = sum / static_cast<double>(n);
      }
      std::sort(means.begin(), means.end());
      const double tail = (1.0 - options.level) / 2.0;
      agg.ci_low = std::min(quantile(means, tail), agg.mean);
      agg.ci_high = std::max(quantile(means, 1.0 - tail), agg.mean);
    }
    out.push_back(std::move(agg));
    ++group_index;
  }
  return out;
}

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string aggregate_csv(std::span<const AggregateRow> rows) {
  std::string out = "model,instruct,structure,swapped,header,mean,ci_low,ci_high,n_items\n";
  for (const auto& row : rows) {
    out += row.model.value_or("all");
    out += ',';
    out += row.instruct ? (*row.instruct ? "1" : "0") : "all";
    out += ',';
    out += row.structure ? std::string(to_string(*row.structure)) : "all";
    out += ',';
    out += row.swapped ? (*row.swapped ? "1" : "0") : "all";
    out += ',';
    out += row.header ? std::string(to_string(*row.header)) : "all";
    out += ',' + format_number(row.mean) + ',' + format_number(row.ci_low) + ',' +
           format_number(row.ci_high) + ',' + std::to_string(row.n_items) + '\n';
  }
  return out;
}

json to_json(const AggregateRow& row) {
  json out = json::object();
  if (row.model) out["model"] = *row.model;
  if (row.instruct) out["instruct"] = *row.instruct;
  if (row.structure) out["structure"] = to_string(*row.structure);
  if (row.swapped) out["swapped"] = *row.swapped;
  if (row.header) out["header"] = to_string(*row.header);
  out["mean"] = row.mean;
  out["ci_low"] = row.ci_low;
  out["ci_high"] = row.ci_high;
  out["n_items"] = row.n_items;
  if (row.degenerate) out["degenerate"] = true;
  return out;
}

std::string export_long(std::span<const PreferenceResult> rows,
                        const ModelRegistry& registry) {
  std::string out = "item,model,instruct,structure,swapped,header,vp2_pref\n";
  for (const auto& row : rows) {
    const bool instruct = instruct_of(registry, row.model_id);
    out += row.item_id + ',' + row.model_id + ',' + (instruct ? "1" : "0") + ',' +
           std::string(to_string(row.structure)) + ',' + (row.swapped ? "1" : "0") +
           ',' + std::string(to_string(row.header)) + ',' + format_number(row.vp2_pref) +
           '\n';
  }
  return out;
}

}  // namespace dgrc
