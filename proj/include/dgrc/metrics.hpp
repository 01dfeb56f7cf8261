#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dgrc/prompts.hpp"
#include "dgrc/stimuli.hpp"
#include "json.hpp"

namespace dgrc {

// Per-item VP2-preference under one experimental condition.
struct PreferenceResult {
  std::string item_id;
  std::string model_id;
  Structure structure = Structure::kArc;
  bool swapped = false;
  Header header = Header::kNone;
  double vp2_pref = 0.0;
  int n1 = 0;
  int n2 = 0;
  std::int64_t ties = 0;

  std::int64_t comparisons() const { return std::int64_t{n1} * n2; }
  bool operator==(const PreferenceResult&) const = default;
};

nlohmann::json to_json(const PreferenceResult& row);
PreferenceResult preference_from_json(const nlohmann::json& json);

// Sort order used for every serialized result table.
bool row_order(const PreferenceResult& a, const PreferenceResult& b);

// logprob_sum / n_tokens. Throws InvalidInput when n_tokens < 1.
double per_token_score(double logprob_sum, int n_tokens);

struct Preference {
  double value = 0.0;      // wins / (|scores1| * |scores2|)
  std::int64_t wins = 0;   // pairs with scores2[i] > scores1[j]
  std::int64_t ties = 0;   // pairs with scores2[i] == scores1[j]
};

// Fraction of (slot-2, slot-1) pairs where the slot-2 score is strictly
// greater. Exact ties count toward `ties`, not toward the value.
Preference vp2_preference(std::span<const double> scores1,
                          std::span<const double> scores2);

// Which PreferenceResult fields define an aggregate group.
struct GroupKeys {
  bool model = true;
  bool instruct = true;
  bool structure = true;
  bool swapped = true;
  bool header = true;
};

struct AggregateRow {
  std::optional<std::string> model;
  std::optional<bool> instruct;
  std::optional<Structure> structure;
  std::optional<bool> swapped;
  std::optional<Header> header;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_items = 0;
  // Fewer than two items: the interval collapses to the mean.
  bool degenerate = false;
};

using ModelRegistry = std::map<std::string, bool>;  // model_id -> instruct

struct BootstrapOptions {
  int n_boot = 10000;
  std::uint64_t seed = 0;
  double level = 0.95;
};

// Groups rows, averages each group's rows per item, and reports the mean over
// items with a percentile bootstrap interval from item-level resamples.
// Resample r of group g draws from a stream seeded by (seed, g, r).
std::vector<AggregateRow> aggregate(std::span<const PreferenceResult> rows,
                                    const GroupKeys& keys,
                                    const ModelRegistry& registry,
                                    const BootstrapOptions& options = {});

// `model,instruct,structure,swapped,header,mean,ci_low,ci_high,n_items`;
// ungrouped keys print as "all".
std::string aggregate_csv(std::span<const AggregateRow> rows);
nlohmann::json to_json(const AggregateRow& row);

// Long format for mixed-effects tooling:
// `item,model,instruct,structure,swapped,header,vp2_pref`.
std::string export_long(std::span<const PreferenceResult> rows,
                        const ModelRegistry& registry);

// Shortest decimal representation that round-trips.
std::string format_number(double value);

}  // namespace dgrc
