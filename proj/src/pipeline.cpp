#include "dgrc/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "dgrc/error.hpp"
#include "dgrc/text.hpp"

namespace dgrc {
namespace {

using nlohmann::json;

std::string origin_label(const DecodingParams& params, int sample) {
  if (params.strategy == Strategy::kGreedy) return "greedy";
  return "t=" + format_number(params.temperature) + ",p=" + format_number(params.top_p) +
         ",k=" + std::to_string(params.top_k) + "#" + std::to_string(sample);
}

std::string slot_name(Slot slot) { return slot == Slot::kVp1 ? "1" : "2"; }

bool is_fatal(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const BackendRejected&) {
    return true;
  } catch (const ProtocolError&) {
    return true;
  } catch (const ConfigError&) {
    return true;
  } catch (...) {
    return false;
  }
}

std::string describe(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

// Runs task(i) for i in [0, n) on up to `workers` threads. Failures are
// recorded per index; a fatal failure stops scheduling of further indices.
template <typename Task>
std::vector<std::exception_ptr> run_bounded(std::size_t n, int workers, Task task) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> aborted{false};
  const auto worker = [&] {
    while (!aborted.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
        if (is_fatal(errors[i])) aborted.store(true);
      }
    }
  };
  const auto count = static_cast<std::size_t>(std::max(1, workers));
  if (count == 1 || n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < std::min(count, n); ++t) threads.emplace_back(worker);
  }
  return errors;
}

struct GenerationUnit {
  const ModelHandle* model;
  const StimulusItem* item;
  bool swapped;
  Slot slot;
  Header gen_header;
};

struct ScoringUnit {
  const ModelHandle* model;
  const StimulusItem* item;
  Structure structure;
  bool swapped;
  Header score_header;
  Header gen_header;
};

using PoolKey = std::tuple<std::string, std::string, bool, int, int>;

PoolKey pool_key(const std::string& model, const std::string& item, bool swapped,
                 Slot slot, Header gen_header) {
  return {model, item, swapped, static_cast<int>(slot), static_cast<int>(gen_header)};
}

struct Design {
  std::vector<bool> swaps;
  std::vector<Header> score_headers;
  // Generation header serving a scoring header.
  Header (*gen_header_for)(Header score_header, bool regenerate);
};

ExperimentOutput run_design(std::span<const StimulusItem> items,
                            std::span<const ModelHandle> models,
                            const ExperimentConfig& config, const Design& design) {
  if (config.k < 1) throw ConfigError("k must be at least 1");
  for (const auto& model : models) {
    if (model.backend == nullptr) throw ConfigError("model '" + model.model_id + "' has no backend");
  }
  const auto grid = expand_grid(config.grid, config.seed);

  std::vector<Header> gen_headers;
  for (const Header h : design.score_headers) {
    const Header g = design.gen_header_for(h, config.exp2_regenerate_per_header);
    if (std::find(gen_headers.begin(), gen_headers.end(), g) == gen_headers.end()) {
      gen_headers.push_back(g);
    }
  }

  std::vector<GenerationUnit> gen_units;
  for (const auto& model : models) {
    for (const auto& item : items) {
      for (const bool swapped : design.swaps) {
        for (const Header g : gen_headers) {
          for (const Slot slot : {Slot::kVp1, Slot::kVp2}) {
            gen_units.push_back({&model, &item, swapped, slot, g});
          }
        }
      }
    }
  }

  ExperimentOutput output;
  output.generation_units = gen_units.size();

  // Sub-utterances do not depend on structure, so one pool per
  // (model, item, swapped, slot, generation header) serves ARC and COORD.
  std::vector<std::optional<CandidatePool>> pools(gen_units.size());
  const auto gen_errors = run_bounded(gen_units.size(), config.workers, [&](std::size_t i) {
    const auto& unit = gen_units[i];
    const auto variant = build_variant(*unit.item, Structure::kArc, unit.swapped);
    auto pool = collect_candidates(variant, unit.slot, unit.model->prompts, unit.gen_header,
                                   grid, *unit.model->backend);
    pools[i] = select_top_k(std::move(pool), config.k);
  });

  std::map<PoolKey, const CandidatePool*> pool_index;
  for (std::size_t i = 0; i < gen_units.size(); ++i) {
    const auto& unit = gen_units[i];
    if (gen_errors[i]) {
      output.failures.push_back(
          {"generate model=" + unit.model->model_id + " item=" + unit.item->id +
               " swapped=" + (unit.swapped ? "1" : "0") + " slot=" + slot_name(unit.slot) +
               " header=" + std::string(to_string(unit.gen_header)),
           describe(gen_errors[i])});
      continue;
    }
    if (!pools[i]) continue;  // not scheduled after a fatal failure
    if (pools[i]->shortfall > 0) ++output.shortfall_pools;
    pool_index[pool_key(unit.model->model_id, unit.item->id, unit.swapped, unit.slot,
                        unit.gen_header)] = &*pools[i];
  }

  std::vector<ScoringUnit> score_units;
  for (const auto& model : models) {
    for (const auto& item : items) {
      for (const auto structure : {Structure::kArc, Structure::kCoord}) {
        for (const bool swapped : design.swaps) {
          for (const Header h : design.score_headers) {
            score_units.push_back({&model, &item, structure, swapped, h,
                                   design.gen_header_for(h, config.exp2_regenerate_per_header)});
          }
        }
      }
    }
  }
  output.scoring_units = score_units.size();

  const bool generation_aborted =
      std::any_of(gen_errors.begin(), gen_errors.end(),
                  [](const std::exception_ptr& e) { return e && is_fatal(e); });

  std::vector<std::optional<std::pair<ScoredSet, ScoredSet>>> scored(score_units.size());
  std::vector<std::exception_ptr> score_errors(score_units.size());
  if (!generation_aborted) {
    score_errors = run_bounded(score_units.size(), config.workers, [&](std::size_t i) {
      const auto& unit = score_units[i];
      const auto& id = unit.model->model_id;
      const auto p1 = pool_index.find(pool_key(id, unit.item->id, unit.swapped, Slot::kVp1, unit.gen_header));
      const auto p2 = pool_index.find(pool_key(id, unit.item->id, unit.swapped, Slot::kVp2, unit.gen_header));
      if (p1 == pool_index.end() || p2 == pool_index.end()) {
        throw Error("candidate pool unavailable (generation failed)");
      }
      const auto variant = build_variant(*unit.item, unit.structure, unit.swapped);
      scored[i] = score_recombined(variant, {*p1->second, *p2->second}, unit.model->prompts,
                                   unit.score_header, *unit.model->backend);
    });
  }

  for (std::size_t i = 0; i < score_units.size(); ++i) {
    const auto& unit = score_units[i];
    const std::string name = "score model=" + unit.model->model_id + " item=" + unit.item->id +
                             " structure=" + std::string(to_string(unit.structure)) +
                             " swapped=" + (unit.swapped ? "1" : "0") +
                             " header=" + std::string(to_string(unit.score_header));
    if (score_errors[i]) {
      output.failures.push_back({name, describe(score_errors[i])});
      continue;
    }
    if (!scored[i]) {
      if (generation_aborted) output.failures.push_back({name, "not run: generation aborted"});
      continue;
    }
    const auto& [set1, set2] = *scored[i];
    try {
      output.rows.push_back(preference_row(set1, set2, unit.model->model_id));
    } catch (const std::exception& e) {
      output.failures.push_back({name, e.what()});
      continue;
    }
    for (const ScoredSet* set : {&set1, &set2}) {
      for (const auto& candidate : set->scored) {
        output.records.push_back({unit.model->model_id, set->ref, set->header, set->slot,
                                  set->gen_header, set->source_utterance,
                                  set->scoring_context, candidate});
      }
    }
  }
  std::sort(output.rows.begin(), output.rows.end(), row_order);
  std::stable_sort(output.records.begin(), output.records.end(),
                   [](const ScoredRecord& a, const ScoredRecord& b) {
                     return std::tie(a.model_id, a.ref.item_id, a.ref.structure, a.ref.swapped,
                                     a.header, a.slot) <
                            std::tie(b.model_id, b.ref.item_id, b.ref.structure, b.ref.swapped,
                                     b.header, b.slot);
                   });
  return output;
}

}  // namespace

json to_json(const GridSpec& grid) {
  return {{"temperatures", grid.temperatures},
          {"top_ps", grid.top_ps},
          {"top_ks", grid.top_ks},
          {"include_greedy", grid.include_greedy},
          {"samples_per_config", grid.samples_per_config},
          {"max_tokens", grid.max_tokens}};
}

GridSpec grid_from_json(const json& j, GridSpec grid) {
  if (!j.is_object()) throw ConfigError("grid must be a JSON object");
  try {
    if (j.contains("temperatures")) grid.temperatures = j["temperatures"].get<std::vector<double>>();
    if (j.contains("top_ps")) grid.top_ps = j["top_ps"].get<std::vector<double>>();
    if (j.contains("top_ks")) grid.top_ks = j["top_ks"].get<std::vector<int>>();
    if (j.contains("include_greedy")) grid.include_greedy = j["include_greedy"].get<bool>();
    if (j.contains("samples_per_config")) grid.samples_per_config = j["samples_per_config"].get<int>();
    if (j.contains("max_tokens")) grid.max_tokens = j["max_tokens"].get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad grid: ") + e.what());
  }
  return grid;
}

std::vector<DecodingParams> expand_grid(const GridSpec& spec, std::int64_t seed) {
  if (spec.max_tokens < 1) throw ConfigError("grid max_tokens must be positive");
  if (spec.samples_per_config < 1) throw ConfigError("samples_per_config must be positive");
  for (const double t : spec.temperatures) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("temperatures must be positive");
  }
  for (const double p : spec.top_ps) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("top_ps must lie in [0, 1]");
  }
  for (const int k : spec.top_ks) {
    if (k < 0) throw ConfigError("top_ks must be non-negative");
  }

  std::vector<DecodingParams> configs;
  if (spec.include_greedy) configs.push_back(greedy_params(spec.max_tokens, seed));

  std::set<std::tuple<double, double, int>> sampling;
  for (const double t : spec.temperatures) {
    for (const double p : spec.top_ps) {
      for (const int k : spec.top_ks) sampling.emplace(t, p, k);
    }
  }
  for (const auto& [t, p, k] : sampling) {
    DecodingParams params;
    params.strategy = Strategy::kSample;
    params.temperature = t;
    params.top_p = p;
    params.top_k = k;
    params.max_tokens = spec.max_tokens;
    params.n = spec.samples_per_config;
    params.seed = seed;
    configs.push_back(params);
  }
  if (configs.empty()) throw ConfigError("decoding grid expands to zero configurations");
  return configs;
}

CandidatePool collect_candidates(const UtteranceVariant& variant, Slot slot,
                                 const PromptSettings& prompts, Header gen_header,
                                 std::span<const DecodingParams> grid, Backend& backend) {
  if (grid.empty()) throw ConfigError("empty decoding grid");
  CandidatePool pool;
  pool.ref = {variant.item_id, variant.structure, variant.swapped};
  pool.slot = slot;
  pool.gen_header = gen_header;
  pool.source_utterance = variant.sub(slot);

  const Context context = prompts.render(variant.item_id, pool.source_utterance, gen_header);
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& params : grid) {
    const auto results = backend.generate(context, params);
    for (std::size_t s = 0; s < results.size(); ++s) {
      const auto& result = results[s];
      const std::string text(trim(result.text));
      if (text.empty()) continue;
      if (static_cast<int>(result.tokens.size()) > params.max_tokens) continue;
      const double score = result.logprob_sum();
      if (!std::isfinite(score)) continue;
      const auto [it, inserted] = seen.emplace(text, pool.candidates.size());
      if (inserted) {
        pool.candidates.push_back({text, score, origin_label(params, static_cast<int>(s))});
      } else {
        auto& existing = pool.candidates[it->second];
        existing.selection_score = std::max(existing.selection_score, score);
      }
    }
  }
  return pool;
}

CandidatePool select_top_k(CandidatePool pool, std::size_t k) {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (pool.candidates.empty()) {
    throw Error("empty candidate pool for item " + pool.ref.item_id + " slot " +
                slot_name(pool.slot) + " swapped=" + (pool.ref.swapped ? "1" : "0") +
                " header=" + std::string(to_string(pool.gen_header)));
  }
  std::sort(pool.candidates.begin(), pool.candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.selection_score != b.selection_score) {
                return a.selection_score > b.selection_score;
              }
              return a.text < b.text;
            });
  if (pool.candidates.size() > k) {
    pool.candidates.resize(k);
    pool.shortfall = 0;
  } else {
    pool.shortfall = k - pool.candidates.size();
    if (pool.shortfall > 0) {
      spdlog::info("item {} slot {}: only {} of {} candidates", pool.ref.item_id,
                   slot_name(pool.slot), pool.candidates.size(), k);
    }
  }
  return pool;
}

std::pair<ScoredSet, ScoredSet> score_recombined(
    const UtteranceVariant& variant,
    const std::pair<const CandidatePool&, const CandidatePool&>& pools,
    const PromptSettings& prompts, Header score_header, Backend& backend) {
  const auto& [pool1, pool2] = pools;
  if (pool1.ref.item_id != variant.item_id || pool2.ref.item_id != variant.item_id ||
      pool1.ref.swapped != variant.swapped || pool2.ref.swapped != variant.swapped ||
      pool1.slot != Slot::kVp1 || pool2.slot != Slot::kVp2) {
    throw InvalidInput("candidate pools do not belong to variant " + variant.item_id);
  }
  const Context context = prompts.render(variant.item_id, variant.surface, score_header);
  const json context_json = context_to_json(context);

  const auto score_pool = [&](const CandidatePool& pool) {
    ScoredSet set;
    set.ref = {variant.item_id, variant.structure, variant.swapped};
    set.slot = pool.slot;
    set.header = score_header;
    set.gen_header = pool.gen_header;
    set.source_utterance = pool.source_utterance;
    set.scoring_context = context_json;
    for (const auto& candidate : pool.candidates) {
      ScoreResult result;
      try {
        result = backend.score(context, candidate.text);
      } catch (const InvalidInput& e) {
        spdlog::warn("dropping candidate '{}' for item {}: {}", candidate.text,
                     variant.item_id, e.what());
        continue;
      }
      if (result.n_tokens < 1) {
        spdlog::warn("dropping zero-token candidate for item {}", variant.item_id);
        continue;
      }
      set.scored.push_back({candidate.text, result.n_tokens, result.logprob_sum,
                            per_token_score(result.logprob_sum, result.n_tokens),
                            candidate.selection_score, candidate.origin});
    }
    return set;
  };
  return {score_pool(pool1), score_pool(pool2)};
}

PreferenceResult preference_row(const ScoredSet& set1, const ScoredSet& set2,
                                std::string_view model_id) {
  std::vector<double> scores1;
  std::vector<double> scores2;
  for (const auto& c : set1.scored) scores1.push_back(c.per_token_score);
  for (const auto& c : set2.scored) scores2.push_back(c.per_token_score);
  const Preference pref = vp2_preference(scores1, scores2);
  PreferenceResult row;
  row.item_id = set1.ref.item_id;
  row.model_id = std::string(model_id);
  row.structure = set1.ref.structure;
  row.swapped = set1.ref.swapped;
  row.header = set1.header;
  row.vp2_pref = pref.value;
  row.n1 = static_cast<int>(scores1.size());
  row.n2 = static_cast<int>(scores2.size());
  row.ties = pref.ties;
  return row;
}

json to_json(const ScoredRecord& r) {
  return {{"model_id", r.model_id},
          {"item_id", r.ref.item_id},
          {"structure", to_string(r.ref.structure)},
          {"swapped", r.ref.swapped},
          {"header", to_string(r.header)},
          {"slot", static_cast<int>(r.slot)},
          {"generation_header", to_string(r.gen_header)},
          {"generation_utterance", r.generation_utterance},
          {"scoring_context", r.scoring_context},
          {"text", r.candidate.text},
          {"origin", r.candidate.origin},
          {"selection_score", r.candidate.selection_score},
          {"n_tokens", r.candidate.n_tokens},
          {"logprob_sum", r.candidate.logprob_sum},
          {"per_token_score", r.candidate.per_token_score}};
}

json context_to_json(const Context& context) {
  if (const auto* chat = std::get_if<ChatPrompt>(&context)) {
    return {{"mode", "chat"}, {"messages", messages_to_json(*chat)}};
  }
  return {{"mode", "text"}, {"text", std::get<std::string>(context)}};
}

ExperimentOutput run_experiment1(std::span<const StimulusItem> items,
                                 std::span<const ModelHandle> models,
                                 const ExperimentConfig& config) {
  const Design design{{false, true},
                      {Header::kNone},
                      [](Header, bool) { return Header::kNone; }};
  return run_design(items, models, config, design);
}

ExperimentOutput run_experiment2(std::span<const StimulusItem> items,
                                 std::span<const ModelHandle> models,
                                 const ExperimentConfig& config) {
  const Design design{{false},
                      {Header::kReject, Header::kDigression},
                      [](Header score_header, bool regenerate) {
                        return regenerate ? score_header : Header::kReject;
                      }};
  return run_design(items, models, config, design);
}

}  // namespace dgrc
