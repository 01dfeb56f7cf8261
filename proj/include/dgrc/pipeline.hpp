#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dgrc/backend.hpp"
#include "dgrc/metrics.hpp"
#include "dgrc/prompts.hpp"
#include "dgrc/stimuli.hpp"
#include "json.hpp"

namespace dgrc {

// Decoding grid. Defaults are the hyperparameter lists used for every model.
struct GridSpec {
  std::vector<double> temperatures{0.7, 1.0};
  std::vector<double> top_ps{0.0, 0.9, 0.95};
  std::vector<int> top_ks{50, 0};
  bool include_greedy = true;
  int samples_per_config = 5;
  int max_tokens = 40;
};

nlohmann::json to_json(const GridSpec& grid);
GridSpec grid_from_json(const nlohmann::json& json, GridSpec defaults = {});

// Greedy first (when enabled), then every temperature x top_p x top_k
// sampling config in ascending lexicographic order.
std::vector<DecodingParams> expand_grid(const GridSpec& spec, std::int64_t seed = 0);

struct VariantRef {
  std::string item_id;
  Structure structure = Structure::kArc;
  bool swapped = false;
};

struct Candidate {
  std::string text;
  double selection_score = 0.0;  // continuation logprob sum at generation
  std::string origin;            // decoding config that first produced it
};

struct CandidatePool {
  VariantRef ref;
  Slot slot = Slot::kVp1;
  Header gen_header = Header::kNone;
  std::string source_utterance;  // the sub-utterance generation saw
  std::vector<Candidate> candidates;
  std::size_t shortfall = 0;     // k - size after select_top_k, when short
};

struct ScoredCandidate {
  std::string text;
  int n_tokens = 0;
  double logprob_sum = 0.0;
  double per_token_score = 0.0;
  double selection_score = 0.0;
  std::string origin;
};

struct ScoredSet {
  VariantRef ref;
  Slot slot = Slot::kVp1;
  Header header = Header::kNone;
  Header gen_header = Header::kNone;
  std::string source_utterance;
  nlohmann::json scoring_context;
  std::vector<ScoredCandidate> scored;
};

// Runs every grid config against the prompt for `variant.sub(slot)`;
// trims, drops empty or over-long continuations and deduplicates by text.
CandidatePool collect_candidates(const UtteranceVariant& variant, Slot slot,
                                 const PromptSettings& prompts, Header gen_header,
                                 std::span<const DecodingParams> grid,
                                 Backend& backend);

// Keeps the k highest selection scores, ties broken by smaller text.
CandidatePool select_top_k(CandidatePool pool, std::size_t k);

// Scores both pools as continuations of the recombined surface.
std::pair<ScoredSet, ScoredSet> score_recombined(
    const UtteranceVariant& variant,
    const std::pair<const CandidatePool&, const CandidatePool&>& pools,
    const PromptSettings& prompts, Header score_header, Backend& backend);

PreferenceResult preference_row(const ScoredSet& set1, const ScoredSet& set2,
                                std::string_view model_id);

struct ModelHandle {
  std::string model_id;
  Backend* backend = nullptr;
  PromptSettings prompts;
};

struct ExperimentConfig {
  GridSpec grid;
  std::size_t k = 10;
  std::int64_t seed = 0;
  int workers = 4;
  // Experiment 2: generate under each scoring header instead of REJECT only.
  bool exp2_regenerate_per_header = false;
};

// One scored continuation with its provenance.
struct ScoredRecord {
  std::string model_id;
  VariantRef ref;
  Header header = Header::kNone;
  Slot slot = Slot::kVp1;
  Header gen_header = Header::kNone;
  std::string generation_utterance;
  nlohmann::json scoring_context;
  ScoredCandidate candidate;
};

nlohmann::json to_json(const ScoredRecord& record);

struct UnitFailure {
  std::string unit;
  std::string message;
};

struct ExperimentOutput {
  std::vector<PreferenceResult> rows;   // sorted by row_order
  std::vector<ScoredRecord> records;
  std::vector<UnitFailure> failures;
  std::size_t generation_units = 0;
  std::size_t scoring_units = 0;
  std::size_t shortfall_pools = 0;
};

// Experiment 1: structure {ARC, COORD} x swapped {no, yes}; no headers.
ExperimentOutput run_experiment1(std::span<const StimulusItem> items,
                                 std::span<const ModelHandle> models,
                                 const ExperimentConfig& config);

// Experiment 2: structure {ARC, COORD} x scoring header {REJECT, DIGRESSION},
// unswapped; generation under REJECT.
ExperimentOutput run_experiment2(std::span<const StimulusItem> items,
                                 std::span<const ModelHandle> models,
                                 const ExperimentConfig& config);

nlohmann::json context_to_json(const Context& context);

}  // namespace dgrc
