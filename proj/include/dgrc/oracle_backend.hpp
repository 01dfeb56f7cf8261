#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>

#include "dgrc/mock_backend.hpp"
#include "dgrc/stimuli.hpp"

namespace dgrc {

struct OracleOptions {
  std::string model_id = "oracle";
  std::uint64_t seed = 0;
  // At-issue bias. 0 reduces scoring to the context-free mock hash.
  double delta = 0.0;
  // Structure-aware extension: bias multiplier for COORD contexts.
  double coord_scale = 1.0;
  // Digression-aware extension: bias multiplier for ARC contexts ending in
  // the digression header.
  double digression_scale = 1.0;
  double anchor_probability = 0.6;
};

// Pseudo-LM with a known at-issue preference.
//
// Generation is the mock generator. A continuation x scored under a
// recombined utterance with VPs (a, b) in slot order gets, per token,
//
//   mock(x) + bias * (overlap(x, b) - overlap(x, a) - 1)
//
// where mock(x) hashes the continuation alone (context tokens, including
// headers, are ignored) and overlap is the content-word overlap fraction.
// The constant -bias keeps every token logprob negative and cancels in any
// comparison within one context.
class OracleBackend : public Backend {
 public:
  OracleBackend(OracleOptions options, std::span<const StimulusItem> items);

  std::vector<GenResult> generate(const Context& context,
                                  const DecodingParams& params) override;
  ScoreResult score(const Context& context,
                    std::string_view continuation) override;
  BackendIdentity identity() const override;

  // Bias applied to a context, 0 when the utterance is not a known
  // recombined surface.
  double bias_for(const Context& context) const;

 private:
  struct Recombined {
    std::string first_vp;
    std::string second_vp;
    Structure structure;
  };
  const Recombined* lookup(const Context& context) const;

  OracleOptions options_;
  MockBackend mock_;
  std::unordered_map<std::string, Recombined> surfaces_;
};

}  // namespace dgrc
