#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dgrc/backend.hpp"

namespace dgrc {

struct MockOptions {
  std::string model_id = "mock";
  // Scoring seed; generation is seeded by DecodingParams::seed.
  std::uint64_t seed = 0;
  // Probability that a generated token is drawn from the utterance's content
  // words rather than the filler list.
  double anchor_probability = 0.6;
};

// Deterministic pseudo-LM over whitespace tokens.
//
// Token log-probabilities are a 64-bit hash of (seed, every context token,
// the continuation prefix through the current token) mapped into
// (-6.0, -0.5]. Generation emits 4-10 tokens drawn from the utterance's
// content words and a fixed filler vocabulary. Stateless and thread-safe.
class MockBackend : public Backend {
 public:
  static constexpr double kMaxLogprob = -0.5;
  static constexpr double kMinLogprob = -6.0;
  static constexpr int kMinLength = 4;
  static constexpr int kMaxLength = 10;

  explicit MockBackend(MockOptions options = {});

  std::vector<GenResult> generate(const Context& context,
                                  const DecodingParams& params) override;
  ScoreResult score(const Context& context,
                    std::string_view continuation) override;
  BackendIdentity identity() const override;

  // Tokens the hash conditions on: role markers plus message tokens for chat
  // contexts, whitespace tokens for text.
  static std::vector<std::string> context_tokens(const Context& context);

  std::uint64_t context_digest(std::span<const std::string> tokens) const;

  // Log-probabilities of `tokens` after a context with the given digest.
  std::vector<double> token_logprobs(std::uint64_t context_digest,
                                     std::span<const std::string> tokens) const;

  const MockOptions& options() const { return options_; }

 private:
  MockOptions options_;
};

}  // namespace dgrc
