#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dgrc/prompts.hpp"
#include "json.hpp"

namespace dgrc {

enum class Strategy { kGreedy, kSample };

std::string_view to_string(Strategy strategy);

struct DecodingParams {
  Strategy strategy = Strategy::kGreedy;
  double temperature = 1.0;  // SAMPLE only, > 0
  double top_p = 0.0;        // 0 disables nucleus filtering
  int top_k = 0;             // 0 disables top-k filtering
  int max_tokens = 40;
  int n = 1;
  std::int64_t seed = 0;

  // Throws ConfigError on out-of-range values.
  void validate() const;
  bool operator==(const DecodingParams&) const = default;
};

DecodingParams greedy_params(int max_tokens, std::int64_t seed);

// One sampled continuation. Log-probabilities are natural log.
struct GenResult {
  std::string text;
  std::vector<std::string> tokens;
  std::vector<double> token_logprobs;
  bool operator==(const GenResult&) const = default;

  double logprob_sum() const;
};

struct ScoreResult {
  std::vector<std::string> continuation_tokens;
  std::vector<double> token_logprobs;
  int n_tokens = 0;
  double logprob_sum = 0.0;
  bool operator==(const ScoreResult&) const = default;

  // Fills n_tokens and logprob_sum; throws InvalidInput on zero tokens or a
  // token/logprob length mismatch.
  static ScoreResult from_tokens(std::vector<std::string> tokens,
                                 std::vector<double> logprobs);
};

// Identifies a backend for cache keys and manifests.
struct BackendIdentity {
  std::string kind;      // "http" | "mock" | "oracle" | ...
  std::string model_id;
  nlohmann::json config = nlohmann::json::object();
};

// Language-model access. Implementations must be safe to call concurrently.
class Backend {
 public:
  virtual ~Backend() = default;

  // Between 1 and params.n continuations of `context`.
  virtual std::vector<GenResult> generate(const Context& context,
                                          const DecodingParams& params) = 0;

  // Per-token log-probabilities of `continuation` given `context`; context
  // and end-of-sequence tokens are excluded.
  virtual ScoreResult score(const Context& context,
                            std::string_view continuation) = 0;

  virtual BackendIdentity identity() const = 0;
};

// Counts requests that reach the wrapped backend.
class CountingBackend : public Backend {
 public:
  explicit CountingBackend(Backend& inner) : inner_(inner) {}

  std::vector<GenResult> generate(const Context& context,
                                  const DecodingParams& params) override;
  ScoreResult score(const Context& context,
                    std::string_view continuation) override;
  BackendIdentity identity() const override { return inner_.identity(); }

  std::int64_t generate_calls() const { return generate_calls_.load(); }
  std::int64_t score_calls() const { return score_calls_.load(); }
  std::int64_t total_calls() const { return generate_calls() + score_calls(); }

 private:
  Backend& inner_;
  std::atomic<std::int64_t> generate_calls_{0};
  std::atomic<std::int64_t> score_calls_{0};
};

}  // namespace dgrc
