#include "dgrc/backend.hpp"

#include <cmath>
#include <numeric>

#include "dgrc/error.hpp"

namespace dgrc {

std::string_view to_string(Strategy strategy) {
  return strategy == Strategy::kGreedy ? "greedy" : "sample";
}

void DecodingParams::validate() const {
  if (max_tokens < 1) throw ConfigError("max_tokens must be positive");
  if (n < 1) throw ConfigError("n must be positive");
  if (strategy == Strategy::kGreedy) {
    if (n != 1) throw ConfigError("greedy decoding implies n = 1");
    return;
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("sampling temperature must be positive");
  }
  if (!(top_p >= 0.0 && top_p <= 1.0)) throw ConfigError("top_p must lie in [0, 1]");
  if (top_k < 0) throw ConfigError("top_k must be non-negative");
}

DecodingParams greedy_params(int max_tokens, std::int64_t seed) {
  DecodingParams params;
  params.strategy = Strategy::kGreedy;
  params.max_tokens = max_tokens;
  params.seed = seed;
  return params;
}

double GenResult::logprob_sum() const {
  return std::accumulate(token_logprobs.begin(), token_logprobs.end(), 0.0);
}

ScoreResult ScoreResult::from_tokens(std::vector<std::string> tokens,
                                     std::vector<double> logprobs) {
  if (tokens.size() != logprobs.size()) {
    throw InvalidInput("token and logprob counts differ");
  }
  if (tokens.empty()) throw InvalidInput("continuation has zero tokens");
  ScoreResult result;
  result.n_tokens = static_cast<int>(tokens.size());
  result.logprob_sum = std::accumulate(logprobs.begin(), logprobs.end(), 0.0);
  result.continuation_tokens = std::move(tokens);
  result.token_logprobs = std::move(logprobs);
  return result;
}

std::vector<GenResult> CountingBackend::generate(const Context& context,
                                                 const DecodingParams& params) {
  ++generate_calls_;
  return inner_.generate(context, params);
}

ScoreResult CountingBackend::score(const Context& context,
                                   std::string_view continuation) {
  ++score_calls_;
  return inner_.score(context, continuation);
}

}  // namespace dgrc
