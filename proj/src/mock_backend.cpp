#include "dgrc/mock_backend.hpp"

#include <algorithm>
#include <cctype>

#include "dgrc/error.hpp"
#include "dgrc/hashing.hpp"
#include "dgrc/text.hpp"

namespace dgrc {

MockBackend::MockBackend(MockOptions options) : options_(std::move(options)) {
  if (!(options_.anchor_probability >= 0.0 && options_.anchor_probability <= 1.0)) {
    throw ConfigError("anchor_probability must lie in [0, 1]");
  }
}

std::vector<std::string> MockBackend::context_tokens(const Context& context) {
  if (const auto* text = std::get_if<std::string>(&context)) {
    return whitespace_tokens(*text);
  }
  std::vector<std::string> tokens;
  for (const auto& message : std::get<ChatPrompt>(context).messages) {
    tokens.push_back("<|" + std::string(to_string(message.role)) + "|>");
    for (auto& t : whitespace_tokens(message.content)) tokens.push_back(std::move(t));
  }
  return tokens;
}

std::uint64_t MockBackend::context_digest(std::span<const std::string> tokens) const {
  Hasher64 hasher(options_.seed);
  hasher.add("context").add(static_cast<std::uint64_t>(tokens.size()));
  for (const auto& token : tokens) hasher.add(token);
  return hasher.digest();
}

std::vector<double> MockBackend::token_logprobs(
    std::uint64_t context_digest, std::span<const std::string> tokens) const {
  std::vector<double> logprobs;
  logprobs.reserve(tokens.size());
  std::uint64_t state = context_digest;
  for (const auto& token : tokens) {
    state = Hasher64(state).add(token).digest();
    logprobs.push_back(kMaxLogprob - (kMaxLogprob - kMinLogprob) * unit_interval(state));
  }
  return logprobs;
}

std::vector<GenResult> MockBackend::generate(const Context& context,
                                             const DecodingParams& params) {
  params.validate();
  const auto ctx_tokens = context_tokens(context);
  const std::uint64_t digest = context_digest(ctx_tokens);
  const auto anchors = content_words(context_utterance(context));
  const auto fillers = filler_words();

  Hasher64 stream_base(static_cast<std::uint64_t>(params.seed));
  stream_base.add("generate").add(digest).add(to_string(params.strategy));
  if (params.strategy == Strategy::kSample) {
    stream_base.add_double(params.temperature)
        .add_double(params.top_p)
        .add(static_cast<std::uint64_t>(params.top_k));
  }

  const int samples = params.strategy == Strategy::kGreedy ? 1 : params.n;
  std::vector<GenResult> results;
  results.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    SplitMix64 rng(Hasher64(stream_base.digest()).add(static_cast<std::uint64_t>(s)).digest());
    const int length = std::min<int>(
        params.max_tokens, kMinLength + static_cast<int>(rng.below(kMaxLength - kMinLength + 1)));
    std::vector<std::string> tokens;
    tokens.reserve(length);
    for (int i = 0; i < length; ++i) {
      const bool anchored = !anchors.empty() && rng.uniform() < options_.anchor_probability;
      tokens.emplace_back(anchored ? anchors[rng.below(anchors.size())]
                                   : std::string(fillers[rng.below(fillers.size())]));
    }
    tokens.front()[0] = static_cast<char>(
        std::toupper(static_cast<unsigned char>(tokens.front()[0])));
    tokens.back() += '.';

    GenResult result;
    result.text = join_tokens(tokens);
    result.token_logprobs = token_logprobs(digest, tokens);
    result.tokens = std::move(tokens);
    results.push_back(std::move(result));
  }
  return results;
}

ScoreResult MockBackend::score(const Context& context, std::string_view continuation) {
  auto tokens = whitespace_tokens(continuation);
  if (tokens.empty()) throw InvalidInput("continuation has zero tokens");
  const auto ctx_tokens = context_tokens(context);
  auto logprobs = token_logprobs(context_digest(ctx_tokens), tokens);
  return ScoreResult::from_tokens(std::move(tokens), std::move(logprobs));
}

BackendIdentity MockBackend::identity() const {
  return {"mock", options_.model_id,
          {{"seed", options_.seed}, {"anchor_probability", options_.anchor_probability}}};
}

}  // namespace dgrc
