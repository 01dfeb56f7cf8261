#include "dgrc/oracle_backend.hpp"

#include "dgrc/error.hpp"
#include "dgrc/text.hpp"

namespace dgrc {

OracleBackend::OracleBackend(OracleOptions options,
                             std::span<const StimulusItem> items)
    : options_(std::move(options)),
      mock_(MockOptions{options_.model_id, options_.seed,
                        options_.anchor_probability}) {
  if (!(options_.delta >= 0.0)) throw ConfigError("oracle delta must be >= 0");
  if (!(options_.coord_scale >= 0.0) || !(options_.digression_scale >= 0.0)) {
    throw ConfigError("oracle scales must be >= 0");
  }
  for (const auto& item : items) {
    for (const bool swapped : {false, true}) {
      const StimulusItem arranged = swapped ? swap_vps(item) : item;
      for (const auto structure : {Structure::kArc, Structure::kCoord}) {
        surfaces_.insert_or_assign(
            build_full(arranged, structure),
            Recombined{arranged.vp1, arranged.vp2, structure});
      }
    }
  }
}

const OracleBackend::Recombined* OracleBackend::lookup(const Context& context) const {
  const auto it = surfaces_.find(std::string(trim(context_utterance(context))));
  return it == surfaces_.end() ? nullptr : &it->second;
}

double OracleBackend::bias_for(const Context& context) const {
  const Recombined* recombined = lookup(context);
  if (recombined == nullptr) return 0.0;
  double bias = options_.delta;
  if (recombined->structure == Structure::kCoord) {
    bias *= options_.coord_scale;
  } else if (context_header(context) == Header::kDigression) {
    bias *= options_.digression_scale;
  }
  return bias;
}

std::vector<GenResult> OracleBackend::generate(const Context& context,
                                               const DecodingParams& params) {
  return mock_.generate(context, params);
}

ScoreResult OracleBackend::score(const Context& context,
                                 std::string_view continuation) {
  auto tokens = whitespace_tokens(continuation);
  if (tokens.empty()) throw InvalidInput("continuation has zero tokens");
  auto logprobs = mock_.token_logprobs(mock_.context_digest({}), tokens);
  if (const Recombined* recombined = lookup(context)) {
    const double bias = bias_for(context);
    const double shift =
        bias * (content_overlap(continuation, recombined->second_vp) -
                content_overlap(continuation, recombined->first_vp) - 1.0);
    for (double& lp : logprobs) lp += shift;
  }
  return ScoreResult::from_tokens(std::move(tokens), std::move(logprobs));
}

BackendIdentity OracleBackend::identity() const {
  return {"oracle",
          options_.model_id,
          {{"seed", options_.seed},
           {"delta", options_.delta},
           {"coord_scale", options_.coord_scale},
           {"digression_scale", options_.digression_scale},
           {"anchor_probability", options_.anchor_probability}}};
}

}  // namespace dgrc
