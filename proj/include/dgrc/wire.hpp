#pragma once

// JSON bodies of the generate/score wire protocol:
//
//   POST /v1/generate
//     {"model", "mode": "chat"|"text", "messages": [...]|null,
//      "prompt": str|null, "params": {...}}
//     -> {"choices": [{"text", "tokens", "token_logprobs"}]}
//   POST /v1/score
//     {"model", "mode", "context_messages": [...]|null,
//      "context_text": str|null, "continuation"}
//     -> {"tokens", "token_logprobs"}
//
// When the context ends in a response header, the client sends the
// continuation with a leading space; servers concatenate verbatim.

#include <span>
#include <string>
#include <vector>

#include "dgrc/backend.hpp"
#include "json.hpp"

namespace dgrc::wire {

inline constexpr const char* kGeneratePath = "/v1/generate";
inline constexpr const char* kScorePath = "/v1/score";

nlohmann::json params_to_json(const DecodingParams& params);
DecodingParams params_from_json(const nlohmann::json& json);

nlohmann::json generate_request(std::string_view model, const Context& context,
                                const DecodingParams& params);
nlohmann::json score_request(std::string_view model, const Context& context,
                             std::string_view continuation);

struct GenerateRequest {
  std::string model;
  Context context;
  DecodingParams params;
};
struct ScoreRequest {
  std::string model;
  Context context;
  std::string continuation;
};

// Server side. Throw InvalidInput on malformed bodies.
GenerateRequest parse_generate_request(const nlohmann::json& body);
ScoreRequest parse_score_request(const nlohmann::json& body);

nlohmann::json generate_response(std::span<const GenResult> results);
nlohmann::json score_response(const ScoreResult& result);

// Client side. Throw ProtocolError on contract violations.
std::vector<GenResult> parse_generate_response(const nlohmann::json& body);
ScoreResult parse_score_response(const nlohmann::json& body);

}  // namespace dgrc::wire
