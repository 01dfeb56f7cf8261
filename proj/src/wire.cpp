#include "dgrc/wire.hpp"

#include <cmath>

#include "dgrc/error.hpp"

namespace dgrc::wire {
namespace {

using nlohmann::json;

// Logprobs above this are treated as malformed rather than rounding noise.
constexpr double kLogprobSlack = 1e-6;

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InvalidInput(std::string("missing field '") + key + "'");
  }
  return obj.at(key);
}

Context context_from(const json& body, const char* messages_key,
                     const char* text_key) {
  const auto& mode = require(body, "mode");
  if (mode == "chat") return messages_from_json(require(body, messages_key));
  if (mode == "text") {
    const auto& text = require(body, text_key);
    if (!text.is_string()) throw InvalidInput(std::string(text_key) + " must be a string");
    return text.get<std::string>();
  }
  throw InvalidInput("mode must be 'chat' or 'text'");
}

void fill_context(json& body, const Context& context, const char* messages_key,
                  const char* text_key) {
  if (const auto* chat = std::get_if<ChatPrompt>(&context)) {
    body["mode"] = "chat";
    body[messages_key] = messages_to_json(*chat);
    body[text_key] = nullptr;
  } else {
    body["mode"] = "text";
    body[messages_key] = nullptr;
    body[text_key] = std::get<std::string>(context);
  }
}

std::pair<std::vector<std::string>, std::vector<double>> token_arrays(
    const json& obj) {
  if (!obj.is_object() || !obj.contains("tokens") || !obj["tokens"].is_array()) {
    throw ProtocolError("response lacks a 'tokens' array");
  }
  if (!obj.contains("token_logprobs") || !obj["token_logprobs"].is_array()) {
    throw ProtocolError("response lacks a 'token_logprobs' array");
  }
  const auto& tokens = obj["tokens"];
  const auto& logprobs = obj["token_logprobs"];
  if (tokens.size() != logprobs.size()) {
    throw ProtocolError("tokens and token_logprobs differ in length");
  }
  std::pair<std::vector<std::string>, std::vector<double>> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_string()) throw ProtocolError("token is not a string");
    if (!logprobs[i].is_number()) throw ProtocolError("logprob is not a number");
    const double lp = logprobs[i].get<double>();
    if (!std::isfinite(lp) || lp > kLogprobSlack) {
      throw ProtocolError("logprob out of range: " + logprobs[i].dump());
    }
    out.first.push_back(tokens[i].get<std::string>());
    out.second.push_back(std::min(lp, 0.0));
  }
  return out;
}

}  // namespace

json params_to_json(const DecodingParams& params) {
  return {
      {"strategy", to_string(params.strategy)},
      {"temperature", params.temperature},
      {"top_p", params.top_p},
      {"top_k", params.top_k},
      {"max_tokens", params.max_tokens},
      {"n", params.n},
      {"seed", params.seed},
  };
}

DecodingParams params_from_json(const json& j) {
  DecodingParams params;
  const auto& strategy = require(j, "strategy");
  if (strategy == "greedy") {
    params.strategy = Strategy::kGreedy;
  } else if (strategy == "sample") {
    params.strategy = Strategy::kSample;
  } else {
    throw InvalidInput("strategy must be 'greedy' or 'sample'");
  }
  try {
    params.temperature = j.value("temperature", 1.0);
    params.top_p = j.value("top_p", 0.0);
    params.top_k = j.value("top_k", 0);
    params.max_tokens = j.value("max_tokens", 40);
    params.n = j.value("n", 1);
    params.seed = j.value("seed", std::int64_t{0});
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad params: ") + e.what());
  }
  return params;
}

json generate_request(std::string_view model, const Context& context,
                      const DecodingParams& params) {
  json body = {{"model", model}, {"params", params_to_json(params)}};
  fill_context(body, context, "messages", "prompt");
  return body;
}

json score_request(std::string_view model, const Context& context,
                   std::string_view continuation) {
  json body = {{"model", model}, {"continuation", continuation}};
  fill_context(body, context, "context_messages", "context_text");
  return body;
}

GenerateRequest parse_generate_request(const json& body) {
  const auto& model = require(body, "model");
  if (!model.is_string()) throw InvalidInput("model must be a string");
  GenerateRequest request{model.get<std::string>(),
                          context_from(body, "messages", "prompt"),
                          params_from_json(require(body, "params"))};
  try {
    request.params.validate();
  } catch (const ConfigError& e) {
    throw InvalidInput(e.what());
  }
  return request;
}

ScoreRequest parse_score_request(const json& body) {
  const auto& model = require(body, "model");
  const auto& continuation = require(body, "continuation");
  if (!model.is_string() || !continuation.is_string()) {
    throw InvalidInput("model and continuation must be strings");
  }
  return {model.get<std::string>(),
          context_from(body, "context_messages", "context_text"),
          continuation.get<std::string>()};
}

json generate_response(std::span<const GenResult> results) {
  json choices = json::array();
  for (const auto& r : results) {
    choices.push_back({{"text", r.text},
                       {"tokens", r.tokens},
                       {"token_logprobs", r.token_logprobs}});
  }
  return {{"choices", std::move(choices)}};
}

json score_response(const ScoreResult& result) {
  return {{"tokens", result.continuation_tokens},
          {"token_logprobs", result.token_logprobs}};
}

std::vector<GenResult> parse_generate_response(const json& body) {
  if (!body.is_object() || !body.contains("choices") || !body["choices"].is_array()) {
    throw ProtocolError("generate response lacks a 'choices' array");
  }
  std::vector<GenResult> results;
  for (const auto& choice : body["choices"]) {
    if (!choice.contains("text") || !choice["text"].is_string()) {
      throw ProtocolError("choice lacks a string 'text'");
    }
    auto [tokens, logprobs] = token_arrays(choice);
    results.push_back({choice["text"].get<std::string>(), std::move(tokens),
                       std::move(logprobs)});
  }
  if (results.empty()) throw ProtocolError("generate response has no choices");
  return results;
}

ScoreResult parse_score_response(const json& body) {
  auto [tokens, logprobs] = token_arrays(body);
  if (tokens.empty()) throw ProtocolError("score response has zero tokens");
  return ScoreResult::from_tokens(std::move(tokens), std::move(logprobs));
}

}  // namespace dgrc::wire
