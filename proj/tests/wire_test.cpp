#include "dgrc/wire.hpp"

#include <gtest/gtest.h>

#include "dgrc/error.hpp"
#include "dgrc/prompts.hpp"

namespace dgrc::wire {
namespace {

using nlohmann::json;

TEST(WireTest, GenerateRequestRoundTripsChat) {
  DecodingParams p;
  p.strategy = Strategy::kSample;
  p.temperature = 0.7;
  p.top_p = 0.95;
  p.top_k = 50;
  p.n = 5;
  p.seed = 99;
  const Context ctx = render_chat("The librarian likes pasta.", Header::kReject);
  const json body = generate_request("m1", ctx, p);
  EXPECT_EQ(body["mode"], "chat");
  EXPECT_TRUE(body["prompt"].is_null());
  const auto parsed = parse_generate_request(body);
  EXPECT_EQ(parsed.model, "m1");
  EXPECT_EQ(parsed.context, ctx);
  EXPECT_EQ(parsed.params, p);
}

TEST(WireTest, ScoreRequestRoundTripsText) {
  const Context ctx{std::string("Marco said, \"Hi,\" and Ellie replied, \"")};
  const json body = score_request("m2", ctx, "Oh really.");
  EXPECT_EQ(body["mode"], "text");
  EXPECT_TRUE(body["context_messages"].is_null());
  const auto parsed = parse_score_request(body);
  EXPECT_EQ(parsed.context, ctx);
  EXPECT_EQ(parsed.continuation, "Oh really.");
}

TEST(WireTest, MalformedRequestsAreInvalidInput) {
  EXPECT_THROW(parse_score_request(json::object()), InvalidInput);
  EXPECT_THROW(parse_score_request({{"model", "m"}, {"continuation", "x"}, {"mode", "audio"}}),
               InvalidInput);
  json bad = generate_request("m", Context{std::string("x")}, greedy_params(40, 0));
  bad["params"]["strategy"] = "beam";
  EXPECT_THROW(parse_generate_request(bad), InvalidInput);
  bad["params"]["strategy"] = "greedy";
  bad["params"]["n"] = 3;
  EXPECT_THROW(parse_generate_request(bad), InvalidInput);
}

TEST(WireTest, ResponsesRoundTrip) {
  const std::vector<GenResult> gens = {{"Oh wow.", {"Oh", "wow."}, {-1.0, -2.5}}};
  EXPECT_EQ(parse_generate_response(generate_response(gens)), gens);
  const auto score = ScoreResult::from_tokens({"a", "b"}, {-0.5, -1.5});
  EXPECT_EQ(parse_score_response(score_response(score)), score);
}

TEST(WireTest, MissingLogprobsIsProtocolError) {
  EXPECT_THROW(parse_score_response({{"tokens", {"a"}}}), ProtocolError);
  EXPECT_THROW(parse_generate_response({{"choices", {{{"text", "a"}, {"tokens", {"a"}}}}}}),
               ProtocolError);
  EXPECT_THROW(parse_generate_response({{"choices", json::array()}}), ProtocolError);
}

TEST(WireTest, ContractViolationsAreProtocolErrors) {
  EXPECT_THROW(parse_score_response({{"tokens", {"a", "b"}}, {"token_logprobs", {-1.0}}}),
               ProtocolError);
  EXPECT_THROW(parse_score_response({{"tokens", {"a"}}, {"token_logprobs", {0.5}}}),
               ProtocolError);
  EXPECT_THROW(parse_score_response({{"tokens", json::array()}, {"token_logprobs", json::array()}}),
               ProtocolError);
  // Rounding noise just above zero is clamped.
  const auto r = parse_score_response({{"tokens", {"a"}}, {"token_logprobs", {1e-9}}});
  EXPECT_EQ(r.token_logprobs[0], 0.0);
}

}  // namespace
}  // namespace dgrc::wire
