#include "dgrc/mock_backend.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "dgrc/error.hpp"
#include "dgrc/hashing.hpp"
#include "dgrc/text.hpp"

namespace dgrc {
namespace {

DecodingParams sample_params(int n, std::int64_t seed = 11) {
  DecodingParams p;
  p.strategy = Strategy::kSample;
  p.temperature = 0.7;
  p.top_p = 0.9;
  p.top_k = 50;
  p.n = n;
  p.seed = seed;
  return p;
}

// Published reference values for the two hash primitives.
TEST(HashingTest, ReferenceVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  SplitMix64 rng(1234567);
  EXPECT_EQ(rng.next(), 6457827717110365317ULL);
  EXPECT_EQ(rng.next(), 3203168211198807973ULL);
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(HashingTest, FieldBoundariesMatter) {
  EXPECT_NE(Hasher64(0).add("ab").add("c").digest(), Hasher64(0).add("a").add("bc").digest());
  EXPECT_NE(Hasher64(0).add("x").digest(), Hasher64(1).add("x").digest());
}

TEST(MockBackendTest, GreedyIsDeterministic) {
  MockBackend mock;
  const Context ctx = render_chat("The librarian likes pasta.", Header::kNone);
  const auto a = mock.generate(ctx, greedy_params(40, 3));
  const auto b = mock.generate(ctx, greedy_params(40, 3));
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a, b);
}

TEST(MockBackendTest, SampleShapeContract) {
  MockBackend mock;
  const Context ctx = render_chat("The librarian likes pasta.", Header::kNone);
  const auto results = mock.generate(ctx, sample_params(5));
  ASSERT_LE(results.size(), 5u);
  ASSERT_GE(results.size(), 1u);
  for (const auto& r : results) {
    ASSERT_EQ(r.tokens.size(), r.token_logprobs.size());
    EXPECT_GE(r.tokens.size(), 4u);
    EXPECT_LE(r.tokens.size(), 10u);
    EXPECT_EQ(join_tokens(r.tokens), r.text);
    for (const double lp : r.token_logprobs) {
      EXPECT_LE(lp, -0.5);
      EXPECT_GT(lp, -6.0);
    }
  }
}

TEST(MockBackendTest, MaxTokensCapsLength) {
  MockBackend mock;
  auto params = sample_params(8);
  params.max_tokens = 3;
  for (const auto& r : mock.generate(Context{std::string("A said, \"B c,\" and D replied, \"")},
                                     params)) {
    EXPECT_LE(r.tokens.size(), 3u);
  }
}

TEST(MockBackendTest, ScoreMatchesGenerationAndIsDeterministic) {
  MockBackend mock(MockOptions{.seed = 5});
  const Context ctx = render_chat("The nurse looks confident.", Header::kReject);
  auto params = sample_params(4);
  params.seed = 5;
  for (const auto& r : mock.generate(ctx, params)) {
    const auto s1 = mock.score(ctx, r.text);
    const auto s2 = mock.score(ctx, r.text);
    EXPECT_EQ(s1, s2);
    EXPECT_EQ(s1.token_logprobs, r.token_logprobs);
    EXPECT_EQ(s1.n_tokens, static_cast<int>(r.tokens.size()));
    EXPECT_NEAR(s1.logprob_sum,
                std::accumulate(s1.token_logprobs.begin(), s1.token_logprobs.end(), 0.0), 1e-9);
  }
}

TEST(MockBackendTest, ScoreDependsOnContextAndSeed) {
  MockBackend a(MockOptions{.seed = 1});
  MockBackend b(MockOptions{.seed = 2});
  const Context c1 = render_chat("The librarian likes pasta.", Header::kNone);
  const Context c2 = render_chat("The librarian is famous.", Header::kNone);
  EXPECT_NE(a.score(c1, "Oh really.").token_logprobs, a.score(c2, "Oh really.").token_logprobs);
  EXPECT_NE(a.score(c1, "Oh really.").token_logprobs, b.score(c1, "Oh really.").token_logprobs);
  // Prefix property: a token's logprob depends only on the tokens before it.
  EXPECT_EQ(a.score(c1, "Oh really.").token_logprobs[0],
            a.score(c1, "Oh wow.").token_logprobs[0]);
}

TEST(MockBackendTest, ZeroTokenContinuationIsInvalid) {
  MockBackend mock;
  EXPECT_THROW(mock.score(Context{std::string("x")}, "   "), InvalidInput);
}

TEST(MockBackendTest, SingletonSum) {
  const auto r = ScoreResult::from_tokens({"tok"}, {-2.0});
  EXPECT_EQ(r.n_tokens, 1);
  EXPECT_DOUBLE_EQ(r.logprob_sum, -2.0);
  EXPECT_THROW(ScoreResult::from_tokens({}, {}), InvalidInput);
}

// Frozen output of the fixed hash: guards against platform-dependent drift.
TEST(MockBackendTest, FrozenTokenLogprob) {
  MockBackend mock(MockOptions{.seed = 7});
  const auto r = mock.score(Context{std::string("Marco said, \"Hi,\" and Ellie replied, \"")},
                            "Oh really.");
  ASSERT_EQ(r.n_tokens, 2);
  EXPECT_DOUBLE_EQ(r.token_logprobs[0], -3.5270481176913475);
  EXPECT_DOUBLE_EQ(r.token_logprobs[1], -1.1829094203509991);
}

TEST(MockBackendTest, GenerationIsAnchoredToTheUtterance) {
  MockBackend mock;
  const Context ctx = render_chat("The librarian likes pasta.", Header::kNone);
  const auto results = mock.generate(ctx, sample_params(40));
  int anchored = 0;
  for (const auto& r : results) {
    if (content_overlap(r.text, "likes pasta") > 0.0) ++anchored;
  }
  EXPECT_GT(anchored, 20);
}

TEST(MockBackendTest, SamplingConfigsProduceDifferentCandidates) {
  MockBackend mock;
  const Context ctx = render_chat("The librarian likes pasta.", Header::kNone);
  auto p1 = sample_params(3);
  auto p2 = p1;
  p2.temperature = 1.0;
  EXPECT_NE(mock.generate(ctx, p1), mock.generate(ctx, p2));
  auto p3 = p1;
  p3.seed = 12;
  EXPECT_NE(mock.generate(ctx, p1), mock.generate(ctx, p3));
}

TEST(MockBackendTest, InvalidParamsAreRejected) {
  MockBackend mock;
  auto p = sample_params(2);
  p.temperature = 0.0;
  EXPECT_THROW(mock.generate(Context{std::string("x")}, p), ConfigError);
  auto g = greedy_params(40, 0);
  g.n = 3;
  EXPECT_THROW(mock.generate(Context{std::string("x")}, g), ConfigError);
}

}  // namespace
}  // namespace dgrc
