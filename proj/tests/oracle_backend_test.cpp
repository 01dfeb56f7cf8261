#include "dgrc/oracle_backend.hpp"

#include <gtest/gtest.h>

#include "dgrc/error.hpp"
#include "dgrc/prompts.hpp"
#include "dgrc/stimuli.hpp"

namespace dgrc {
namespace {

const std::vector<StimulusItem> kItems = {
    {"item_0001", "The librarian", "likes pasta", "is famous"},
    {"item_0002", "My friend", "is tall", "has a nice voice"},
};

OracleBackend make_oracle(double delta, double coord = 1.0, double dig = 1.0) {
  OracleOptions o;
  o.seed = 3;
  o.delta = delta;
  o.coord_scale = coord;
  o.digression_scale = dig;
  return OracleBackend(o, kItems);
}

Context arc(Header h = Header::kNone, bool swapped = false) {
  const auto item = swapped ? swap_vps(kItems[0]) : kItems[0];
  return render_chat(build_full(item, Structure::kArc), h);
}

Context coord(Header h = Header::kNone) {
  return render_chat(build_full(kItems[0], Structure::kCoord), h);
}

TEST(OracleBackendTest, ZeroDeltaIgnoresStructureAndHeader) {
  auto oracle = make_oracle(0.0);
  for (const char* x : {"Famous indeed.", "I love pasta too.", "Sure thing."}) {
    const auto base = oracle.score(arc(), x);
    EXPECT_EQ(base, oracle.score(coord(), x));
    EXPECT_EQ(base, oracle.score(arc(Header::kReject), x));
    EXPECT_EQ(base, oracle.score(arc(Header::kDigression), x));
  }
}

// Hand-computed shifts for "The librarian, who likes pasta, is famous.":
// "Famous indeed." overlaps vp2 fully and vp1 not at all -> shift 0.
// "Pasta indeed." overlaps half of vp1 -> shift delta * (0 - 0.5 - 1).
TEST(OracleBackendTest, ShiftMatchesHandComputedOverlap) {
  auto zero = make_oracle(0.0);
  auto four = make_oracle(4.0);
  const auto f0 = zero.score(arc(), "Famous indeed.");
  const auto f4 = four.score(arc(), "Famous indeed.");
  const auto p0 = zero.score(arc(), "Pasta indeed.");
  const auto p4 = four.score(arc(), "Pasta indeed.");
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(f4.token_logprobs[i], f0.token_logprobs[i] + 0.0, 1e-12);
    EXPECT_NEAR(p4.token_logprobs[i], p0.token_logprobs[i] - 6.0, 1e-12);
  }
  // Neither-overlap continuation is shifted by -delta.
  const auto n0 = zero.score(arc(), "Sure thing.");
  const auto n4 = four.score(arc(), "Sure thing.");
  EXPECT_NEAR(n4.logprob_sum, n0.logprob_sum - 8.0, 1e-12);
}

TEST(OracleBackendTest, SwappedSurfaceFlipsTheFavouredVp) {
  auto oracle = make_oracle(4.0);
  // Swapped: "The librarian, who is famous, likes pasta." -> pasta is at-issue.
  const auto s = oracle.score(arc(Header::kNone, true), "Pasta indeed.");
  const auto f = oracle.score(arc(Header::kNone, true), "Famous indeed.");
  EXPECT_GT(s.logprob_sum / s.n_tokens, f.logprob_sum / f.n_tokens);
}

TEST(OracleBackendTest, LogprobsStayNegative) {
  auto oracle = make_oracle(4.0);
  for (const char* x : {"Famous famous famous.", "Pasta likes pasta.", "A b c d."}) {
    for (const double lp : oracle.score(arc(), x).token_logprobs) EXPECT_LT(lp, 0.0);
  }
}

TEST(OracleBackendTest, UnknownContextHasNoBias) {
  auto oracle = make_oracle(4.0);
  const Context other = render_chat("Something unrelated.", Header::kNone);
  EXPECT_EQ(oracle.bias_for(other), 0.0);
  EXPECT_EQ(oracle.score(other, "Pasta indeed."),
            make_oracle(0.0).score(other, "Pasta indeed."));
}

TEST(OracleBackendTest, BaseModeContextsAreRecognized) {
  auto oracle = make_oracle(2.0);
  const Context base{render_base(build_full(kItems[0], Structure::kArc), Header::kReject,
                                 "Marco", "Ellie")};
  EXPECT_DOUBLE_EQ(oracle.bias_for(base), 2.0);
}

TEST(OracleBackendTest, StructureExtensionWeakensCoord) {
  auto oracle = make_oracle(4.0, 0.25);
  EXPECT_DOUBLE_EQ(oracle.bias_for(arc()), 4.0);
  EXPECT_DOUBLE_EQ(oracle.bias_for(coord()), 1.0);
}

TEST(OracleBackendTest, DigressionExtensionWeakensDigressionArc) {
  auto oracle = make_oracle(4.0, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(oracle.bias_for(arc(Header::kReject)), 4.0);
  EXPECT_DOUBLE_EQ(oracle.bias_for(arc(Header::kDigression)), 2.0);
  EXPECT_DOUBLE_EQ(oracle.bias_for(coord(Header::kDigression)), 4.0);
}

TEST(OracleBackendTest, GenerationDelegatesToMock) {
  auto oracle = make_oracle(4.0);
  MockBackend mock(MockOptions{"oracle", 3, 0.6});
  const Context ctx = render_chat(build_sub(kItems[0], Slot::kVp2), Header::kNone);
  EXPECT_EQ(oracle.generate(ctx, greedy_params(40, 1)), mock.generate(ctx, greedy_params(40, 1)));
}

TEST(OracleBackendTest, RejectsNegativeParameters) {
  EXPECT_THROW(make_oracle(-1.0), ConfigError);
  EXPECT_THROW(make_oracle(1.0, -0.5), ConfigError);
}

}  // namespace
}  // namespace dgrc
