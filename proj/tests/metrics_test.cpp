#include "dgrc/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

#include "dgrc/error.hpp"

namespace dgrc {
namespace {

// Double-loop reference for the preference statistic.
Preference brute_force(const std::vector<double>& s1, const std::vector<double>& s2) {
  Preference p;
  for (const double b : s2) {
    for (const double a : s1) {
      if (b > a) ++p.wins;
      if (b == a) ++p.ties;
    }
  }
  p.value = static_cast<double>(p.wins) / static_cast<double>(s1.size() * s2.size());
  return p;
}

std::vector<double> random_scores(std::mt19937_64& rng, std::size_t n, bool coarse) {
  std::uniform_real_distribution<double> u(-6.0, -0.5);
  std::uniform_int_distribution<int> q(-8, -1);
  std::vector<double> out(n);
  for (auto& x : out) x = coarse ? q(rng) * 0.5 : u(rng);
  return out;
}

TEST(PerTokenScoreTest, Examples) {
  EXPECT_DOUBLE_EQ(per_token_score(-2.0, 1), -2.0);
  EXPECT_DOUBLE_EQ(per_token_score(-12.0, 6), -2.0);
  EXPECT_DOUBLE_EQ(per_token_score(0.0, 3), 0.0);
  EXPECT_THROW(per_token_score(-1.0, 0), InvalidInput);
}

TEST(Vp2PreferenceTest, Examples) {
  auto p = vp2_preference(std::vector{-3.0, -2.0}, std::vector{-1.0, -1.0});
  EXPECT_DOUBLE_EQ(p.value, 1.0);
  EXPECT_EQ(p.ties, 0);
  p = vp2_preference(std::vector{-2.0, -2.0}, std::vector{-2.0, -2.0});
  EXPECT_DOUBLE_EQ(p.value, 0.0);
  EXPECT_EQ(p.ties, 4);
  p = vp2_preference(std::vector{-2.0, -4.0}, std::vector{-3.0, -1.0});
  EXPECT_DOUBLE_EQ(p.value, 0.75);
  EXPECT_EQ(p.ties, 0);
}

TEST(Vp2PreferenceTest, EmptySideIsNamed) {
  try {
    vp2_preference(std::vector<double>{}, std::vector{-1.0});
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("slot-1"), std::string::npos);
  }
  try {
    vp2_preference(std::vector{-1.0}, std::vector<double>{});
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("slot-2"), std::string::npos);
  }
}

TEST(Vp2PreferenceTest, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const bool coarse = trial % 2 == 0;
    const auto s1 = random_scores(rng, 1 + rng() % 12, coarse);
    const auto s2 = random_scores(rng, 1 + rng() % 12, coarse);
    const auto fast = vp2_preference(s1, s2);
    const auto slow = brute_force(s1, s2);
    EXPECT_EQ(fast.wins, slow.wins);
    EXPECT_EQ(fast.ties, slow.ties);
    EXPECT_DOUBLE_EQ(fast.value, slow.value);
  }
}

TEST(Vp2PreferenceTest, Invariants) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s1 = random_scores(rng, 1 + rng() % 10, trial % 3 == 0);
    const auto s2 = random_scores(rng, 1 + rng() % 10, trial % 3 == 0);
    const auto p = vp2_preference(s1, s2);
    const auto q = vp2_preference(s2, s1);
    const double total = static_cast<double>(s1.size() * s2.size());
    EXPECT_GE(p.value, 0.0);
    EXPECT_LE(p.value, 1.0);
    // Complement: wins both ways plus ties cover every pair.
    EXPECT_NEAR(p.value + q.value + static_cast<double>(p.ties) / total, 1.0, 1e-12);
    EXPECT_EQ(p.ties, q.ties);
    // Strictly monotone transforms preserve the statistic.
    auto t1 = s1, t2 = s2;
    for (auto& x : t1) x = 3.0 * x + 7.0;
    for (auto& x : t2) x = 3.0 * x + 7.0;
    EXPECT_EQ(vp2_preference(t1, t2).wins, p.wins);
    // Order of either list is irrelevant.
    auto r1 = s1;
    std::shuffle(r1.begin(), r1.end(), rng);
    EXPECT_EQ(vp2_preference(r1, s2).wins, p.wins);
  }
}

PreferenceResult row(std::string item, double v, Structure s = Structure::kArc,
                     bool swapped = false, Header h = Header::kNone,
                     std::string model = "mock") {
  PreferenceResult r;
  r.item_id = std::move(item);
  r.model_id = std::move(model);
  r.structure = s;
  r.swapped = swapped;
  r.header = h;
  r.vp2_pref = v;
  r.n1 = r.n2 = 10;
  return r;
}

const ModelRegistry kRegistry = {{"mock", false}, {"chatty", true}};

TEST(AggregateTest, ConstantGroupHasZeroWidthInterval) {
  std::vector<PreferenceResult> rows;
  for (int i = 0; i < 20; ++i) rows.push_back(row("i" + std::to_string(i), 0.7));
  const auto agg = aggregate(rows, GroupKeys{}, kRegistry, {.n_boot = 500, .seed = 1});
  ASSERT_EQ(agg.size(), 1u);
  EXPECT_DOUBLE_EQ(agg[0].mean, 0.7);
  EXPECT_DOUBLE_EQ(agg[0].ci_low, 0.7);
  EXPECT_DOUBLE_EQ(agg[0].ci_high, 0.7);
  EXPECT_FALSE(agg[0].degenerate);
}

TEST(AggregateTest, GroupsSplitOnStructure) {
  std::vector<PreferenceResult> rows = {row("a", 0.2), row("b", 0.4),
                                        row("a", 0.9, Structure::kCoord),
                                        row("b", 0.7, Structure::kCoord)};
  const auto agg = aggregate(rows, GroupKeys{}, kRegistry, {.n_boot = 200});
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].structure, Structure::kArc);
  EXPECT_NEAR(agg[0].mean, 0.3, 1e-12);
  EXPECT_EQ(agg[1].structure, Structure::kCoord);
  EXPECT_NEAR(agg[1].mean, 0.8, 1e-12);
  EXPECT_EQ(agg[0].instruct, false);
}

TEST(AggregateTest, BinaryValuesStraddleHalf) {
  std::vector<PreferenceResult> rows;
  for (int i = 0; i < 300; ++i) rows.push_back(row("i" + std::to_string(i), i % 2));
  const auto agg = aggregate(rows, GroupKeys{}, kRegistry, {.n_boot = 2000, .seed = 3});
  ASSERT_EQ(agg.size(), 1u);
  EXPECT_DOUBLE_EQ(agg[0].mean, 0.5);
  EXPECT_LT(agg[0].ci_low, 0.5);
  EXPECT_GT(agg[0].ci_high, 0.5);
  // Normal approximation: half-width ~ 1.96 * 0.5 / sqrt(300) = 0.0566.
  EXPECT_NEAR(agg[0].ci_high - agg[0].ci_low, 2 * 0.0566, 0.02);
}

TEST(AggregateTest, SingleItemIsDegenerate) {
  std::vector<PreferenceResult> rows = {row("only", 0.4)};
  const auto agg = aggregate(rows, GroupKeys{}, kRegistry);
  ASSERT_EQ(agg.size(), 1u);
  EXPECT_TRUE(agg[0].degenerate);
  EXPECT_DOUBLE_EQ(agg[0].ci_low, 0.4);
  EXPECT_DOUBLE_EQ(agg[0].ci_high, 0.4);
}

TEST(AggregateTest, ItemsAreAveragedBeforeResampling) {
  // Pooling over swapped: item a contributes (0 + 1) / 2, item b 1.
  std::vector<PreferenceResult> rows = {row("a", 0.0), row("a", 1.0, Structure::kArc, true),
                                        row("b", 1.0)};
  GroupKeys keys;
  keys.swapped = false;
  const auto agg = aggregate(rows, keys, kRegistry, {.n_boot = 100});
  ASSERT_EQ(agg.size(), 1u);
  EXPECT_EQ(agg[0].n_items, 2u);
  EXPECT_DOUBLE_EQ(agg[0].mean, 0.75);
  EXPECT_FALSE(agg[0].swapped.has_value());
}

TEST(AggregateTest, DeterministicPerSeed) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PreferenceResult> rows;
  for (int i = 0; i < 50; ++i) rows.push_back(row("i" + std::to_string(i), u(rng)));
  const auto a = aggregate(rows, GroupKeys{}, kRegistry, {.n_boot = 1000, .seed = 11});
  const auto b = aggregate(rows, GroupKeys{}, kRegistry, {.n_boot = 1000, .seed = 11});
  const auto c = aggregate(rows, GroupKeys{}, kRegistry, {.n_boot = 1000, .seed = 12});
  EXPECT_EQ(a[0].ci_low, b[0].ci_low);
  EXPECT_EQ(a[0].ci_high, b[0].ci_high);
  EXPECT_TRUE(a[0].ci_low != c[0].ci_low || a[0].ci_high != c[0].ci_high);
  EXPECT_LE(a[0].ci_low, a[0].mean);
  EXPECT_GE(a[0].ci_high, a[0].mean);
}

TEST(AggregateTest, UnknownModelIsRejected) {
  std::vector<PreferenceResult> rows = {row("a", 0.5, Structure::kArc, false, Header::kNone,
                                            "ghost")};
  EXPECT_THROW(aggregate(rows, GroupKeys{}, kRegistry), InvalidInput);
}

TEST(AggregateCsvTest, UngroupedKeysPrintAll) {
  std::vector<PreferenceResult> rows = {row("a", 0.5), row("b", 0.25)};
  GroupKeys keys;
  keys.header = false;
  keys.swapped = false;
  const auto csv = aggregate_csv(aggregate(rows, keys, kRegistry, {.n_boot = 10}));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "model,instruct,structure,swapped,header,mean,ci_low,ci_high,n_items");
  EXPECT_NE(csv.find("\nmock,0,arc,all,all,0.375,"), std::string::npos);
}

TEST(ExportLongTest, SerializesRows) {
  std::vector<PreferenceResult> rows = {row("item_0001", 0.75)};
  EXPECT_EQ(export_long(rows, kRegistry),
            "item,model,instruct,structure,swapped,header,vp2_pref\n"
            "item_0001,mock,0,arc,0,none,0.75\n");
  std::vector<PreferenceResult> many;
  for (int i = 0; i < 1200; ++i) many.push_back(row("i" + std::to_string(i), 0.5));
  const auto out = export_long(many, kRegistry);
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 1201);
  many.push_back(row("x", 0.5, Structure::kArc, false, Header::kNone, "ghost"));
  EXPECT_THROW(export_long(many, kRegistry), InvalidInput);
}

TEST(PreferenceResultTest, JsonRoundTrip) {
  auto r = row("item_0009", 0.125, Structure::kCoord, true, Header::kDigression, "chatty");
  r.n1 = 7;
  r.ties = 3;
  EXPECT_EQ(preference_from_json(to_json(r)), r);
  EXPECT_EQ(to_json(r)["comparisons"], 70);
  EXPECT_THROW(preference_from_json({{"item_id", "x"}}), InvalidInput);
}

TEST(FormatNumberTest, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.75), "0.75");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace dgrc
