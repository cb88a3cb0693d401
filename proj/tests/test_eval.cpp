#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ngf/data.hpp"
#include "ngf/error.hpp"
#include "ngf/eval.hpp"
#include "ngf/random.hpp"

using namespace ngf;

namespace {

double brute_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double num = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1.0;
      num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return num / pairs;
}

// items c<k>_<i>; the embedding's first coordinate is the item index
Corpus fitb_corpus(std::size_t outfits) {
  Corpus c(1);
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 10; ++i) {
      c.add_item({"c" + std::to_string(k) + "_" + std::to_string(i), "c" + std::to_string(k),
                  {static_cast<double>(i)}, {}});
    }
  }
  Rng rng(3);
  for (std::size_t o = 0; o < outfits; ++o) {
    std::vector<std::string> ids;
    for (int k = 0; k < 3; ++k) ids.push_back("c" + std::to_string(k) + "_" + std::to_string(uniform_index(rng, 10)));
    c.add_outfit({"o" + std::to_string(o), ids, 1, kAllStyles[o % 2]});
  }
  return c;
}

SetScorer constant_scorer(double v) {
  return [v](std::span<const std::vector<const ItemRecord*>> sets) {
    return std::vector<NetworkOutput>(sets.size(), NetworkOutput{v, {}});
  };
}

}  // namespace

TEST(Auc, Examples) {
  EXPECT_EQ(auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0}), 1.0);
  EXPECT_EQ(auc(std::vector<double>{0.3, 0.3, 0.3, 0.3}, std::vector<int>{1, 0, 1, 0}), 0.5);
  EXPECT_EQ(auc(std::vector<double>{0.9, 0.4, 0.6, 0.1}, std::vector<int>{1, 1, 0, 0}), 0.75);
}

TEST(Auc, UndefinedAndInvalid) {
  EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), DomainError);
  EXPECT_THROW(auc(std::vector<double>{NAN, 0.2}, std::vector<int>{1, 0}), DomainError);
  EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 2}), ContractError);
}

TEST(Auc, MatchesBruteForceExactly) {
  Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + uniform_index(rng, 199);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(uniform_index(rng, 20)) / 20.0;  // coarse grid forces ties
      y[i] = static_cast<int>(uniform_index(rng, 2));
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_EQ(auc(s, y), brute_auc(s, y));
  }
}

TEST(Auc, MonotoneTransformAndLabelFlip) {
  Rng rng(43);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 10 + uniform_index(rng, 100);
    std::vector<double> s(n), f(n);
    std::vector<int> y(n), flipped(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = uniform01(rng);
      f[i] = std::exp(3.0 * s[i]) - 7.0;
      y[i] = static_cast<int>(uniform_index(rng, 2));
    }
    y[0] = 1;
    y[1] = 0;
    for (std::size_t i = 0; i < n; ++i) flipped[i] = 1 - y[i];
    EXPECT_EQ(auc(s, y), auc(f, y));
    EXPECT_NEAR(auc(s, y) + auc(s, flipped), 1.0, 1e-12);
  }
}

TEST(Fitb, ConstantScorerPicksFirstCandidate) {
  const auto c = fitb_corpus(400);
  const auto qs = generate_fitb_questions(c, 5);
  ASSERT_EQ(qs.size(), 400u);
  const double first =
      static_cast<double>(std::count_if(qs.begin(), qs.end(), [](const FITBQuestion& q) { return q.answer_index == 0; })) /
      static_cast<double>(qs.size());
  EXPECT_EQ(fitb_accuracy(qs, c, constant_scorer(0.7)), first);
}

TEST(Fitb, OracleScorer) {
  // outfit o is {c0_o, c1_o, c2_o}, so no distractor completes another outfit
  Corpus c(1);
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 10; ++i) {
      c.add_item({"c" + std::to_string(k) + "_" + std::to_string(i), "c" + std::to_string(k),
                  {static_cast<double>(i)}, {}});
    }
  }
  for (int o = 0; o < 10; ++o) {
    const auto i = std::to_string(o);
    c.add_outfit({"o" + i, {"c0_" + i, "c1_" + i, "c2_" + i}, 1, std::nullopt});
  }
  const auto qs = generate_fitb_questions(c, 6);
  ASSERT_EQ(qs.size(), 10u);
  // score 1 exactly for sets that are a source outfit
  std::set<std::set<std::string>> truth;
  for (const auto& o : c.outfits()) truth.insert(std::set<std::string>(o.items.begin(), o.items.end()));
  SetScorer oracle = [&](std::span<const std::vector<const ItemRecord*>> sets) {
    std::vector<NetworkOutput> out;
    for (const auto& s : sets) {
      std::set<std::string> ids;
      for (const auto* it : s) ids.insert(it->id);
      out.push_back({truth.count(ids) ? 1.0 : 0.0, {}});
    }
    return out;
  };
  EXPECT_EQ(fitb_accuracy(qs, c, oracle), 1.0);
}

TEST(Fitb, RandomScorerNearChance) {
  const auto c = fitb_corpus(10000);
  const auto qs = generate_fitb_questions(c, 7);
  Rng rng(8);
  SetScorer random = [&](std::span<const std::vector<const ItemRecord*>> sets) {
    std::vector<NetworkOutput> out;
    for (std::size_t i = 0; i < sets.size(); ++i) out.push_back({uniform01(rng), {}});
    return out;
  };
  EXPECT_NEAR(fitb_accuracy(qs, c, random), 0.25, 0.02);
}

TEST(Fitb, OrderInvariantAndErrors) {
  const auto c = fitb_corpus(60);
  auto qs = generate_fitb_questions(c, 9);
  SetScorer by_sum = [](std::span<const std::vector<const ItemRecord*>> sets) {
    std::vector<NetworkOutput> out;
    for (const auto& s : sets) {
      double v = 0.0;
      for (const auto* it : s) v += it->embedding[0];
      out.push_back({v / 100.0, {}});
    }
    return out;
  };
  const double a = fitb_accuracy(qs, c, by_sum);
  std::reverse(qs.begin(), qs.end());
  EXPECT_EQ(fitb_accuracy(qs, c, by_sum), a);
  EXPECT_THROW(fitb_accuracy(std::vector<FITBQuestion>{}, c, by_sum), DomainError);
  qs[0].candidates[1] = "ghost";
  try {
    fitb_accuracy(qs, c, by_sum);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(qs[0].outfit_id), std::string::npos);
  }
}

TEST(Breakdown, WeightedAverages) {
  const std::vector<std::pair<double, std::size_t>> eq{{0.8, 5}, {0.9, 5}}, uneq{{1.0, 1}, {0.8, 3}};
  EXPECT_NEAR(weighted_average(eq), 0.85, 1e-15);
  EXPECT_NEAR(weighted_average(uneq), 0.85, 1e-15);
  EXPECT_THROW(weighted_average(std::vector<std::pair<double, std::size_t>>{}), DomainError);
}

TEST(Breakdown, SingleGroupEqualsGlobal) {
  std::vector<ScoredSet> s;
  Rng rng(10);
  for (int i = 0; i < 40; ++i) s.push_back({"s" + std::to_string(i), uniform01(rng), i % 2, std::nullopt, 3});
  for (auto& x : s) {
    if (x.label == 1) x.style = StyleLabel::kTriadic;
  }
  std::vector<FitbOutcome> f;
  for (int i = 0; i < 10; ++i) f.push_back({"o", StyleLabel::kTriadic, 3, 0, i < 3});
  const auto by_len = breakdown(s, f, BreakdownKey::kLength);
  ASSERT_EQ(by_len.groups.size(), 1u);
  EXPECT_EQ(*by_len.weighted_auc, auc(s));
  EXPECT_EQ(*by_len.weighted_fitb, 0.3);
  const auto by_style = breakdown(s, f, BreakdownKey::kStyle);
  ASSERT_EQ(by_style.groups.size(), 1u);
  EXPECT_EQ(by_style.groups[0].group, "triadic");
  EXPECT_EQ(*by_style.weighted_auc, auc(s));
  EXPECT_FALSE(by_style.notices.empty());
}

TEST(Breakdown, PerStyleUsesAllNegatives) {
  std::vector<ScoredSet> s = {{"p1", 0.9, 1, StyleLabel::kSame, 2},    {"p2", 0.4, 1, StyleLabel::kAnalogous, 3},
                              {"p3", 0.8, 1, StyleLabel::kAnalogous, 3}, {"p4", 0.7, 1, StyleLabel::kAnalogous, 3},
                              {"n1", 0.6, 0, std::nullopt, 2},          {"n2", 0.1, 0, std::nullopt, 3}};
  const auto b = breakdown(s, {}, BreakdownKey::kStyle);
  ASSERT_EQ(b.groups.size(), 2u);
  EXPECT_EQ(b.groups[0].group, "analogous");
  EXPECT_EQ(*b.groups[0].auc, 5.0 / 6.0);
  EXPECT_EQ(b.groups[0].auc_weight, 3u);
  EXPECT_EQ(*b.groups[1].auc, 1.0);
  EXPECT_NEAR(*b.weighted_auc, (3 * 5.0 / 6.0 + 1.0) / 4.0, 1e-15);
  const auto l = breakdown(s, {}, BreakdownKey::kLength);
  ASSERT_EQ(l.groups.size(), 2u);
  EXPECT_EQ(l.groups[0].group, "len=2");
}

TEST(Report, JsonAndTable) {
  EvalReport r;
  r.sets = 4;
  r.questions = 2;
  r.auc = 0.75;
  r.fitb = 0.5;
  std::vector<ScoredSet> s = {{"a", 0.9, 1, StyleLabel::kSame, 2}, {"b", 0.1, 0, std::nullopt, 2}};
  r.breakdowns.push_back(breakdown(s, {}, BreakdownKey::kStyle));
  const auto j = to_json(r);
  EXPECT_EQ(j["auc"], 0.75);
  EXPECT_EQ(j["breakdowns"][0]["by"], "style");
  const auto t = to_table(r);
  EXPECT_NE(t.find("0.7500"), std::string::npos);
  EXPECT_NE(t.find("weighted avg"), std::string::npos);
  EXPECT_EQ(to_table(r), t);
}
