#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "ngf/corpus.hpp"
#include "ngf/data.hpp"
#include "ngf/error.hpp"
#include "ngf/random.hpp"

using namespace ngf;
using nlohmann::json;

namespace {

json minimal_json() {
  return json::parse(R"({"dim": 2,
    "items": [{"id": "a", "category": "top", "embedding": [0.5, 1.0], "color": {"h": 10, "s": 0.5, "v": 0.5}},
              {"id": "b", "category": "shoe", "embedding": [0.0, -1.0]}],
    "outfits": [{"id": "o1", "items": ["a", "b"], "label": 1, "style": null}],
    "split_disjoint": false})");
}

std::string message_of(const json& j) {
  try {
    corpus_from_json(j);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

// categories c0..c{k-1}, `per` items each named c<k>_<i>
Corpus grid_corpus(std::size_t cats, std::size_t per) {
  Corpus c(1);
  for (std::size_t k = 0; k < cats; ++k) {
    for (std::size_t i = 0; i < per; ++i) {
      c.add_item({"c" + std::to_string(k) + "_" + std::to_string(i), "c" + std::to_string(k),
                  {static_cast<double>(i)}, make_color(37.0 * i, 0.8, 0.7)});
    }
  }
  return c;
}

}  // namespace

TEST(LoadCorpus, MinimalFile) {
  const auto c = corpus_from_json(minimal_json());
  EXPECT_EQ(c.outfits().size(), 1u);
  EXPECT_EQ(c.items().size(), 2u);
  EXPECT_TRUE(c.item("a").color.has_value());
  EXPECT_FALSE(c.item("b").color.has_value());
}

TEST(LoadCorpus, DanglingIdNamed) {
  auto j = minimal_json();
  j["outfits"][0]["items"][1] = "ghost";
  EXPECT_NE(message_of(j).find("ghost"), std::string::npos);
}

TEST(LoadCorpus, TwoTopsInCompatibleOutfit) {
  auto j = minimal_json();
  j["items"][1]["category"] = "top";
  const auto msg = message_of(j);
  EXPECT_NE(msg.find("o1"), std::string::npos);
  EXPECT_NE(msg.find("top"), std::string::npos);
  j["outfits"][0]["label"] = 0;
  EXPECT_NO_THROW(corpus_from_json(j));
}

TEST(LoadCorpus, SchemaViolations) {
  auto j = minimal_json();
  j["extra"] = 1;
  EXPECT_FALSE(message_of(j).empty());
  j = minimal_json();
  j["items"][0]["embedding"] = json::array({1.0});
  EXPECT_FALSE(message_of(j).empty());
  j = minimal_json();
  j["outfits"][0]["style"] = "paisley";
  EXPECT_FALSE(message_of(j).empty());
}

TEST(LoadCorpus, FileRoundTrip) {
  SynthSpec spec;
  spec.train_sets = 30;
  spec.test_sets = 5;
  spec.items_per_category = 20;
  spec.style_mix = {{StyleLabel::kAnalogous, 1}, {StyleLabel::kMonochromatic, 1}};
  const auto split = synth_corpus(spec, 4);
  const auto path = std::filesystem::temp_directory_path() / "ngf_corpus_rt.json";
  save_corpus(path, split.train);
  const auto back = load_corpus(path);
  EXPECT_EQ(back, split.train);
  std::filesystem::remove(path);
  EXPECT_THROW(load_corpus(path), DataError);
}

TEST(NegativeOutfit, ForcedWhenOneAlternative) {
  auto c = grid_corpus(3, 2);
  c.add_outfit({"p", {"c0_0", "c1_0", "c2_1"}, 1, StyleLabel::kOther});
  const auto neg = generate_negative_outfit(c.outfits()[0], c, 5);
  EXPECT_EQ(neg.items, (std::vector<std::string>{"c0_1", "c1_1", "c2_0"}));
  EXPECT_EQ(neg.label, 0);
  EXPECT_EQ(neg.style, std::nullopt);
  EXPECT_EQ(neg.id, "p-neg");
}

TEST(NegativeOutfit, SameSeedSameNegative) {
  auto c = grid_corpus(4, 6);
  c.add_outfit({"p", {"c0_0", "c1_0", "c2_0", "c3_0"}, 1, {}});
  for (auto mode : {NegativeMode::kAllSwap, NegativeMode::kOneSwap}) {
    EXPECT_EQ(generate_negative_outfit(c.outfits()[0], c, 99, mode),
              generate_negative_outfit(c.outfits()[0], c, 99, mode));
  }
}

TEST(NegativeOutfit, NeverEqualsSourceExhaustive) {
  // every positive over a 3x3 grid, many seeds, both modes
  auto c = grid_corpus(3, 3);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int d = 0; d < 3; ++d) {
        c.add_outfit({"p" + std::to_string(a) + std::to_string(b) + std::to_string(d),
                      {"c0_" + std::to_string(a), "c1_" + std::to_string(b), "c2_" + std::to_string(d)},
                      1,
                      {}});
      }
    }
  }
  for (const auto& o : c.outfits()) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto all = generate_negative_outfit(o, c, seed, NegativeMode::kAllSwap);
      for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NE(all.items[i], o.items[i]);
        EXPECT_EQ(c.item(all.items[i]).category, c.item(o.items[i]).category);
      }
      const auto one = generate_negative_outfit(o, c, seed, NegativeMode::kOneSwap);
      std::size_t changed = 0;
      for (std::size_t i = 0; i < 3; ++i) changed += one.items[i] != o.items[i];
      EXPECT_EQ(changed, 1u);
    }
  }
}

TEST(NegativeOutfit, EmptyPool) {
  auto c = grid_corpus(2, 1);
  c.add_outfit({"p", {"c0_0", "c1_0"}, 1, {}});
  EXPECT_THROW(generate_negative_outfit(c.outfits()[0], c, 1), DataError);
}

TEST(Fitb, ForcedDistractors) {
  auto c = grid_corpus(3, 4);
  c.add_outfit({"p", {"c0_0", "c1_0", "c2_0"}, 1, {}});
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto q = generate_fitb(c.outfits()[0], c, seed);
    EXPECT_EQ(q.given_items.size(), 2u);
    const std::string truth = q.category + "_0";
    EXPECT_EQ(q.answer(), truth);
    std::set<std::string> cands(q.candidates.begin(), q.candidates.end());
    std::set<std::string> expected;
    for (int i = 0; i < 4; ++i) expected.insert(q.category + "_" + std::to_string(i));
    EXPECT_EQ(cands, expected);
    // answerable: truth plus the given items rebuilds the source outfit
    std::set<std::string> rebuilt(q.given_items.begin(), q.given_items.end());
    rebuilt.insert(q.answer());
    EXPECT_EQ(rebuilt, std::set<std::string>(c.outfits()[0].items.begin(), c.outfits()[0].items.end()));
  }
}

TEST(Fitb, AnswerIndexUniformChiSquare) {
  auto c = grid_corpus(3, 6);
  c.add_outfit({"p", {"c0_0", "c1_0", "c2_0"}, 1, {}});
  std::array<double, 4> counts{};
  const int n = 10000;
  for (int s = 0; s < n; ++s) counts[generate_fitb(c.outfits()[0], c, derive_seed(77, s)).answer_index] += 1;
  double chi2 = 0.0;
  for (double k : counts) chi2 += (k - n / 4.0) * (k - n / 4.0) / (n / 4.0);
  // 3 degrees of freedom, p = 0.001 critical value
  EXPECT_LT(chi2, 16.27);
}

TEST(Fitb, Errors) {
  auto c = grid_corpus(3, 3);
  c.add_outfit({"p", {"c0_0", "c1_0", "c2_0"}, 1, {}});
  c.add_outfit({"short", {"c0_0", "c1_0"}, 1, {}});
  c.add_outfit({"n", {"c0_0", "c1_1", "c2_2"}, 0, {}});
  EXPECT_THROW(generate_fitb(c.outfits()[0], c, 1), DataError);
  EXPECT_THROW(generate_fitb(c.outfits()[1], c, 1), DataError);
  EXPECT_THROW(generate_fitb(c.outfits()[2], c, 1), DataError);
  EXPECT_TRUE(generate_fitb_questions(c, 1).empty());
}

TEST(Oversample, CountsBalanced) {
  auto c = grid_corpus(2, 10);
  for (int i = 0; i < 4; ++i) {
    c.add_outfit({"a" + std::to_string(i), {"c0_" + std::to_string(i), "c1_" + std::to_string(i)}, 1,
                  StyleLabel::kAnalogous});
  }
  c.add_outfit({"b0", {"c0_5", "c1_5"}, 1, StyleLabel::kTriadic});
  c.add_outfit({"n0", {"c0_6", "c1_7"}, 0, {}});
  const auto out = oversample_balance(c, 3);
  std::size_t tri = 0, ana = 0, neg = 0;
  for (const auto& o : out.outfits()) {
    if (!o.compatible()) ++neg;
    else if (o.style == StyleLabel::kTriadic) ++tri;
    else if (o.style == StyleLabel::kAnalogous) ++ana;
  }
  EXPECT_EQ(tri, 4u);
  EXPECT_EQ(ana, 4u);
  EXPECT_EQ(neg, 1u);
  EXPECT_EQ(out.outfits().size() - neg, 4u * 2u);
}

TEST(Oversample, BalancedUnchangedAndUnlabelledError) {
  auto c = grid_corpus(2, 4);
  c.add_outfit({"a", {"c0_0", "c1_0"}, 1, StyleLabel::kSame});
  c.add_outfit({"b", {"c0_1", "c1_1"}, 1, StyleLabel::kOther});
  EXPECT_EQ(oversample_balance(c, 1), c);
  auto u = grid_corpus(2, 4);
  u.add_outfit({"a", {"c0_0", "c1_0"}, 1, {}});
  EXPECT_THROW(oversample_balance(u, 1), DataError);
}

TEST(Synth, SameStyleMixAllLabelSame) {
  SynthSpec spec;
  spec.train_sets = 10;
  spec.test_sets = 0;
  spec.negative_ratio = 0.0;
  spec.style_mix = {{StyleLabel::kSame, 1.0}};
  const auto split = synth_corpus(spec, 1);
  ASSERT_EQ(split.train.outfits().size(), 10u);
  for (const auto& o : split.train.outfits()) {
    std::vector<ColorDescriptor> colors;
    for (const auto* it : split.train.resolve(o)) colors.push_back(*it->color);
    EXPECT_EQ(label_style(colors), StyleLabel::kSame);
    EXPECT_EQ(o.style, StyleLabel::kSame);
  }
}

TEST(Synth, LabelsMatchRulesForEveryStyle) {
  SynthSpec spec;
  spec.train_sets = 300;
  spec.test_sets = 50;
  spec.style_mix = {{StyleLabel::kAnalogous, 1}, {StyleLabel::kComplementary, 1}, {StyleLabel::kTriadic, 1},
                    {StyleLabel::kSame, 1},      {StyleLabel::kMonochromatic, 1}};
  for (auto mode : {NegativeMode::kAllSwap, NegativeMode::kOneSwap}) {
    spec.negative_mode = mode;
    spec.near_miss_fraction = mode == NegativeMode::kOneSwap ? 0.5 : 0.0;
    const auto split = synth_corpus(spec, 2);
    for (const auto* c : {&split.train, &split.test}) {
      for (const auto& o : c->outfits()) {
        std::vector<ColorDescriptor> colors;
        for (const auto* it : c->resolve(o)) colors.push_back(*it->color);
        const auto label = label_style(colors);
        if (o.compatible()) {
          EXPECT_EQ(o.style, label);
        } else {
          EXPECT_EQ(label, StyleLabel::kOther) << o.id;
        }
      }
    }
    EXPECT_EQ(split.train.count_label(1), 150u);
    EXPECT_EQ(split.train.count_label(0), 150u);
  }
}

TEST(Synth, SeedDeterminismAndEmpty) {
  SynthSpec spec;
  spec.train_sets = 20;
  spec.test_sets = 5;
  const auto a = synth_corpus(spec, 8), b = synth_corpus(spec, 8), d = synth_corpus(spec, 9);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, d.train);
  spec.train_sets = 0;
  spec.test_sets = 0;
  const auto e = synth_corpus(spec, 1);
  EXPECT_TRUE(e.train.outfits().empty());
  EXPECT_TRUE(e.test.outfits().empty());
}

TEST(Synth, DisjointSplit) {
  SynthSpec spec;
  spec.train_sets = 50;
  spec.test_sets = 20;
  spec.split_disjoint = true;
  const auto s = synth_corpus(spec, 3);
  EXPECT_TRUE(items_disjoint(s.train, s.test));
  EXPECT_TRUE(s.train.split_disjoint());
}

TEST(Synth, InfeasibleSpec) {
  SynthSpec spec;
  spec.style_mix = {{StyleLabel::kTriadic, 1.0}};
  spec.min_set_size = 2;
  spec.max_set_size = 2;
  EXPECT_THROW(synth_corpus(spec, 1), DataError);
  spec = {};
  spec.style_mix = {};
  EXPECT_THROW(synth_corpus(spec, 1), DataError);
}

TEST(Synth, ImbalancedMixOnDemand) {
  SynthSpec spec;
  spec.train_sets = 302;
  spec.test_sets = 0;
  spec.style_mix = {{StyleLabel::kAnalogous, 150}, {StyleLabel::kTriadic, 1}};
  const auto s = synth_corpus(spec, 5);
  std::size_t ana = 0, tri = 0;
  for (const auto& o : s.train.outfits()) {
    if (o.style == StyleLabel::kAnalogous) ++ana;
    if (o.style == StyleLabel::kTriadic) ++tri;
  }
  EXPECT_GT(ana, 50 * std::max<std::size_t>(tri, 1));
}

TEST(Synth, SpecJsonRoundTrip) {
  SynthSpec spec;
  spec.noise = 0.125;
  spec.negative_mode = NegativeMode::kOneSwap;
  spec.style_mix = {{StyleLabel::kTriadic, 2.0}};
  spec.rules.cluster_tol_deg = 12.0;
  const auto j = synth_spec_to_json(spec);
  EXPECT_EQ(synth_spec_to_json(synth_spec_from_json(j)), j);
  auto bad = j;
  bad["colour"] = 1;
  EXPECT_THROW(synth_spec_from_json(bad), DataError);
  EXPECT_THROW(parse_negative_mode("two-swap"), DataError);
}

TEST(ClusterCorpus, ShapeAndDisjoint) {
  ClusterSpec spec;
  const auto s = synth_cluster_corpus(spec, 1);
  EXPECT_EQ(s.train.outfits().size(), spec.train_sets);
  EXPECT_EQ(s.test.outfits().size(), spec.test_sets);
  EXPECT_TRUE(items_disjoint(s.train, s.test));
}
