#include <gtest/gtest.h>

#include <cmath>

#include "ngf/data.hpp"
#include "ngf/error.hpp"
#include "ngf/metriclearn.hpp"
#include "ngf/random.hpp"
#include "support.hpp"

using namespace ngf;

TEST(PairDistance, Examples) {
  const std::vector<double> a{0, 0}, b{3, 4};
  EXPECT_EQ(pair_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(pair_distance(a, b), 5.0);
  EXPECT_EQ(pair_distance(a, b), pair_distance(b, a));
  EXPECT_THROW(pair_distance(a, std::vector<double>{1, 2, 3}), ContractError);
}

TEST(PairDistance, MetricAxioms) {
  Rng rng(9);
  for (int t = 0; t < 500; ++t) {
    auto v = test::random_rows(rng, 3, 1 + uniform_index(rng, 8));
    const double ab = pair_distance(v[0], v[1]), bc = pair_distance(v[1], v[2]), ac = pair_distance(v[0], v[2]);
    EXPECT_GE(ab, 0.0);
    EXPECT_EQ(pair_distance(v[0], v[0]), 0.0);
    EXPECT_EQ(ab, pair_distance(v[1], v[0]));
    EXPECT_LE(ac, ab + bc + 1e-12);
  }
}

TEST(CombinedNegative, Examples) {
  TripletDistances d{0.0, 2.0, 4.0};
  EXPECT_DOUBLE_EQ(combined_negative(d, {0.5, 0.3}), 3.0);
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    TripletDistances r{0.0, uniform(rng, 0, 10), uniform(rng, 0, 10)};
    EXPECT_EQ(combined_negative(r, {1.0, 0.3}), r.d_abs_neg);
    EXPECT_EQ(combined_negative(r, {0.0, 0.3}), r.d_re_neg);
  }
}

TEST(CombinedNegative, MonotoneInEachArgument) {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    TripletConfig cfg{uniform01(rng), 0.3};
    TripletDistances d{0.0, uniform(rng, 0, 5), uniform(rng, 0, 5)};
    auto up_abs = d, up_re = d;
    up_abs.d_abs_neg += uniform(rng, 0, 1);
    up_re.d_re_neg += uniform(rng, 0, 1);
    EXPECT_GE(combined_negative(up_abs, cfg), combined_negative(d, cfg));
    EXPECT_GE(combined_negative(up_re, cfg), combined_negative(d, cfg));
  }
}

TEST(TripletLoss, Examples) {
  const TripletConfig cfg{1.0, 0.3};
  EXPECT_EQ(triplet_loss({1.0, 3.0, 3.0}, cfg), 0.0);
  EXPECT_NEAR(triplet_loss({3.0, 1.0, 1.0}, cfg), 2.3, 1e-12);
  EXPECT_NEAR(triplet_loss({2.0, 2.0, 2.0}, cfg), 0.3, 1e-12);
}

TEST(TripletLoss, NonNegativeAndZeroBeyondMargin) {
  Rng rng(8);
  for (int t = 0; t < 500; ++t) {
    TripletConfig cfg{uniform01(rng), uniform(rng, 0.01, 1.0)};
    TripletDistances d{uniform(rng, 0, 5), uniform(rng, 0, 5), uniform(rng, 0, 5)};
    const double l = triplet_loss(d, cfg);
    EXPECT_GE(l, 0.0);
    if (combined_negative(d, cfg) > d.d_pos + cfg.margin) EXPECT_EQ(l, 0.0);
  }
}

TEST(TripletConfig, Validation) {
  EXPECT_THROW((TripletConfig{1.5, 0.3}.validate()), ContractError);
  EXPECT_THROW((TripletConfig{0.5, 0.0}.validate()), ContractError);
}

namespace {

ItemRecord item(std::string id, std::string cat, double x) { return {std::move(id), std::move(cat), {x, 0.0}, {}}; }

}  // namespace

TEST(SampleNegatives, ForcedPools) {
  Corpus c(2);
  c.add_item(item("top1", "top", 0));
  c.add_item(item("top2", "top", 1));
  for (int k = 1; k <= 3; ++k) c.add_item(item("shoe" + std::to_string(k), "shoe", k));
  c.add_outfit({"o1", {"top1", "shoe1"}, 1, {}});
  c.add_outfit({"o2", {"top1", "shoe2"}, 1, {}});
  c.add_outfit({"o3", {"top2", "shoe3"}, 1, {}});
  const CooccurrenceIndex cooc(c);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = sample_negatives(c.item("top1"), c.item("shoe1"), c, cooc, seed);
    EXPECT_EQ(s.abs_neg->id, "top2");
    EXPECT_EQ(s.rel_neg->id, "shoe3");
  }
}

TEST(SampleNegatives, EmptyPoolsNamed) {
  Corpus c(2);
  c.add_item(item("top1", "top", 0));
  c.add_item(item("shoe1", "shoe", 1));
  c.add_outfit({"o1", {"top1", "shoe1"}, 1, {}});
  const CooccurrenceIndex cooc(c);
  try {
    sample_negatives(c.item("top1"), c.item("shoe1"), c, cooc, 1);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("absolute"), std::string::npos);
  }
  c.add_item(item("top2", "top", 2));
  try {
    sample_negatives(c.item("top1"), c.item("shoe1"), c, cooc, 1);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("relative"), std::string::npos);
  }
}

TEST(SampleNegatives, DeterministicReplayAndPoolMembership) {
  ClusterSpec spec;
  const auto split = synth_cluster_corpus(spec, 3);
  const CooccurrenceIndex cooc(split.train);
  const auto a = build_triplets(split.train, cooc, 17);
  const auto b = build_triplets(split.train, cooc, 17);
  ASSERT_FALSE(a.empty());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].abs_neg, b[i].abs_neg);
    EXPECT_EQ(a[i].rel_neg, b[i].rel_neg);
    EXPECT_EQ(a[i].abs_neg->category, a[i].anchor->category);
    EXPECT_NE(a[i].abs_neg, a[i].anchor);
    EXPECT_EQ(a[i].rel_neg->category, a[i].positive->category);
    EXPECT_FALSE(cooc.cooccur(a[i].anchor->id, a[i].rel_neg->id));
  }
  EXPECT_EQ(build_triplets(split.train, cooc, 17, 10).size(), 10u);
}

TEST(EmbeddingTransform, StartsNearIdentity) {
  const auto t = EmbeddingTransform::init(5, 1);
  Rng rng(2);
  auto x = test::random_rows(rng, 1, 5)[0];
  const auto y = t.apply(x);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(y[i], x[i], 0.1);
}

TEST(TrainEmbedding, ZeroLearningRateFreezes) {
  ClusterSpec spec;
  spec.train_sets = 40;
  const auto split = synth_cluster_corpus(spec, 5);
  EmbedTrainConfig cfg;
  cfg.adam.lr = 0.0;
  cfg.epochs = 3;
  const auto res = train_embedding(split.train, cfg);
  EXPECT_EQ(res.transform.params, EmbeddingTransform::init(spec.dim, derive_seed(cfg.seed, 2)).params);
  for (double l : res.epoch_loss) EXPECT_EQ(l, res.initial_loss);
}

TEST(TrainEmbedding, SeparableCorpusDrivesLossDown) {
  ClusterSpec spec;
  spec.train_sets = 60;
  spec.noise = 0.05;
  spec.category_scale = 1.0;
  const auto split = synth_cluster_corpus(spec, 7);
  EmbedTrainConfig cfg;
  cfg.adam.lr = 1e-2;
  cfg.epochs = 60;
  const auto res = train_embedding(split.train, cfg);
  EXPECT_LT(res.epoch_loss.back(), 0.05);
  EXPECT_LT(res.epoch_loss.back(), res.initial_loss);
}

TEST(TrainEmbedding, NoTripletsIsDataError) {
  Corpus c(2);
  c.add_item(item("a", "x", 0));
  c.add_item(item("b", "y", 0));
  EXPECT_THROW(train_embedding(c, {}), DataError);
}
