#include <gtest/gtest.h>

#include <atomic>
#include <set>

#include "ngf/collocate.hpp"
#include "ngf/error.hpp"
#include "ngf/random.hpp"

using namespace ngf;

namespace {

Corpus wardrobe(std::size_t cats, std::size_t per, std::uint64_t seed = 1) {
  Corpus c(2);
  Rng rng(seed);
  for (std::size_t k = 0; k < cats; ++k) {
    for (std::size_t i = 0; i < per; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "t%zu_%02zu", k, i);
      c.add_item({buf, "t" + std::to_string(k), {uniform01(rng), uniform01(rng)}, {}});
    }
  }
  return c;
}

NetworkOutput out(double score, StyleLabel style) {
  NetworkOutput o{score, {}};
  o.style_distribution[style_index(style)] = 1.0;
  return o;
}

struct Counting {
  std::shared_ptr<std::atomic<std::size_t>> calls = std::make_shared<std::atomic<std::size_t>>(0);
  std::shared_ptr<std::atomic<std::size_t>> evaluations = std::make_shared<std::atomic<std::size_t>>(0);
  std::function<NetworkOutput(const std::vector<const ItemRecord*>&)> f;

  SetScorer scorer() const {
    return [c = *this](std::span<const std::vector<const ItemRecord*>> sets) {
      ++*c.calls;
      std::vector<NetworkOutput> res;
      for (const auto& s : sets) {
        ++*c.evaluations;
        res.push_back(c.f(s));
      }
      return res;
    };
  }
};

// Score rises with every added item: k items -> 1 - 0.5^k.
NetworkOutput growing(const std::vector<const ItemRecord*>& s, StyleLabel style) {
  return out(1.0 - std::pow(0.5, static_cast<double>(s.size())), style);
}

}  // namespace

TEST(BestCandidate, EmptyPoolAndSingle) {
  const auto c = wardrobe(2, 3);
  Counting k{.f = [](const auto&) { return out(0.9, StyleLabel::kSame); }};
  const std::vector<const ItemRecord*> cur{&c.item("t0_00")};
  EXPECT_FALSE(best_candidate(cur, {}, k.scorer(), StyleLabel::kSame, 0.5));
  EXPECT_EQ(*k.calls, 0u);
  auto one = best_candidate(cur, {&c.item("t1_02")}, k.scorer(), StyleLabel::kSame, 0.5);
  ASSERT_TRUE(one);
  EXPECT_EQ(one->item->id, "t1_02");
  EXPECT_THROW(best_candidate({}, {&c.item("t1_02")}, k.scorer(), StyleLabel::kSame, 0.5), ContractError);
}

TEST(BestCandidate, ConstantScoreTiesToLowestId) {
  const auto c = wardrobe(2, 8);
  Counting k{.f = [](const auto&) { return out(0.6, StyleLabel::kTriadic); }};
  auto pool = c.items_of("t1");
  std::reverse(pool.begin(), pool.end());
  auto best = best_candidate({&c.item("t0_03")}, pool, k.scorer(), StyleLabel::kTriadic, 0.5);
  ASSERT_TRUE(best);
  EXPECT_EQ(best->item->id, "t1_00");
  EXPECT_EQ(best->score, 0.6);
  EXPECT_EQ(*k.calls, 1u);
  EXPECT_EQ(*k.evaluations, 8u);
}

TEST(BestCandidate, FiltersThresholdStyleAndCategory) {
  const auto c = wardrobe(3, 4);
  Counting k{.f = [](const std::vector<const ItemRecord*>& s) {
    const auto& x = *s.back();
    const int i = x.id.back() - '0';
    return out(0.2 * i + 0.15, i == 3 ? StyleLabel::kOther : StyleLabel::kAnalogous);
  }};
  std::vector<const ItemRecord*> pool = c.items_of("t1");
  pool.push_back(&c.item("t0_02"));  // category already present
  auto best = best_candidate({&c.item("t0_00")}, pool, k.scorer(), StyleLabel::kAnalogous, 0.5);
  ASSERT_TRUE(best);
  // t1_03 scores highest but is classified "other"; t1_00 and t1_01 sit below the threshold
  EXPECT_EQ(best->item->id, "t1_02");
  EXPECT_EQ(*k.evaluations, 4u);
  EXPECT_FALSE(best_candidate({&c.item("t0_00")}, pool, k.scorer(), StyleLabel::kAnalogous, 0.95));
}

TEST(Generate, AllPoolsEmptyGivesQuery) {
  const auto c = wardrobe(3, 2);
  CollocationRequest req;
  req.query = &c.item("t0_00");
  req.styles = {StyleLabel::kSame};
  req.type_order = {"t1", "t2"};
  Counting k{.f = [](const auto& s) { return growing(s, StyleLabel::kSame); }};
  const auto o = generate_outfit(req, StyleLabel::kSame, k.scorer());
  EXPECT_EQ(o.items, (std::vector<std::string>{"t0_00"}));
  EXPECT_EQ(o.skipped_types, req.type_order);
  EXPECT_EQ(o.set_score, 0.0);
}

TEST(Generate, MonotoneScorerFillsEveryType) {
  const auto c = wardrobe(5, 6);
  auto req = make_request(c, "t2_01", {StyleLabel::kComplementary});
  EXPECT_EQ(req.type_order, (std::vector<std::string>{"t0", "t1", "t3", "t4"}));
  Counting k{.f = [](const auto& s) { return growing(s, StyleLabel::kComplementary); }};
  const auto o = generate_outfit(req, StyleLabel::kComplementary, k.scorer());
  EXPECT_EQ(o.items.size(), 1 + req.type_order.size());
  EXPECT_TRUE(o.skipped_types.empty());
  EXPECT_EQ(o.items[0], "t2_01");
}

TEST(Generate, DroppingScorerGivesQuery) {
  const auto c = wardrobe(4, 5);
  auto req = make_request(c, "t0_00", {StyleLabel::kSame});
  // passes the threshold only for the very first addition, and drops after it
  Counting k{.f = [](const std::vector<const ItemRecord*>& s) {
    return out(s.size() == 2 ? 0.9 : 0.6, StyleLabel::kSame);
  }};
  req.accept_ties = true;
  auto first = generate_outfit(req, StyleLabel::kSame, k.scorer());
  EXPECT_EQ(first.items.size(), 2u);
  Counting drop{.f = [](const auto&) { return out(0.3, StyleLabel::kSame); }};
  const auto o = generate_outfit(req, StyleLabel::kSame, drop.scorer());
  EXPECT_EQ(o.items, (std::vector<std::string>{"t0_00"}));
  EXPECT_EQ(o.skipped_types.size(), 3u);
}

TEST(Generate, TiesAcceptedUnlessStrict) {
  const auto c = wardrobe(3, 3);
  auto req = make_request(c, "t0_00", {StyleLabel::kSame});
  Counting k{.f = [](const auto&) { return out(0.7, StyleLabel::kSame); }};
  EXPECT_EQ(generate_outfit(req, StyleLabel::kSame, k.scorer()).items.size(), 3u);
  req.accept_ties = false;
  EXPECT_EQ(generate_outfit(req, StyleLabel::kSame, k.scorer()).items.size(), 2u);
}

TEST(Generate, WorkBoundUnderConstantScores) {
  for (double v : {0.0, 0.5, 0.6, 1.0}) {
    const auto c = wardrobe(5, 7);
    auto req = make_request(c, "t3_03", {StyleLabel::kSame, StyleLabel::kTriadic, StyleLabel::kOther});
    Counting k{.f = [v](const auto&) { return out(v, StyleLabel::kSame); }};
    const auto res = generate_diverse(req, k.scorer());
    std::size_t pool_total = 0;
    for (const auto& t : req.type_order) pool_total += req.pools.at(t).size();
    const std::size_t ns = req.styles.size(), nt = req.type_order.size();
    EXPECT_LE(*k.evaluations, ns * pool_total + ns * nt);
    EXPECT_LE(*k.calls, ns * nt);
    EXPECT_EQ(res.outfits.size(), ns);
  }
}

TEST(Generate, MonotoneAcceptanceAndCategoryUniqueness) {
  Rng rng(77);
  for (int run = 0; run < 100; ++run) {
    const auto c = wardrobe(2 + uniform_index(rng, 5), 1 + uniform_index(rng, 6), run);
    const auto cats = c.categories();
    const auto& q = *c.items_of(cats[uniform_index(rng, cats.size())])[0];
    auto req = make_request(c, q.id, {StyleLabel::kAnalogous, StyleLabel::kTriadic});
    req.threshold = uniform(rng, 0.0, 0.6);
    const std::uint64_t salt = rng();
    // pseudo-random but deterministic per set
    Counting k{.f = [salt](const std::vector<const ItemRecord*>& s) {
      std::uint64_t h = salt;
      for (const auto* it : s) h = splitmix64(h ^ std::hash<std::string>{}(it->id));
      const double score = static_cast<double>(h >> 11) * 0x1.0p-53;
      return out(score, (h & 1) ? StyleLabel::kAnalogous : StyleLabel::kTriadic);
    }};
    const auto res = generate_diverse(req, k.scorer());
    for (const auto& [style, o] : res.outfits) {
      double last = 0.0;
      std::set<std::string> seen{q.category};
      std::vector<const ItemRecord*> set{&q};
      for (const auto& a : o.accepted) {
        EXPECT_GE(a.score, last);
        last = a.score;
        EXPECT_TRUE(seen.insert(a.category).second);
        set.push_back(&c.item(a.item_id));
        const auto check = k.f(set);
        EXPECT_EQ(check.compatibility, a.score);
        EXPECT_GT(check.compatibility, req.threshold);
        EXPECT_EQ(check.predicted_style(), style);
      }
      EXPECT_EQ(o.accepted.size() + o.skipped_types.size(), req.type_order.size());
    }
  }
}

TEST(Generate, DisjointStyleFiltersGiveDifferentOutfits) {
  const auto c = wardrobe(3, 6);
  auto req = make_request(c, "t0_00", {StyleLabel::kAnalogous, StyleLabel::kTriadic});
  // even-indexed additions read as analogous, odd ones as triadic
  Counting k{.f = [](const std::vector<const ItemRecord*>& s) {
    const int i = s.back()->id.back() - '0';
    return out(0.6 + 0.01 * static_cast<double>(s.size()), i % 2 == 0 ? StyleLabel::kAnalogous : StyleLabel::kTriadic);
  }};
  const auto res = generate_diverse(req, k.scorer());
  ASSERT_EQ(res.outfits.size(), 2u);
  const auto& a = res.outfits.at(StyleLabel::kAnalogous);
  const auto& t = res.outfits.at(StyleLabel::kTriadic);
  EXPECT_NE(a.items, t.items);
  EXPECT_EQ(a.items[1], "t1_00");
  EXPECT_EQ(t.items[1], "t1_01");
  EXPECT_EQ(generate_diverse(req, k.scorer()).outfits.at(StyleLabel::kTriadic).items, t.items);
}

TEST(Generate, PerStyleErrorsReported) {
  const auto c = wardrobe(3, 3);
  auto req = make_request(c, "t0_00", {StyleLabel::kSame, StyleLabel::kOther});
  Counting k{.f = [](const std::vector<const ItemRecord*>& s) -> NetworkOutput {
    if (s.size() > 2) throw NumericError("boom");
    return out(0.9, StyleLabel::kSame);
  }};
  // the style filter stops kOther before any second addition, kSame reaches it and fails
  const auto res = generate_diverse(req, k.scorer());
  EXPECT_EQ(res.outfits.size(), 1u);
  EXPECT_EQ(res.errors.size(), 1u);
  EXPECT_TRUE(res.errors.count(StyleLabel::kSame));
  const auto j = to_json(res);
  EXPECT_EQ(j["errors"]["same"], "boom");
}

TEST(Request, Validation) {
  const auto c = wardrobe(3, 2);
  EXPECT_THROW(make_request(c, "nope", {StyleLabel::kSame}), DataError);
  EXPECT_THROW(make_request(c, "t0_00", {StyleLabel::kSame}, {"t0"}), ContractError);
  EXPECT_THROW(make_request(c, "t0_00", {StyleLabel::kSame}, {"t1", "t1"}), ContractError);
  EXPECT_THROW(make_request(c, "t0_00", {StyleLabel::kSame, StyleLabel::kSame}), ContractError);
  auto req = make_request(c, "t0_00", {StyleLabel::kSame});
  req.style_pools[{StyleLabel::kSame, "t1"}] = {};
  EXPECT_TRUE(req.pool(StyleLabel::kSame, "t1").empty());
  EXPECT_EQ(req.pool(StyleLabel::kOther, "t1").size(), 2u);
}
