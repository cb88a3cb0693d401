#include "ngf/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <unordered_set>

#include "ngf/error.hpp"
#include "ngf/random.hpp"

namespace ngf {

using nlohmann::json;

namespace {

std::vector<const ItemRecord*> replacement_pool(const Corpus& corpus, const std::string& category,
                                                const std::unordered_set<std::string>& exclude) {
  std::vector<const ItemRecord*> pool;
  for (const auto* it : corpus.items_of(category)) {
    if (!exclude.count(it->id)) pool.push_back(it);
  }
  return pool;
}

}  // namespace

Outfit generate_negative_outfit(const Outfit& positive, const Corpus& corpus, std::uint64_t seed, NegativeMode mode) {
  Rng rng(seed);
  const std::unordered_set<std::string> members(positive.items.begin(), positive.items.end());
  Outfit neg;
  neg.id = positive.id + "-neg";
  neg.label = 0;
  neg.items = positive.items;
  auto replace = [&](std::size_t pos) {
    const auto& cat = corpus.item(positive.items[pos]).category;
    auto pool = replacement_pool(corpus, cat, members);
    if (pool.empty()) {
      throw DataError("no replacement item of category '" + cat + "' for outfit '" + positive.id + "'");
    }
    neg.items[pos] = pool[uniform_index(rng, pool.size())]->id;
  };
  if (mode == NegativeMode::kAllSwap) {
    for (std::size_t i = 0; i < neg.items.size(); ++i) replace(i);
  } else {
    replace(uniform_index(rng, neg.items.size()));
  }
  return neg;
}

FITBQuestion generate_fitb(const Outfit& outfit, const Corpus& corpus, std::uint64_t seed) {
  if (!outfit.compatible()) throw DataError("FITB source outfit '" + outfit.id + "' is not compatible");
  if (outfit.items.size() < 3) throw DataError("FITB source outfit '" + outfit.id + "' has fewer than 3 items");
  Rng rng(seed);
  const std::size_t held = uniform_index(rng, outfit.items.size());
  const auto& truth = corpus.item(outfit.items[held]);
  const std::unordered_set<std::string> members(outfit.items.begin(), outfit.items.end());
  auto pool = replacement_pool(corpus, truth.category, members);
  if (pool.size() < 3) {
    throw DataError("outfit '" + outfit.id + "': only " + std::to_string(pool.size()) + " distractors of category '" +
                    truth.category + "'");
  }
  for (std::size_t i = 0; i < 3; ++i) std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);

  FITBQuestion q;
  q.outfit_id = outfit.id;
  q.category = truth.category;
  for (std::size_t i = 0; i < outfit.items.size(); ++i) {
    if (i != held) q.given_items.push_back(outfit.items[i]);
  }
  q.answer_index = uniform_index(rng, 4);
  std::size_t d = 0;
  for (std::size_t c = 0; c < 4; ++c) q.candidates[c] = c == q.answer_index ? truth.id : pool[d++]->id;
  return q;
}

std::vector<FITBQuestion> generate_fitb_questions(const Corpus& corpus, std::uint64_t seed) {
  std::vector<FITBQuestion> out;
  std::uint64_t k = 0;
  for (const auto& o : corpus.outfits()) {
    ++k;
    if (!o.compatible() || o.items.size() < 3) continue;
    try {
      out.push_back(generate_fitb(o, corpus, derive_seed(seed, k)));
    } catch (const DataError&) {
      // not enough distractors for this outfit
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

StyleSplit split_corpus_by_style(const Corpus& corpus, const StyleRuleConfig& cfg) {
  StyleSplit split;
  std::vector<ColorDescriptor> colors;
  for (const auto& o : corpus.outfits()) {
    if (!o.compatible()) continue;
    colors.clear();
    for (const auto* it : corpus.resolve(o)) {
      if (!it->color) throw DataError("item '" + it->id + "' has no color (outfit '" + o.id + "')");
      colors.push_back(*it->color);
    }
    const auto label = label_style(colors, cfg);
    ++split.counts[style_index(label)];
    split.labels.emplace_back(o.id, label);
  }
  return split;
}

Corpus apply_style_labels(const Corpus& corpus, const StyleSplit& split) {
  Corpus out(corpus.dim(), corpus.split_disjoint());
  for (const auto& it : corpus.items()) out.add_item(it);
  std::size_t k = 0;
  for (auto o : corpus.outfits()) {
    if (o.compatible()) {
      if (k >= split.labels.size() || split.labels[k].first != o.id) {
        throw ContractError("style split does not match corpus outfits");
      }
      o.style = split.labels[k++].second;
    }
    out.add_outfit(std::move(o));
  }
  return out;
}

Corpus oversample_balance(const Corpus& corpus, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, kNumStyles> by_style;
  for (std::size_t i = 0; i < corpus.outfits().size(); ++i) {
    const auto& o = corpus.outfits()[i];
    if (o.compatible() && o.style) by_style[style_index(*o.style)].push_back(i);
  }
  std::size_t max_count = 0;
  for (const auto& g : by_style) max_count = std::max(max_count, g.size());
  if (max_count == 0) throw DataError("oversample_balance: no style-labelled compatible outfits");

  Corpus out(corpus.dim(), corpus.split_disjoint());
  for (const auto& it : corpus.items()) out.add_item(it);
  for (const auto& o : corpus.outfits()) out.add_outfit(o);
  Rng rng(seed);
  for (auto& group : by_style) {
    if (group.empty() || group.size() == max_count) continue;
    auto order = group;
    shuffle(order, rng);
    for (std::size_t k = 0; k < max_count - group.size(); ++k) {
      Outfit dup = corpus.outfits()[order[k % order.size()]];
      dup.id += "#dup" + std::to_string(k);
      out.add_outfit(std::move(dup));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic color-harmony corpus

namespace {

template <class T>
T spec_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("synth spec: field '") + key + "' has the wrong type");
  }
}

// Hue window an outfit slot must draw from.
struct Slot {
  bool chromatic = true;
  double center = 0.0;
  double half_width = 180.0;
};

// One slot per item. Every cluster of the style is hit at least once.
std::vector<Slot> style_slots(StyleLabel style, std::size_t k, Rng& rng) {
  const double b = uniform(rng, 0.0, 360.0);
  std::vector<double> centers;
  double width = 7.0;
  switch (style) {
    case StyleLabel::kSame: centers = {b}; width = 2.0; break;
    case StyleLabel::kAnalogous: centers = {b}; width = 25.0; break;
    case StyleLabel::kComplementary: centers = {b, b + 180.0}; break;
    case StyleLabel::kTriadic: centers = {b, b + 120.0, b + 240.0}; break;
    case StyleLabel::kMonochromatic: return std::vector<Slot>(k, Slot{false, 0.0, 180.0});
    case StyleLabel::kOther: return std::vector<Slot>(k, Slot{true, 0.0, 180.0});
  }
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < k; ++i) {
    const double c = i < centers.size() ? centers[i] : centers[uniform_index(rng, centers.size())];
    slots.push_back({true, std::fmod(c, 360.0), width});
  }
  shuffle(slots, rng);
  return slots;
}

class HarmonyGenerator {
 public:
  HarmonyGenerator(const SynthSpec& spec, std::uint64_t seed) : spec_(spec), rng_(seed) {
    if (spec.categories.size() < 2) throw DataError("synth spec: need at least two categories");
    if (spec.min_set_size < 2 || spec.min_set_size > spec.max_set_size) {
      throw DataError("synth spec: need 2 <= min_set_size <= max_set_size");
    }
    if (spec.max_set_size > spec.categories.size()) {
      throw DataError("synth spec: max_set_size exceeds the number of categories");
    }
    const std::size_t min_items = spec.split_disjoint ? 8 : 4;
    if (spec.items_per_category < min_items) {
      throw DataError("synth spec: items_per_category must be at least " + std::to_string(min_items));
    }
    if (spec.dim == 0) throw DataError("synth spec: dim must be positive");
    if (spec.noise < 0.0) throw DataError("synth spec: noise must be nonnegative");
    if (spec.negative_ratio < 0.0) throw DataError("synth spec: negative_ratio must be nonnegative");
    if (!(spec.near_miss_fraction >= 0.0 && spec.near_miss_fraction <= 1.0)) {
      throw DataError("synth spec: near_miss_fraction must lie in [0, 1]");
    }
    if (!(spec.achromatic_fraction >= 0.0 && spec.achromatic_fraction <= 1.0)) {
      throw DataError("synth spec: achromatic_fraction must lie in [0, 1]");
    }
    double total = 0.0;
    for (const auto& [style, w] : spec.style_mix) {
      if (w < 0.0) throw DataError("synth spec: negative style weight");
      if (w > 0.0 && style == StyleLabel::kTriadic && spec.max_set_size < 3) {
        throw DataError("synth spec: triadic outfits need max_set_size >= 3");
      }
      total += w;
    }
    if (!(total > 0.0) && (spec.train_sets + spec.test_sets) > 0) {
      throw DataError("synth spec: style_mix has no positive weight");
    }
    make_items();
  }

  CorpusSplit run() {
    CorpusSplit out{Corpus(spec_.dim, spec_.split_disjoint), Corpus(spec_.dim, spec_.split_disjoint)};
    for (int half = 0; half < 2; ++half) {
      auto& c = half == 0 ? out.train : out.test;
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (!spec_.split_disjoint || half_of_[i] == half) c.add_item(items_[i]);
      }
    }
    build_split(out.train, 0, "train", spec_.train_sets);
    build_split(out.test, 1, "test", spec_.test_sets);
    return out;
  }

 private:
  ColorDescriptor draw_color(bool chromatic) {
    if (chromatic) {
      return make_color(uniform(rng_, 0.0, 360.0), 0.8 + uniform(rng_, -0.04, 0.04), 0.7 + uniform(rng_, -0.04, 0.04));
    }
    static constexpr double kVals[3] = {0.95, 0.5, 0.08};
    return make_color(uniform(rng_, 0.0, 360.0), uniform(rng_, 0.0, 0.08),
                      kVals[uniform_index(rng_, 3)] + uniform(rng_, -0.03, 0.03));
  }

  void make_items() {
    const std::size_t ncat = spec_.categories.size();
    std::vector<std::vector<double>> cat_proto(ncat);
    for (auto& p : cat_proto) {
      for (std::size_t d = 0; d < spec_.dim; ++d) p.push_back(normal(rng_));
    }
    // Colors enter the embedding through a fixed linear image of
    // (s cos h, s sin h, v - 1/2).
    std::vector<std::array<double, 3>> color_map(spec_.dim);
    for (auto& row : color_map) {
      for (auto& x : row) x = normal(rng_);
    }
    pools_.assign(2, std::vector<std::vector<std::size_t>>(ncat));
    const auto achromatic =
        static_cast<std::size_t>(std::llround(spec_.achromatic_fraction * static_cast<double>(spec_.items_per_category)));
    for (std::size_t c = 0; c < ncat; ++c) {
      for (std::size_t i = 0; i < spec_.items_per_category; ++i) {
        ItemRecord it;
        char buf[32];
        std::snprintf(buf, sizeof buf, "-%04zu", i);
        it.id = spec_.categories[c] + buf;
        it.category = spec_.categories[c];
        it.color = draw_color(i >= achromatic);
        const double rad = it.color->hue * std::numbers::pi / 180.0;
        const std::array<double, 3> f = {it.color->saturation * std::cos(rad), it.color->saturation * std::sin(rad),
                                         it.color->value - 0.5};
        for (std::size_t d = 0; d < spec_.dim; ++d) {
          const double color = color_map[d][0] * f[0] + color_map[d][1] * f[1] + color_map[d][2] * f[2];
          it.embedding.push_back(cat_proto[c][d] + spec_.color_scale * color + spec_.noise * normal(rng_));
        }
        const int half = spec_.split_disjoint ? static_cast<int>(i % 2) : 0;
        half_of_.push_back(half);
        pools_[half][c].push_back(items_.size());
        if (!spec_.split_disjoint) pools_[1][c].push_back(items_.size());
        items_.push_back(std::move(it));
      }
    }
  }

  std::vector<StyleLabel> style_schedule(std::size_t positives) {
    std::vector<std::pair<StyleLabel, double>> mix;
    double total = 0.0;
    for (const auto& [s, w] : spec_.style_mix) {
      if (w > 0.0) {
        mix.emplace_back(s, w);
        total += w;
      }
    }
    // Largest-remainder apportionment.
    std::vector<std::size_t> counts(mix.size());
    std::vector<std::pair<double, std::size_t>> rema;
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < mix.size(); ++k) {
      const double exact = static_cast<double>(positives) * mix[k].second / total;
      counts[k] = static_cast<std::size_t>(std::floor(exact));
      assigned += counts[k];
      rema.emplace_back(exact - std::floor(exact), k);
    }
    std::stable_sort(rema.begin(), rema.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < positives; ++k, ++assigned) ++counts[rema[k % rema.size()].second];
    std::vector<StyleLabel> schedule;
    for (std::size_t k = 0; k < mix.size(); ++k) schedule.insert(schedule.end(), counts[k], mix[k].first);
    shuffle(schedule, rng_);
    return schedule;
  }

  std::vector<ColorDescriptor> colors_of(const Corpus& c, const Outfit& o) const {
    std::vector<ColorDescriptor> colors;
    for (const auto& id : o.items) colors.push_back(*c.item(id).color);
    return colors;
  }

  bool chromatic(const ItemRecord& it) const { return it.color->saturation > spec_.rules.mono_saturation; }

  // Uniform pick among `pool` items matching `slot`; nullopt when none does.
  std::optional<std::size_t> pick(const std::vector<std::size_t>& pool, const Slot& slot) {
    std::vector<std::size_t> hits;
    for (auto idx : pool) {
      const auto& it = items_[idx];
      if (chromatic(it) != slot.chromatic) continue;
      if (slot.half_width < 180.0 && hue_distance(it.color->hue, slot.center) > slot.half_width) continue;
      hits.push_back(idx);
    }
    if (hits.empty()) return std::nullopt;
    return hits[uniform_index(rng_, hits.size())];
  }

  Outfit make_positive(const Corpus& corpus, int half, StyleLabel style, const std::string& id) {
    for (int attempt = 0; attempt < 500; ++attempt) {
      std::size_t lo = spec_.min_set_size;
      if (style == StyleLabel::kTriadic) lo = std::max<std::size_t>(lo, 3);
      const std::size_t k = lo + uniform_index(rng_, spec_.max_set_size - lo + 1);
      std::vector<std::size_t> cats(spec_.categories.size());
      for (std::size_t i = 0; i < cats.size(); ++i) cats[i] = i;
      shuffle(cats, rng_);
      cats.resize(k);
      const auto slots = style_slots(style, k, rng_);

      Outfit o;
      o.id = id;
      o.label = 1;
      o.style = style;
      bool ok = true;
      for (std::size_t i = 0; i < k && ok; ++i) {
        auto idx = pick(pools_[half][cats[i]], slots[i]);
        if (idx) {
          o.items.push_back(items_[*idx].id);
        } else {
          ok = false;
        }
      }
      if (ok && label_style(colors_of(corpus, o), spec_.rules) == style) return o;
    }
    throw DataError("synth spec: could not realise a '" + std::string(to_string(style)) + "' outfit");
  }

  // Swaps one chromatic item for a same-category item whose hue lies 20 to 90
  // degrees away from it.
  std::optional<Outfit> near_miss(const Corpus& corpus, int half, const Outfit& src) {
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < src.items.size(); ++i) {
      if (chromatic(corpus.item(src.items[i]))) slots.push_back(i);
    }
    if (slots.empty()) return std::nullopt;
    const std::size_t slot = slots[uniform_index(rng_, slots.size())];
    const auto& old = corpus.item(src.items[slot]);
    const std::unordered_set<std::string> members(src.items.begin(), src.items.end());
    std::vector<std::size_t> hits;
    for (std::size_t c = 0; c < spec_.categories.size(); ++c) {
      if (spec_.categories[c] != old.category) continue;
      for (auto idx : pools_[half][c]) {
        const auto& it = items_[idx];
        if (members.count(it.id) || !chromatic(it)) continue;
        const double d = hue_distance(it.color->hue, old.color->hue);
        if (d >= 20.0 && d <= 90.0) hits.push_back(idx);
      }
    }
    if (hits.empty()) return std::nullopt;
    Outfit neg = src;
    neg.id = src.id + "-neg";
    neg.label = 0;
    neg.style.reset();
    neg.items[slot] = items_[hits[uniform_index(rng_, hits.size())]].id;
    return neg;
  }

  void build_split(Corpus& corpus, int half, const std::string& prefix, std::size_t total) {
    const auto positives =
        static_cast<std::size_t>(std::llround(static_cast<double>(total) / (1.0 + spec_.negative_ratio)));
    const std::size_t negatives = total - std::min(total, positives);
    const auto schedule = style_schedule(std::min(total, positives));
    std::vector<Outfit> pos;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      pos.push_back(make_positive(corpus, half, schedule[i], prefix + "-pos-" + std::to_string(i)));
    }
    std::vector<Outfit> all = pos;
    for (std::size_t i = 0; i < negatives && !pos.empty(); ++i) {
      Outfit neg;
      const bool near = uniform01(rng_) < spec_.near_miss_fraction;
      bool found = false;
      // Some sources cannot yield an "other" set (one-swap of a monochromatic
      // outfit), so later attempts move on to the next positive.
      for (std::size_t attempt = 0; attempt < 200 && !found; ++attempt) {
        const auto& src = pos[(i + attempt / 8) % pos.size()];
        std::optional<Outfit> cand;
        if (near) cand = near_miss(corpus, half, src);
        neg = cand ? *cand : generate_negative_outfit(src, corpus, rng_(), spec_.negative_mode);
        found = label_style(colors_of(corpus, neg), spec_.rules) == StyleLabel::kOther;
      }
      if (!found) throw DataError("synth spec: could not build an incompatible outfit labelled 'other'");
      neg.id = prefix + "-neg-" + std::to_string(i);
      all.push_back(std::move(neg));
    }
    shuffle(all, rng_);
    for (auto& o : all) corpus.add_outfit(std::move(o));
  }

  const SynthSpec& spec_;
  Rng rng_;
  std::vector<ItemRecord> items_;
  std::vector<int> half_of_;
  // pools_[half][category] -> indices into items_
  std::vector<std::vector<std::vector<std::size_t>>> pools_;
};

}  // namespace

std::string_view to_string(NegativeMode mode) { return mode == NegativeMode::kAllSwap ? "all-swap" : "one-swap"; }

NegativeMode parse_negative_mode(std::string_view name) {
  if (name == "all-swap") return NegativeMode::kAllSwap;
  if (name == "one-swap") return NegativeMode::kOneSwap;
  throw DataError("unknown negative mode '" + std::string(name) + "' (all-swap|one-swap)");
}

SynthSpec synth_spec_from_json(const json& j) {
  static const std::set<std::string> kKeys = {"categories", "items_per_category", "dim", "train_sets", "test_sets",
                                              "min_set_size", "max_set_size", "negative_ratio", "style_mix",
                                              "noise", "split_disjoint", "rules", "achromatic_fraction",
                                              "color_scale", "negative_mode", "near_miss_fraction"};
  if (!j.is_object()) throw DataError("synth spec must be a JSON object");
  for (const auto& [k, _] : j.items()) {
    if (!kKeys.count(k)) throw DataError("synth spec: unknown key '" + k + "'");
  }
  SynthSpec s;
  s.categories = spec_field(j, "categories", s.categories);
  s.items_per_category = spec_field(j, "items_per_category", s.items_per_category);
  s.dim = spec_field(j, "dim", s.dim);
  s.train_sets = spec_field(j, "train_sets", s.train_sets);
  s.test_sets = spec_field(j, "test_sets", s.test_sets);
  s.min_set_size = spec_field(j, "min_set_size", s.min_set_size);
  s.max_set_size = spec_field(j, "max_set_size", s.max_set_size);
  s.negative_ratio = spec_field(j, "negative_ratio", s.negative_ratio);
  s.noise = spec_field(j, "noise", s.noise);
  s.split_disjoint = spec_field(j, "split_disjoint", s.split_disjoint);
  s.achromatic_fraction = spec_field(j, "achromatic_fraction", s.achromatic_fraction);
  s.color_scale = spec_field(j, "color_scale", s.color_scale);
  s.near_miss_fraction = spec_field(j, "near_miss_fraction", s.near_miss_fraction);
  if (j.contains("negative_mode")) s.negative_mode = parse_negative_mode(spec_field(j, "negative_mode", std::string()));
  if (j.contains("style_mix")) {
    if (!j["style_mix"].is_object()) throw DataError("synth spec: style_mix must be an object");
    s.style_mix.clear();
    for (const auto& [name, w] : j["style_mix"].items()) {
      if (!w.is_number()) throw DataError("synth spec: style weight for '" + name + "' is not a number");
      s.style_mix[parse_style(name)] = w.get<double>();
    }
  }
  if (j.contains("rules")) {
    const auto& r = j["rules"];
    if (!r.is_object()) throw DataError("synth spec: rules must be an object");
    static const std::set<std::string> kRuleKeys = {"same_hue_deg", "same_sv", "mono_saturation", "analogous_arc_deg",
                                                    "cluster_tol_deg"};
    for (const auto& [k, _] : r.items()) {
      if (!kRuleKeys.count(k)) throw DataError("synth spec: unknown rules key '" + k + "'");
    }
    s.rules.same_hue_deg = spec_field(r, "same_hue_deg", s.rules.same_hue_deg);
    s.rules.same_sv = spec_field(r, "same_sv", s.rules.same_sv);
    s.rules.mono_saturation = spec_field(r, "mono_saturation", s.rules.mono_saturation);
    s.rules.analogous_arc_deg = spec_field(r, "analogous_arc_deg", s.rules.analogous_arc_deg);
    s.rules.cluster_tol_deg = spec_field(r, "cluster_tol_deg", s.rules.cluster_tol_deg);
  }
  return s;
}

json synth_spec_to_json(const SynthSpec& s) {
  json mix = json::object();
  for (const auto& [style, w] : s.style_mix) mix[std::string(to_string(style))] = w;
  return {{"categories", s.categories},
          {"items_per_category", s.items_per_category},
          {"dim", s.dim},
          {"train_sets", s.train_sets},
          {"test_sets", s.test_sets},
          {"min_set_size", s.min_set_size},
          {"max_set_size", s.max_set_size},
          {"negative_ratio", s.negative_ratio},
          {"style_mix", mix},
          {"noise", s.noise},
          {"split_disjoint", s.split_disjoint},
          {"achromatic_fraction", s.achromatic_fraction},
          {"color_scale", s.color_scale},
          {"negative_mode", to_string(s.negative_mode)},
          {"near_miss_fraction", s.near_miss_fraction},
          {"rules",
           {{"same_hue_deg", s.rules.same_hue_deg},
            {"same_sv", s.rules.same_sv},
            {"mono_saturation", s.rules.mono_saturation},
            {"analogous_arc_deg", s.rules.analogous_arc_deg},
            {"cluster_tol_deg", s.rules.cluster_tol_deg}}}};
}

CorpusSplit synth_corpus(const SynthSpec& spec, std::uint64_t seed) { return HarmonyGenerator(spec, seed).run(); }

// ---------------------------------------------------------------------------
// Synthetic cluster corpus

CorpusSplit synth_cluster_corpus(const ClusterSpec& spec, std::uint64_t seed) {
  if (spec.clusters < 2 || spec.categories < 2 || spec.items_per_group < 2 || spec.dim == 0) {
    throw DataError("cluster spec: need >= 2 clusters, >= 2 categories, >= 2 items per group, dim > 0");
  }
  Rng rng(seed);
  auto proto = [&](double scale) {
    std::vector<double> p(spec.dim);
    for (auto& v : p) v = scale * normal(rng);
    return p;
  };
  std::vector<std::vector<double>> cluster_p, category_p;
  for (std::size_t k = 0; k < spec.clusters; ++k) cluster_p.push_back(proto(spec.cluster_scale));
  for (std::size_t c = 0; c < spec.categories; ++c) category_p.push_back(proto(spec.category_scale));

  CorpusSplit out{Corpus(spec.dim, true), Corpus(spec.dim, true)};
  // groups[half][cluster][category] -> item ids
  std::vector<std::vector<std::vector<std::vector<std::string>>>> groups(
      2, std::vector<std::vector<std::vector<std::string>>>(spec.clusters,
                                                            std::vector<std::vector<std::string>>(spec.categories)));
  for (std::size_t k = 0; k < spec.clusters; ++k) {
    for (std::size_t c = 0; c < spec.categories; ++c) {
      for (std::size_t i = 0; i < spec.items_per_group; ++i) {
        ItemRecord it;
        it.id = "k" + std::to_string(k) + "-c" + std::to_string(c) + "-" + std::to_string(i);
        it.category = "cat" + std::to_string(c);
        for (std::size_t d = 0; d < spec.dim; ++d) {
          it.embedding.push_back(cluster_p[k][d] + category_p[c][d] + spec.noise * normal(rng));
        }
        const int half = static_cast<int>(i % 2);
        groups[half][k][c].push_back(it.id);
        (half == 0 ? out.train : out.test).add_item(std::move(it));
      }
    }
  }
  auto fill = [&](Corpus& corpus, int half, std::size_t n, const std::string& prefix) {
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t k = uniform_index(rng, spec.clusters);
      Outfit o;
      o.id = prefix + std::to_string(s);
      for (std::size_t c = 0; c < spec.categories; ++c) {
        const auto& g = groups[half][k][c];
        o.items.push_back(g[uniform_index(rng, g.size())]);
      }
      corpus.add_outfit(std::move(o));
    }
  };
  fill(out.train, 0, spec.train_sets, "train-");
  fill(out.test, 1, spec.test_sets, "test-");
  return out;
}

}  // namespace ngf
