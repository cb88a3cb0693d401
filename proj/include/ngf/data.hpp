#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "ngf/corpus.hpp"
#include "ngf/styles.hpp"

namespace ngf {

// ---------------------------------------------------------------------------
// Negative outfits

enum class NegativeMode { kAllSwap, kOneSwap };

std::string_view to_string(NegativeMode mode);
/// "all-swap" or "one-swap"; throws DataError otherwise.
NegativeMode parse_negative_mode(std::string_view name);

/// Replaces every item (all-swap) or one uniformly chosen item (one-swap) of
/// `positive` with a uniformly sampled item of the same category that does
/// not belong to `positive`. The result has label 0, no style and id
/// `<positive.id>-neg`. Throws DataError when a replacement pool is empty.
Outfit generate_negative_outfit(const Outfit& positive, const Corpus& corpus, std::uint64_t seed,
                                NegativeMode mode = NegativeMode::kAllSwap);

// ---------------------------------------------------------------------------
// Fill-in-the-blank

struct FITBQuestion {
  std::string outfit_id;
  std::string category;
  std::vector<std::string> given_items;
  std::array<std::string, 4> candidates;
  std::size_t answer_index = 0;

  const std::string& answer() const { return candidates[answer_index]; }
};

/// Holds out one uniformly chosen item of a compatible outfit (k >= 3),
/// draws three distractors of the same category from outside the outfit and
/// places the truth at a uniform position. Throws DataError otherwise.
FITBQuestion generate_fitb(const Outfit& outfit, const Corpus& corpus, std::uint64_t seed);

/// One question per eligible compatible outfit, in outfit order. Outfits that
/// are too short or lack distractors are skipped.
std::vector<FITBQuestion> generate_fitb_questions(const Corpus& corpus, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Style splitting

struct StyleSplit {
  std::array<std::size_t, kNumStyles> counts{};
  std::vector<std::pair<std::string, StyleLabel>> labels;  // (outfit id, label) for compatible outfits
};

/// Labels every compatible outfit from its items' colors. Throws DataError
/// naming the first item without a color.
StyleSplit split_corpus_by_style(const Corpus& corpus, const StyleRuleConfig& cfg = {});

/// Copy of `corpus` whose compatible outfits carry the labels of `split`.
Corpus apply_style_labels(const Corpus& corpus, const StyleSplit& split);

// ---------------------------------------------------------------------------
// Oversampling balancer

/// Duplicates minority-style compatible outfits (ids suffixed `#dup<k>`)
/// until every non-empty style has as many as the largest one. Throws
/// DataError when no compatible outfit carries a style.
Corpus oversample_balance(const Corpus& corpus, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic corpora

/// Color-harmony corpus. Each item gets a dominant color, either chromatic
/// (uniform hue, saturation 0.8, value 0.7, small jitter) or achromatic
/// (saturation below 0.08, value near 0.95, 0.5 or 0.08). Its embedding is a
/// category prototype plus a fixed random linear image of
/// (s cos h, s sin h, v - 1/2) plus Gaussian noise, so compatibility is a
/// property of relative hue. Compatible outfits are assembled from hue
/// windows matching a target style and verified with label_style;
/// incompatible ones are negatives of the positives (negative_mode or near
/// misses) resampled until their colors label as "other". Throws DataError
/// when no such negative can be found.
struct SynthSpec {
  std::vector<std::string> categories = {"top", "bottom", "shoes", "bag", "outerwear", "hat"};
  std::size_t items_per_category = 120;
  std::size_t dim = 32;
  std::size_t train_sets = 1000;
  std::size_t test_sets = 200;
  std::size_t min_set_size = 3;
  std::size_t max_set_size = 5;
  double negative_ratio = 1.0;
  std::map<StyleLabel, double> style_mix = {{StyleLabel::kAnalogous, 1.0}};
  double noise = 0.3;
  bool split_disjoint = false;
  double achromatic_fraction = 0.2;
  double color_scale = 1.0;
  NegativeMode negative_mode = NegativeMode::kAllSwap;
  /// Share of negatives built by moving one chromatic item 20 to 90 degrees
  /// in hue instead of by negative_mode.
  double near_miss_fraction = 0.0;
  StyleRuleConfig rules;
};

/// Keys mirror the field names; style_mix is an object keyed by style name.
/// Unknown keys are rejected with DataError.
SynthSpec synth_spec_from_json(const nlohmann::json& j);
nlohmann::json synth_spec_to_json(const SynthSpec& spec);

struct CorpusSplit {
  Corpus train;
  Corpus test;
};

/// Throws DataError when the spec cannot be realised (for instance triadic
/// sets with max_set_size < 3).
CorpusSplit synth_corpus(const SynthSpec& spec, std::uint64_t seed);

/// Metric-learning corpus: items belong to one of `clusters` latent groups
/// and one category. Raw features are cluster prototype + (larger) category
/// prototype + noise, so same-cluster cross-category pairs start out far
/// apart. Each compatible outfit takes one item per category from a single
/// cluster. Train and test use disjoint item halves. Items carry no color.
struct ClusterSpec {
  std::size_t clusters = 3;
  std::size_t categories = 3;
  std::size_t items_per_group = 20;  // per (cluster, category)
  std::size_t dim = 16;
  std::size_t train_sets = 300;
  std::size_t test_sets = 100;
  double cluster_scale = 1.0;
  double category_scale = 3.0;
  double noise = 0.3;
};

CorpusSplit synth_cluster_corpus(const ClusterSpec& spec, std::uint64_t seed);

}  // namespace ngf
