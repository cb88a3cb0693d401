#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ngf/corpus.hpp"
#include "ngf/params.hpp"

namespace ngf {

struct TripletConfig {
  double alpha = 0.5;   // weight of the absolute negative
  double margin = 0.3;

  void validate() const;
};

struct TripletDistances {
  double d_pos = 0.0;
  double d_abs_neg = 0.0;
  double d_re_neg = 0.0;
};

/// Euclidean distance between two embeddings. Throws ContractError on a
/// dimension mismatch.
double pair_distance(std::span<const double> a, std::span<const double> b);
inline double pair_distance(const ItemRecord& a, const ItemRecord& b) { return pair_distance(a.embedding, b.embedding); }

/// alpha * d_abs_neg + (1 - alpha) * d_re_neg.
double combined_negative(const TripletDistances& d, const TripletConfig& cfg);
/// max(0, d_pos - d_neg + margin).
double triplet_loss(const TripletDistances& d, const TripletConfig& cfg);

/// Which items co-occur with which inside compatible outfits.
class CooccurrenceIndex {
 public:
  explicit CooccurrenceIndex(const Corpus& corpus);
  bool cooccur(const std::string& a, const std::string& b) const;

 private:
  std::unordered_map<std::string, std::unordered_set<std::string>> partners_;
};

struct SampledNegatives {
  const ItemRecord* abs_neg;
  const ItemRecord* rel_neg;
};

/// Absolute negative: uniform over the anchor's category minus the anchor.
/// Relative negative: uniform over the positive's category, restricted to
/// items that share no compatible outfit with the anchor. Throws DataError
/// naming the empty pool.
SampledNegatives sample_negatives(const ItemRecord& anchor, const ItemRecord& positive, const Corpus& corpus,
                                  const CooccurrenceIndex& cooc, std::uint64_t seed);

struct Triplet {
  const ItemRecord* anchor;
  const ItemRecord* positive;
  const ItemRecord* abs_neg;
  const ItemRecord* rel_neg;
};

/// One triplet per ordered (anchor, positive) pair inside every compatible
/// outfit, negatives resampled from `seed`. Stops after `cap` triplets when
/// cap > 0. Pairs whose negative pools are empty are skipped.
std::vector<Triplet> build_triplets(const Corpus& corpus, const CooccurrenceIndex& cooc, std::uint64_t seed,
                                    std::size_t cap = 0);

/// Two-layer projection D -> D through a hidden layer of width 2D:
/// relu(x W1 + b1) W2 + b2. Initialised at W1 = [I, -I], W2 = [I; -I] plus
/// small noise, which is the identity map up to that noise.
struct EmbeddingTransform {
  ParamStore params;

  static EmbeddingTransform init(std::size_t dim, std::uint64_t seed);
  std::size_t dim() const;
  std::vector<double> apply(std::span<const double> x) const;
  /// Copy of `corpus` with every embedding passed through the transform.
  Corpus apply(const Corpus& corpus) const;
};

struct EmbedTrainConfig {
  TripletConfig triplet;
  AdamConfig adam{5e-5};
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  std::size_t max_triplets_per_epoch = 0;
  std::uint64_t seed = 1;
};

struct EmbedTrainResult {
  EmbeddingTransform transform;
  /// Mean triplet loss over the (fixed) training triplets after each epoch.
  std::vector<double> epoch_loss;
  double initial_loss = 0.0;
};

/// Minimises mean triplet loss with Adam over mini-batches. Triplets are
/// sampled once from cfg.seed and revisited in a reshuffled order every
/// epoch. Throws DataError when the corpus yields no triplet.
EmbedTrainResult train_embedding(const Corpus& corpus, const EmbedTrainConfig& cfg);

/// Fraction of triplets built from `corpus` (seeded) with d_pos + margin <=
/// d_neg under `transform`.
double margin_satisfaction(const Corpus& corpus, const EmbeddingTransform& transform, const TripletConfig& cfg,
                           std::uint64_t seed);
double mean_triplet_loss(const Corpus& corpus, const EmbeddingTransform& transform, const TripletConfig& cfg,
                         std::uint64_t seed);

}  // namespace ngf
