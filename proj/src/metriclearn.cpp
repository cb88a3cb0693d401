#include "ngf/metriclearn.hpp"

#include <algorithm>
#include <cmath>

#include "ngf/autodiff.hpp"
#include "ngf/error.hpp"
#include "ngf/random.hpp"

namespace ngf {

void TripletConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractError("triplet alpha must lie in [0, 1]");
  if (!(margin > 0.0)) throw ContractError("triplet margin must be positive");
}

double pair_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractError("pair_distance: dimensions " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double combined_negative(const TripletDistances& d, const TripletConfig& cfg) {
  if (cfg.alpha == 1.0) return d.d_abs_neg;
  if (cfg.alpha == 0.0) return d.d_re_neg;
  return cfg.alpha * d.d_abs_neg + (1.0 - cfg.alpha) * d.d_re_neg;
}

double triplet_loss(const TripletDistances& d, const TripletConfig& cfg) {
  return std::max(0.0, d.d_pos - combined_negative(d, cfg) + cfg.margin);
}

CooccurrenceIndex::CooccurrenceIndex(const Corpus& corpus) {
  for (const auto& o : corpus.outfits()) {
    if (!o.compatible()) continue;
    for (const auto& a : o.items) {
      for (const auto& b : o.items) {
        if (a != b) partners_[a].insert(b);
      }
    }
  }
}

bool CooccurrenceIndex::cooccur(const std::string& a, const std::string& b) const {
  auto it = partners_.find(a);
  return it != partners_.end() && it->second.count(b);
}

SampledNegatives sample_negatives(const ItemRecord& anchor, const ItemRecord& positive, const Corpus& corpus,
                                  const CooccurrenceIndex& cooc, std::uint64_t seed) {
  std::vector<const ItemRecord*> abs_pool, rel_pool;
  for (const auto* it : corpus.items_of(anchor.category)) {
    if (it->id != anchor.id) abs_pool.push_back(it);
  }
  for (const auto* it : corpus.items_of(positive.category)) {
    if (it->id != anchor.id && !cooc.cooccur(anchor.id, it->id)) rel_pool.push_back(it);
  }
  if (abs_pool.empty()) {
    throw DataError("absolute-negative pool empty: no other item of category '" + anchor.category + "'");
  }
  if (rel_pool.empty()) {
    throw DataError("relative-negative pool empty: every '" + positive.category + "' item co-occurs with '" +
                    anchor.id + "'");
  }
  Rng rng(seed);
  const auto* a = abs_pool[uniform_index(rng, abs_pool.size())];
  const auto* r = rel_pool[uniform_index(rng, rel_pool.size())];
  return {a, r};
}

std::vector<Triplet> build_triplets(const Corpus& corpus, const CooccurrenceIndex& cooc, std::uint64_t seed,
                                    std::size_t cap) {
  std::vector<Triplet> out;
  std::uint64_t k = 0;
  for (const auto& o : corpus.outfits()) {
    if (!o.compatible()) continue;
    const auto members = corpus.resolve(o);
    for (const auto* a : members) {
      for (const auto* p : members) {
        if (a == p) continue;
        ++k;
        try {
          auto neg = sample_negatives(*a, *p, corpus, cooc, derive_seed(seed, k));
          out.push_back({a, p, neg.abs_neg, neg.rel_neg});
        } catch (const DataError&) {
          continue;
        }
        if (cap > 0 && out.size() >= cap) return out;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Projection

EmbeddingTransform EmbeddingTransform::init(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  const double jitter = 0.01;
  std::vector<double> w1(dim * 2 * dim), w2(2 * dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < 2 * dim; ++j) {
      double base = j == i ? 1.0 : (j == i + dim ? -1.0 : 0.0);
      w1[i * 2 * dim + j] = base + jitter * normal(rng);
    }
  }
  for (std::size_t i = 0; i < 2 * dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      double base = i == j ? 1.0 : (i == j + dim ? -1.0 : 0.0);
      w2[i * dim + j] = base + jitter * normal(rng);
    }
  }
  EmbeddingTransform t;
  t.params.add("embed.0.weight", Tensor::matrix(dim, 2 * dim, std::move(w1)));
  t.params.add("embed.0.bias", Tensor::zeros({2 * dim}));
  t.params.add("embed.1.weight", Tensor::matrix(2 * dim, dim, std::move(w2)));
  t.params.add("embed.1.bias", Tensor::zeros({dim}));
  return t;
}

std::size_t EmbeddingTransform::dim() const { return params.at("embed.1.bias").size(); }

namespace {

Var project(Tape& tape, ParamStore& params, Var x) {
  auto h = relu(affine(x, tape.parameter(params.at("embed.0.weight")), tape.parameter(params.at("embed.0.bias"))));
  return affine(h, tape.parameter(params.at("embed.1.weight")), tape.parameter(params.at("embed.1.bias")));
}

Var row_distance(Var a, Var b) {
  auto d = sub(a, b);
  return sqrt_eps(reduce(mul(d, d), 1, ReduceKind::kSum), 1e-12);
}

// Mean triplet loss over `batch` recorded on `tape`.
Var batch_loss(Tape& tape, ParamStore& params, std::span<const Triplet> batch, const TripletConfig& cfg) {
  const std::size_t b = batch.size();
  const std::size_t dim = batch.front().anchor->embedding.size();
  std::vector<double> rows;
  rows.reserve(4 * b * dim);
  for (int role = 0; role < 4; ++role) {
    for (const auto& t : batch) {
      const ItemRecord* it = role == 0 ? t.anchor : role == 1 ? t.positive : role == 2 ? t.abs_neg : t.rel_neg;
      rows.insert(rows.end(), it->embedding.begin(), it->embedding.end());
    }
  }
  auto z = project(tape, params, tape.constant(Tensor::matrix(4 * b, dim, std::move(rows))));
  auto block = [&](std::size_t role) {
    RowIndex idx(b);
    for (std::size_t i = 0; i < b; ++i) idx[i] = role * b + i;
    return gather_rows(z, std::move(idx));
  };
  auto anchor = block(0);
  auto d_pos = row_distance(anchor, block(1));
  auto d_abs = row_distance(anchor, block(2));
  auto d_rel = row_distance(anchor, block(3));
  auto d_neg = add(scale(d_abs, cfg.alpha), scale(d_rel, 1.0 - cfg.alpha));
  return mean(relu(add_scalar(sub(d_pos, d_neg), cfg.margin)));
}

TripletDistances distances(const Triplet& t, const EmbeddingTransform* transform) {
  if (!transform) {
    return {pair_distance(*t.anchor, *t.positive), pair_distance(*t.anchor, *t.abs_neg),
            pair_distance(*t.anchor, *t.rel_neg)};
  }
  auto a = transform->apply(t.anchor->embedding);
  return {pair_distance(a, transform->apply(t.positive->embedding)),
          pair_distance(a, transform->apply(t.abs_neg->embedding)),
          pair_distance(a, transform->apply(t.rel_neg->embedding))};
}

double mean_loss(std::span<const Triplet> triplets, const EmbeddingTransform& transform, const TripletConfig& cfg) {
  double s = 0.0;
  for (const auto& t : triplets) s += triplet_loss(distances(t, &transform), cfg);
  return triplets.empty() ? 0.0 : s / static_cast<double>(triplets.size());
}

}  // namespace

std::vector<double> EmbeddingTransform::apply(std::span<const double> x) const {
  const auto& w1 = params.at("embed.0.weight");
  const auto& b1 = params.at("embed.0.bias");
  const auto& w2 = params.at("embed.1.weight");
  const auto& b2 = params.at("embed.1.bias");
  const std::size_t d = w1.rows(), h = w1.cols();
  if (x.size() != d) throw ContractError("embedding transform expects dimension " + std::to_string(d));
  std::vector<double> hidden(h), out(d);
  for (std::size_t j = 0; j < h; ++j) {
    double s = b1[j];
    for (std::size_t i = 0; i < d; ++i) s += x[i] * w1[i * h + j];
    hidden[j] = s > 0.0 ? s : 0.0;
  }
  for (std::size_t j = 0; j < d; ++j) {
    double s = b2[j];
    for (std::size_t i = 0; i < h; ++i) s += hidden[i] * w2[i * d + j];
    out[j] = s;
  }
  return out;
}

Corpus EmbeddingTransform::apply(const Corpus& corpus) const {
  Corpus out(corpus.dim(), corpus.split_disjoint());
  for (auto it : corpus.items()) {
    it.embedding = apply(it.embedding);
    out.add_item(std::move(it));
  }
  for (const auto& o : corpus.outfits()) out.add_outfit(o);
  return out;
}

EmbedTrainResult train_embedding(const Corpus& corpus, const EmbedTrainConfig& cfg) {
  cfg.triplet.validate();
  if (cfg.batch_size == 0) throw ContractError("batch_size must be positive");
  const bool has_pair = std::any_of(corpus.outfits().begin(), corpus.outfits().end(),
                                    [](const Outfit& o) { return o.compatible() && o.items.size() >= 2; });
  if (!has_pair) throw DataError("train_embedding: corpus has no compatible outfit with two items");
  const CooccurrenceIndex cooc(corpus);
  auto triplets = build_triplets(corpus, cooc, derive_seed(cfg.seed, 1), cfg.max_triplets_per_epoch);
  if (triplets.empty()) throw DataError("train_embedding: no valid triplet could be constructed");

  EmbedTrainResult result{EmbeddingTransform::init(corpus.dim(), derive_seed(cfg.seed, 2)), {}, 0.0};
  result.initial_loss = mean_loss(triplets, result.transform, cfg.triplet);
  Adam adam(cfg.adam);
  Rng rng(derive_seed(cfg.seed, 3));
  std::vector<std::size_t> order(triplets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<Triplet> batch;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i) {
        batch.push_back(triplets[order[i]]);
      }
      result.transform.params.zero_grad();
      Tape tape;
      auto loss = batch_loss(tape, result.transform.params, batch, cfg.triplet);
      tape.backward(loss);
      adam.step(result.transform.params);
    }
    result.epoch_loss.push_back(mean_loss(triplets, result.transform, cfg.triplet));
  }
  return result;
}

double margin_satisfaction(const Corpus& corpus, const EmbeddingTransform& transform, const TripletConfig& cfg,
                           std::uint64_t seed) {
  const CooccurrenceIndex cooc(corpus);
  const auto triplets = build_triplets(corpus, cooc, seed);
  if (triplets.empty()) throw DataError("margin_satisfaction: no triplet could be constructed");
  std::size_t ok = 0;
  for (const auto& t : triplets) {
    const auto d = distances(t, &transform);
    if (d.d_pos + cfg.margin <= combined_negative(d, cfg)) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(triplets.size());
}

double mean_triplet_loss(const Corpus& corpus, const EmbeddingTransform& transform, const TripletConfig& cfg,
                         std::uint64_t seed) {
  const CooccurrenceIndex cooc(corpus);
  return mean_loss(build_triplets(corpus, cooc, seed), transform, cfg);
}

}  // namespace ngf
