#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "ngf/styles.hpp"

namespace ngf {

struct ItemRecord {
  std::string id;
  std::string category;
  std::vector<double> embedding;
  std::optional<ColorDescriptor> color;

  friend bool operator==(const ItemRecord&, const ItemRecord&) = default;
};

struct Outfit {
  std::string id;
  std::vector<std::string> items;
  int label = 1;  // 1 compatible, 0 incompatible
  std::optional<StyleLabel> style;

  bool compatible() const { return label == 1; }
  friend bool operator==(const Outfit&, const Outfit&) = default;
};

/// Item table plus labelled outfits. Every mutation re-checks the
/// invariants: uniform embedding dimension, finite embeddings, unique ids,
/// resolvable outfit references, distinct items per outfit and at most one
/// item per category inside a compatible outfit.
class Corpus {
 public:
  explicit Corpus(std::size_t dim = 0, bool split_disjoint = false) : dim_(dim), split_disjoint_(split_disjoint) {}

  std::size_t dim() const noexcept { return dim_; }
  bool split_disjoint() const noexcept { return split_disjoint_; }
  void set_split_disjoint(bool flag) { split_disjoint_ = flag; }

  void add_item(ItemRecord item);
  void add_outfit(Outfit outfit);

  const std::vector<ItemRecord>& items() const noexcept { return items_; }
  const std::vector<Outfit>& outfits() const noexcept { return outfits_; }

  const ItemRecord* find_item(std::string_view id) const;
  const ItemRecord& item(std::string_view id) const;
  std::vector<const ItemRecord*> resolve(const Outfit& outfit) const;

  /// Sorted category names.
  std::vector<std::string> categories() const;
  /// Items of one category, in item-table order.
  std::vector<const ItemRecord*> items_of(std::string_view category) const;

  std::size_t count_label(int label) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.dim_ == b.dim_ && a.split_disjoint_ == b.split_disjoint_ && a.items_ == b.items_ &&
           a.outfits_ == b.outfits_;
  }

 private:
  std::size_t dim_;
  bool split_disjoint_;
  std::vector<ItemRecord> items_;
  std::vector<Outfit> outfits_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Corpus JSON:
///   {"dim": int,
///    "items": [{"id": str, "category": str, "embedding": [float x dim],
///               "color": {"h": float, "s": float, "v": float}}],
///    "outfits": [{"id": str, "items": [str], "label": 0|1, "style": str|null}],
///    "split_disjoint": bool}
/// "color" may be omitted or null; unknown keys are rejected.
nlohmann::json corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& j);
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

/// True when no item id appears in both corpora.
bool items_disjoint(const Corpus& a, const Corpus& b);

}  // namespace ngf
