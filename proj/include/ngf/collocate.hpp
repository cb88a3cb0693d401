#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ngf/corpus.hpp"
#include "ngf/graphfilter.hpp"
#include "ngf/styles.hpp"

namespace ngf {

struct CollocationRequest {
  const ItemRecord* query = nullptr;
  std::vector<StyleLabel> styles;
  std::vector<std::string> type_order;
  /// Candidates per category, shared by every style.
  std::map<std::string, std::vector<const ItemRecord*>> pools;
  /// Optional per-style replacement of a category pool.
  std::map<std::pair<StyleLabel, std::string>, std::vector<const ItemRecord*>> style_pools;
  double threshold = 0.5;
  /// Accept a candidate whose score equals the current set score. When false
  /// the candidate must strictly improve it.
  bool accept_ties = true;

  const std::vector<const ItemRecord*>& pool(StyleLabel style, const std::string& category) const;
  /// Throws ContractError: missing query, duplicate styles or types, or the
  /// query's own category in type_order.
  void validate() const;
};

/// Request over a corpus: every item of each listed category except the
/// query. An empty `type_order` means all other categories, sorted.
CollocationRequest make_request(const Corpus& corpus, const std::string& query_id, std::vector<StyleLabel> styles,
                                std::vector<std::string> type_order = {}, double threshold = 0.5);

struct Candidate {
  const ItemRecord* item = nullptr;
  double score = 0.0;
  StyleLabel style = StyleLabel::kOther;
};

/// Scores current + x for every admissible pool item in one scorer call.
/// Items already in the set or of a category already present are skipped.
/// Keeps candidates scoring above `threshold` whose predicted style is
/// `style`, and returns the best one (ties: lowest item id).
std::optional<Candidate> best_candidate(const std::vector<const ItemRecord*>& current,
                                        const std::vector<const ItemRecord*>& pool, const SetScorer& scorer,
                                        StyleLabel style, double threshold);

struct Acceptance {
  std::string item_id;
  std::string category;
  double score = 0.0;
};

struct GeneratedOutfit {
  StyleLabel style = StyleLabel::kOther;
  std::vector<std::string> items;  // query first, then accepted items in order
  std::vector<Acceptance> accepted;
  std::vector<std::string> skipped_types;
  double set_score = 0.0;  // 0 when nothing was accepted
};

/// Greedy single pass over type_order starting from {query} with set score 0.
/// A type's best candidate is accepted when its score is at least the
/// current set score; otherwise the type is skipped.
GeneratedOutfit generate_outfit(const CollocationRequest& req, StyleLabel style, const SetScorer& scorer);

struct DiverseResult {
  std::map<StyleLabel, GeneratedOutfit> outfits;
  std::map<StyleLabel, std::string> errors;
};

/// One independent generation per requested style. A failing style is
/// recorded in `errors` and the others still run.
DiverseResult generate_diverse(const CollocationRequest& req, const SetScorer& scorer);

nlohmann::json to_json(const DiverseResult& result);

}  // namespace ngf
