#include "ngf/collocate.hpp"

#include <algorithm>
#include <set>

#include "ngf/error.hpp"

namespace ngf {

const std::vector<const ItemRecord*>& CollocationRequest::pool(StyleLabel style, const std::string& category) const {
  static const std::vector<const ItemRecord*> kEmpty;
  if (auto it = style_pools.find({style, category}); it != style_pools.end()) return it->second;
  if (auto it = pools.find(category); it != pools.end()) return it->second;
  return kEmpty;
}

void CollocationRequest::validate() const {
  if (!query) throw ContractError("collocation request has no query item");
  std::set<StyleLabel> seen_styles(styles.begin(), styles.end());
  if (seen_styles.size() != styles.size()) throw ContractError("collocation request lists a style twice");
  std::set<std::string> seen_types;
  for (const auto& t : type_order) {
    if (t == query->category) throw ContractError("type_order contains the query's own category '" + t + "'");
    if (!seen_types.insert(t).second) throw ContractError("type_order lists '" + t + "' twice");
  }
}

CollocationRequest make_request(const Corpus& corpus, const std::string& query_id, std::vector<StyleLabel> styles,
                                std::vector<std::string> type_order, double threshold) {
  const auto* query = corpus.find_item(query_id);
  if (!query) throw DataError("query item '" + query_id + "' is not in the corpus");
  CollocationRequest req;
  req.query = query;
  req.styles = std::move(styles);
  req.threshold = threshold;
  if (type_order.empty()) {
    for (const auto& c : corpus.categories()) {
      if (c != query->category) type_order.push_back(c);
    }
  }
  req.type_order = std::move(type_order);
  for (const auto& t : req.type_order) {
    auto& pool = req.pools[t];
    for (const auto* it : corpus.items_of(t)) {
      if (it != query) pool.push_back(it);
    }
  }
  req.validate();
  return req;
}

std::optional<Candidate> best_candidate(const std::vector<const ItemRecord*>& current,
                                        const std::vector<const ItemRecord*>& pool, const SetScorer& scorer,
                                        StyleLabel style, double threshold) {
  if (current.empty()) throw ContractError("best_candidate needs a nonempty current set");
  std::set<std::string> ids, categories;
  for (const auto* it : current) {
    ids.insert(it->id);
    categories.insert(it->category);
  }
  std::vector<const ItemRecord*> admissible;
  std::vector<std::vector<const ItemRecord*>> sets;
  for (const auto* x : pool) {
    if (ids.count(x->id) || categories.count(x->category)) continue;
    admissible.push_back(x);
    sets.push_back(current);
    sets.back().push_back(x);
  }
  if (sets.empty()) return std::nullopt;
  const auto outs = scorer(sets);
  if (outs.size() != sets.size()) throw ContractError("scorer returned the wrong number of outputs");
  std::optional<Candidate> best;
  for (std::size_t i = 0; i < admissible.size(); ++i) {
    const auto& o = outs[i];
    if (!(o.compatibility > threshold) || o.predicted_style() != style) continue;
    if (!best || o.compatibility > best->score ||
        (o.compatibility == best->score && admissible[i]->id < best->item->id)) {
      best = Candidate{admissible[i], o.compatibility, o.predicted_style()};
    }
  }
  return best;
}

GeneratedOutfit generate_outfit(const CollocationRequest& req, StyleLabel style, const SetScorer& scorer) {
  req.validate();
  GeneratedOutfit out;
  out.style = style;
  std::vector<const ItemRecord*> current{req.query};
  out.items.push_back(req.query->id);
  for (const auto& type : req.type_order) {
    auto c = best_candidate(current, req.pool(style, type), scorer, style, req.threshold);
    const bool accept = c && (req.accept_ties ? c->score >= out.set_score : c->score > out.set_score);
    if (!accept) {
      out.skipped_types.push_back(type);
      continue;
    }
    current.push_back(c->item);
    out.items.push_back(c->item->id);
    out.accepted.push_back({c->item->id, c->item->category, c->score});
    out.set_score = c->score;
  }
  return out;
}

DiverseResult generate_diverse(const CollocationRequest& req, const SetScorer& scorer) {
  req.validate();
  DiverseResult res;
  for (auto s : req.styles) {
    try {
      res.outfits.emplace(s, generate_outfit(req, s, scorer));
    } catch (const Error& e) {
      res.errors.emplace(s, e.what());
    }
  }
  return res;
}

nlohmann::json to_json(const DiverseResult& result) {
  nlohmann::json outfits = nlohmann::json::array();
  for (const auto& [style, o] : result.outfits) {
    nlohmann::json accepted = nlohmann::json::array();
    for (const auto& a : o.accepted) {
      accepted.push_back({{"item", a.item_id}, {"category", a.category}, {"score", a.score}});
    }
    outfits.push_back({{"style", to_string(style)},
                       {"items", o.items},
                       {"accepted", accepted},
                       {"skipped_types", o.skipped_types},
                       {"set_score", o.set_score}});
  }
  nlohmann::json errors = nlohmann::json::object();
  for (const auto& [style, msg] : result.errors) errors[std::string(to_string(style))] = msg;
  return {{"outfits", outfits}, {"errors", errors}};
}

}  // namespace ngf
