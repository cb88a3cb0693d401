#include "ngf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <unordered_map>

#include "ngf/error.hpp"

namespace ngf {

using nlohmann::json;

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ContractError("auc: one label per score");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DomainError("auc: non-finite score at index " + std::to_string(i));
    if (labels[i] == 1) {
      ++pos;
    } else if (labels[i] == 0) {
      ++neg;
    } else {
      throw ContractError("auc: labels must be 0 or 1");
    }
  }
  if (pos == 0 || neg == 0) throw DomainError("auc is undefined without both positive and negative sets");
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Twice the Mann-Whitney count, so ties stay integral.
  std::uint64_t twice = 0, neg_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t p = 0, n = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? p : n) += 1;
      ++j;
    }
    twice += 2 * p * neg_below + p * n;
    neg_below += n;
    i = j;
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double auc(std::span<const ScoredSet> scored) {
  std::vector<double> s;
  std::vector<int> l;
  for (const auto& x : scored) {
    s.push_back(x.score);
    l.push_back(x.label);
  }
  return auc(s, l);
}

std::vector<ScoredSet> score_corpus(const Corpus& corpus, const SetScorer& scorer) {
  std::vector<std::vector<const ItemRecord*>> sets;
  for (const auto& o : corpus.outfits()) sets.push_back(corpus.resolve(o));
  const auto outs = scorer(sets);
  if (outs.size() != sets.size()) throw ContractError("scorer returned the wrong number of outputs");
  std::vector<ScoredSet> res;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& o = corpus.outfits()[i];
    res.push_back({o.id, outs[i].compatibility, o.label, o.compatible() ? o.style : std::nullopt, o.items.size()});
  }
  return res;
}

std::vector<FitbOutcome> answer_fitb(std::span<const FITBQuestion> questions, const Corpus& corpus,
                                     const SetScorer& scorer) {
  std::unordered_map<std::string, const Outfit*> by_id;
  for (const auto& o : corpus.outfits()) by_id.emplace(o.id, &o);
  constexpr std::size_t kBlock = 64;
  std::vector<FitbOutcome> out;
  out.reserve(questions.size());
  for (std::size_t lo = 0; lo < questions.size(); lo += kBlock) {
    const std::size_t hi = std::min(questions.size(), lo + kBlock);
    std::vector<std::vector<const ItemRecord*>> sets;
    for (std::size_t q = lo; q < hi; ++q) {
      const auto& question = questions[q];
      try {
        std::vector<const ItemRecord*> given;
        for (const auto& id : question.given_items) given.push_back(&corpus.item(id));
        for (const auto& c : question.candidates) {
          sets.push_back(given);
          sets.back().push_back(&corpus.item(c));
        }
      } catch (const Error& e) {
        throw DataError("fitb question for outfit '" + question.outfit_id + "': " + e.what());
      }
    }
    std::vector<NetworkOutput> scores;
    try {
      scores = scorer(sets);
    } catch (const Error& e) {
      throw Error(e.kind(), "scoring fitb questions '" + questions[lo].outfit_id + "'..'" +
                                questions[hi - 1].outfit_id + "': " + e.what());
    }
    if (scores.size() != sets.size()) throw ContractError("scorer returned the wrong number of outputs");
    for (std::size_t q = lo; q < hi; ++q) {
      const auto& question = questions[q];
      const auto* s = &scores[(q - lo) * 4];
      std::size_t best = 0;
      for (std::size_t k = 1; k < 4; ++k) {
        if (s[k].compatibility > s[best].compatibility) best = k;
      }
      FitbOutcome r{question.outfit_id, std::nullopt, question.given_items.size() + 1, best,
                    best == question.answer_index};
      if (auto it = by_id.find(question.outfit_id); it != by_id.end()) r.style = it->second->style;
      out.push_back(std::move(r));
    }
  }
  return out;
}

double fitb_accuracy(std::span<const FitbOutcome> outcomes) {
  if (outcomes.empty()) throw DomainError("fitb accuracy of an empty question list");
  std::size_t ok = 0;
  for (const auto& o : outcomes) ok += o.correct ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(outcomes.size());
}

double fitb_accuracy(std::span<const FITBQuestion> questions, const Corpus& corpus, const SetScorer& scorer) {
  if (questions.empty()) throw DomainError("fitb accuracy of an empty question list");
  return fitb_accuracy(answer_fitb(questions, corpus, scorer));
}

double weighted_average(std::span<const std::pair<double, std::size_t>> values) {
  double num = 0.0;
  std::size_t den = 0;
  for (const auto& [v, w] : values) {
    num += v * static_cast<double>(w);
    den += w;
  }
  if (den == 0) throw DomainError("weighted average with zero total weight");
  return num / static_cast<double>(den);
}

namespace {

std::string group_name(BreakdownKey by, std::size_t key) {
  return by == BreakdownKey::kStyle ? std::string(to_string(kAllStyles[key])) : "len=" + std::to_string(key);
}

}  // namespace

Breakdown breakdown(std::span<const ScoredSet> scored, std::span<const FitbOutcome> fitb, BreakdownKey by) {
  Breakdown b;
  b.by = by;
  std::map<std::size_t, std::vector<ScoredSet>> sets;
  std::map<std::size_t, std::vector<FitbOutcome>> questions;
  std::vector<ScoredSet> negatives;
  for (const auto& s : scored) {
    if (by == BreakdownKey::kLength) {
      sets[s.length].push_back(s);
    } else if (s.label == 0) {
      negatives.push_back(s);
    } else if (s.style) {
      sets[style_index(*s.style)].push_back(s);
    }
  }
  for (const auto& q : fitb) {
    if (by == BreakdownKey::kLength) {
      questions[q.length].push_back(q);
    } else if (q.style) {
      questions[style_index(*q.style)].push_back(q);
    }
  }
  std::vector<std::size_t> keys;
  if (by == BreakdownKey::kStyle) {
    for (std::size_t k = 0; k < kNumStyles; ++k) keys.push_back(k);
  } else {
    for (const auto& [k, v] : sets) keys.push_back(k);
    for (const auto& [k, v] : questions) {
      if (!sets.count(k)) keys.push_back(k);
    }
    std::sort(keys.begin(), keys.end());
  }
  std::vector<std::pair<double, std::size_t>> auc_parts, fitb_parts;
  for (auto k : keys) {
    GroupMetrics g;
    g.group = group_name(by, k);
    auto& members = sets[k];
    if (by == BreakdownKey::kStyle) {
      g.auc_weight = members.size();
      members.insert(members.end(), negatives.begin(), negatives.end());
    } else {
      g.auc_weight = members.size();
    }
    const bool has_pos = std::any_of(members.begin(), members.end(), [](const ScoredSet& s) { return s.label == 1; });
    const bool has_neg = std::any_of(members.begin(), members.end(), [](const ScoredSet& s) { return s.label == 0; });
    if (has_pos && has_neg) {
      g.auc = auc(members);
      auc_parts.emplace_back(*g.auc, g.auc_weight);
    } else if (!scored.empty()) {
      b.notices.push_back("skipped AUC for group " + g.group + ": needs both positive and negative sets");
    }
    const auto& qs = questions[k];
    g.fitb_weight = qs.size();
    if (!qs.empty()) {
      g.fitb = fitb_accuracy(qs);
      fitb_parts.emplace_back(*g.fitb, g.fitb_weight);
    } else if (!fitb.empty()) {
      b.notices.push_back("skipped FITB for group " + g.group + ": no questions");
    }
    if (g.auc || g.fitb) b.groups.push_back(std::move(g));
  }
  if (!auc_parts.empty()) b.weighted_auc = weighted_average(auc_parts);
  if (!fitb_parts.empty()) b.weighted_fitb = weighted_average(fitb_parts);
  return b;
}

EvalReport evaluate(const Corpus& corpus, const SetScorer& scorer, std::uint64_t fitb_seed,
                    std::span<const BreakdownKey> by) {
  EvalReport report;
  const auto scored = score_corpus(corpus, scorer);
  report.sets = scored.size();
  if (corpus.count_label(0) > 0 && corpus.count_label(1) > 0) {
    report.auc = auc(scored);
  } else {
    report.notices.push_back("AUC skipped: corpus lacks one of the labels");
  }
  const auto questions = generate_fitb_questions(corpus, fitb_seed);
  std::vector<FitbOutcome> outcomes;
  if (!questions.empty()) {
    outcomes = answer_fitb(questions, corpus, scorer);
    report.fitb = fitb_accuracy(outcomes);
  } else {
    report.notices.push_back("FITB skipped: no eligible outfits");
  }
  report.questions = outcomes.size();
  for (auto key : by) {
    report.breakdowns.push_back(breakdown(scored, outcomes, key));
    for (const auto& n : report.breakdowns.back().notices) report.notices.push_back(n);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string fmt(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

std::string pad(const std::string& s, std::size_t w, bool right) {
  if (s.size() >= w) return s;
  return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
}

}  // namespace

json to_json(const EvalReport& report) {
  json j{{"sets", report.sets}, {"questions", report.questions}, {"auc", opt(report.auc)}, {"fitb", opt(report.fitb)}};
  json bs = json::array();
  for (const auto& b : report.breakdowns) {
    json groups = json::array();
    for (const auto& g : b.groups) {
      groups.push_back({{"group", g.group},
                        {"auc", opt(g.auc)},
                        {"auc_weight", g.auc_weight},
                        {"fitb", opt(g.fitb)},
                        {"fitb_weight", g.fitb_weight}});
    }
    bs.push_back({{"by", b.by == BreakdownKey::kStyle ? "style" : "length"},
                  {"groups", groups},
                  {"weighted_auc", opt(b.weighted_auc)},
                  {"weighted_fitb", opt(b.weighted_fitb)},
                  {"notices", b.notices}});
  }
  j["breakdowns"] = bs;
  return j;
}

std::string to_table(const EvalReport& report) {
  struct Row {
    std::string group, auc, n_auc, fitb, n_fitb;
  };
  std::vector<std::pair<std::string, std::vector<Row>>> sections;
  sections.push_back({"overall",
                      {{"all", fmt(report.auc), std::to_string(report.sets), fmt(report.fitb),
                        std::to_string(report.questions)}}});
  for (const auto& b : report.breakdowns) {
    std::vector<Row> rows;
    for (const auto& g : b.groups) {
      rows.push_back({g.group, fmt(g.auc), std::to_string(g.auc_weight), fmt(g.fitb), std::to_string(g.fitb_weight)});
    }
    rows.push_back({"weighted avg", fmt(b.weighted_auc), "", fmt(b.weighted_fitb), ""});
    sections.push_back({b.by == BreakdownKey::kStyle ? "by style" : "by length", std::move(rows)});
  }
  std::size_t w0 = 5, w1 = 3, w2 = 1, w3 = 4, w4 = 1;
  for (const auto& [title, rows] : sections) {
    for (const auto& r : rows) {
      w0 = std::max(w0, r.group.size());
      w1 = std::max(w1, r.auc.size());
      w2 = std::max(w2, r.n_auc.size());
      w3 = std::max(w3, r.fitb.size());
      w4 = std::max(w4, r.n_fitb.size());
    }
  }
  auto line = [&](const Row& r) {
    return pad(r.group, w0, false) + "  " + pad(r.auc, w1, true) + "  " + pad(r.n_auc, w2, true) + "  " +
           pad(r.fitb, w3, true) + "  " + pad(r.n_fitb, w4, true) + "\n";
  };
  std::string out;
  for (const auto& [title, rows] : sections) {
    out += "[" + title + "]\n";
    out += line({"group", "AUC", "n", "FITB", "n"});
    for (const auto& r : rows) out += line(r);
  }
  return out;
}

}  // namespace ngf
