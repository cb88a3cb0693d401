#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ngf/corpus.hpp"
#include "ngf/data.hpp"
#include "ngf/graphfilter.hpp"
#include "ngf/styles.hpp"

namespace ngf {

struct ScoredSet {
  std::string set_id;
  double score = 0.0;
  int label = 0;
  std::optional<StyleLabel> style;
  std::size_t length = 0;
};

/// Mann-Whitney AUC: P(score+ > score-) + 0.5 P(tie), computed by sorting.
/// Throws DomainError when either class is missing.
double auc(std::span<const ScoredSet> scored);
double auc(std::span<const double> scores, std::span<const int> labels);

/// Scores every outfit of `corpus`.
std::vector<ScoredSet> score_corpus(const Corpus& corpus, const SetScorer& scorer);

struct FitbOutcome {
  std::string outfit_id;
  std::optional<StyleLabel> style;
  std::size_t length = 0;  // size of the completed outfit
  std::size_t chosen = 0;
  bool correct = false;
};

/// Scores the four completed sets of each question; the highest
/// compatibility wins, ties going to the lowest candidate index.
/// `corpus` resolves item ids and supplies the outfit style.
std::vector<FitbOutcome> answer_fitb(std::span<const FITBQuestion> questions, const Corpus& corpus,
                                     const SetScorer& scorer);
/// Fraction correct. Throws DomainError for an empty list.
double fitb_accuracy(std::span<const FitbOutcome> outcomes);
double fitb_accuracy(std::span<const FITBQuestion> questions, const Corpus& corpus, const SetScorer& scorer);

enum class BreakdownKey { kStyle, kLength };

struct GroupMetrics {
  std::string group;
  std::optional<double> auc;
  std::size_t auc_weight = 0;
  std::optional<double> fitb;
  std::size_t fitb_weight = 0;
};

struct Breakdown {
  BreakdownKey by = BreakdownKey::kStyle;
  std::vector<GroupMetrics> groups;
  std::optional<double> weighted_auc;
  std::optional<double> weighted_fitb;
  std::vector<std::string> notices;
};

/// Per-group metrics and their size-weighted averages.
///   by style:  AUC of that style's compatible sets against every
///              incompatible set (weight: positives); FITB over questions
///              drawn from that style's outfits (weight: questions).
///   by length: AUC and FITB restricted to sets of that length (weights: sets
///              and questions).
/// Groups whose metric is undefined are skipped with a notice.
Breakdown breakdown(std::span<const ScoredSet> scored, std::span<const FitbOutcome> fitb, BreakdownKey by);

/// Sum of value * weight over sum of weight. Throws DomainError when the total
/// weight is zero.
double weighted_average(std::span<const std::pair<double, std::size_t>> values);

struct EvalReport {
  std::size_t sets = 0;
  std::size_t questions = 0;
  std::optional<double> auc;
  std::optional<double> fitb;
  std::vector<Breakdown> breakdowns;
  std::vector<std::string> notices;
};

/// Scores every outfit of `corpus`, answers the FITB questions generated
/// from `fitb_seed` and adds one breakdown per entry of `by`. Metrics that
/// are undefined on this corpus stay empty and are listed in `notices`.
EvalReport evaluate(const Corpus& corpus, const SetScorer& scorer, std::uint64_t fitb_seed,
                    std::span<const BreakdownKey> by = {});

nlohmann::json to_json(const EvalReport& report);
/// Aligned text table, one row per group plus the weighted average.
std::string to_table(const EvalReport& report);

}  // namespace ngf
