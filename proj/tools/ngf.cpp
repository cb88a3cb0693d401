// ngf: command-line front end for data synthesis, training, evaluation and
// outfit generation.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ngf/collocate.hpp"
#include "ngf/data.hpp"
#include "ngf/error.hpp"
#include "ngf/eval.hpp"
#include "ngf/graphfilter.hpp"
#include "ngf/metriclearn.hpp"
#include "ngf/random.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ngf::DataError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ngf::DataError("'" + path + "': " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ngf::DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ngf::DataError("failed writing '" + path + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ngf::UsageError("expected a boolean, got '" + s + "'");
}

std::string json_scalar(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw ngf::UsageError("config key '" + key + "' must be a scalar or a list of scalars");
}

// Splices the keys of a --config JSON object into the argument list right
// after the subcommand, so explicit command-line flags still win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    std::size_t width = 0;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ngf::UsageError("--config needs a file argument");
      path = args[i + 1];
      width = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      width = 1;
    } else {
      continue;
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + width));
    const auto j = read_json(path);
    if (!j.is_object()) throw ngf::UsageError("config file '" + path + "' must hold a JSON object");
    std::vector<std::string> extra;
    for (const auto& [key, v] : j.items()) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      extra.push_back(flag);
      if (v.is_array()) {
        std::string joined;
        for (const auto& e : v) joined += (joined.empty() ? "" : ",") + json_scalar(e, key);
        extra.push_back(joined);
      } else {
        extra.push_back(json_scalar(v, key));
      }
    }
    const std::size_t at = !args.empty() && args[0].rfind('-', 0) != 0 ? 1 : 0;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
    break;
  }
  return args;
}

void print_resolved(const CLI::App& sub, std::uint64_t seed) {
  json opts = json::object();
  for (const auto* opt : sub.get_options()) {
    const auto name = opt->get_single_name();
    if (name == "help" || name == "seed") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      std::string joined;
      for (const auto& s : r) joined += (joined.empty() ? "" : ",") + s;
      opts[name] = joined;
    } else {
      opts[name] = opt->get_default_str();
    }
  }
  json j{{"command", sub.get_name()}, {"seed", seed}, {"options", opts}};
  std::cout << "config " << j.dump() << "\n";
}

json question_to_json(const ngf::FITBQuestion& q) {
  return {{"outfit_id", q.outfit_id},
          {"category", q.category},
          {"given_items", q.given_items},
          {"candidates", q.candidates},
          {"answer_index", q.answer_index}};
}

ngf::FITBQuestion question_from_json(const json& j) {
  try {
    ngf::FITBQuestion q;
    q.outfit_id = j.at("outfit_id").get<std::string>();
    q.category = j.at("category").get<std::string>();
    q.given_items = j.at("given_items").get<std::vector<std::string>>();
    q.candidates = j.at("candidates").get<std::array<std::string, 4>>();
    q.answer_index = j.at("answer_index").get<std::size_t>();
    if (q.answer_index > 3) throw ngf::DataError("answer_index out of range");
    return q;
  } catch (const json::exception& e) {
    throw ngf::DataError(std::string("fitb question: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

struct Common {
  std::uint64_t seed = 1;
};

struct SynthArgs {
  std::string kind = "harmony", spec, out, test_out, styles;
  std::size_t train_sets = 0, test_sets = 0, dim = 0, items_per_category = 0;
  double noise = -1.0;
  std::string disjoint, negatives;
};

int cmd_synth(const SynthArgs& a, const Common& c) {
  ngf::CorpusSplit split;
  if (a.kind == "cluster") {
    ngf::ClusterSpec s;
    if (a.train_sets) s.train_sets = a.train_sets;
    if (a.test_sets) s.test_sets = a.test_sets;
    if (a.dim) s.dim = a.dim;
    if (a.items_per_category) s.items_per_group = a.items_per_category;
    if (a.noise >= 0.0) s.noise = a.noise;
    split = ngf::synth_cluster_corpus(s, c.seed);
  } else if (a.kind == "harmony") {
    ngf::SynthSpec s = a.spec.empty() ? ngf::SynthSpec{} : ngf::synth_spec_from_json(read_json(a.spec));
    if (a.train_sets) s.train_sets = a.train_sets;
    if (a.test_sets) s.test_sets = a.test_sets;
    if (a.dim) s.dim = a.dim;
    if (a.items_per_category) s.items_per_category = a.items_per_category;
    if (a.noise >= 0.0) s.noise = a.noise;
    if (!a.disjoint.empty()) s.split_disjoint = parse_bool(a.disjoint);
    if (!a.negatives.empty()) s.negative_mode = ngf::parse_negative_mode(a.negatives);
    if (!a.styles.empty()) {
      s.style_mix.clear();
      for (const auto& name : split_list(a.styles)) s.style_mix[ngf::parse_style(name)] = 1.0;
    }
    std::cout << "spec " << ngf::synth_spec_to_json(s).dump() << "\n";
    split = ngf::synth_corpus(s, c.seed);
  } else {
    throw ngf::UsageError("--kind must be harmony or cluster");
  }
  ngf::save_corpus(a.out, split.train);
  ngf::save_corpus(a.test_out, split.test);
  std::printf("train: %zu items, %zu outfits (%zu compatible) -> %s\n", split.train.items().size(),
              split.train.outfits().size(), split.train.count_label(1), a.out.c_str());
  std::printf("test:  %zu items, %zu outfits (%zu compatible) -> %s\n", split.test.items().size(),
              split.test.outfits().size(), split.test.count_label(1), a.test_out.c_str());
  return 0;
}

struct LabelArgs {
  std::string corpus, out, report;
  ngf::StyleRuleConfig rules;
};

int cmd_label(const LabelArgs& a, const Common&) {
  const auto corpus = ngf::load_corpus(a.corpus);
  const auto split = ngf::split_corpus_by_style(corpus, a.rules);
  for (const auto& [id, label] : split.labels) std::cout << id << '\t' << ngf::to_string(label) << '\n';
  std::size_t total = 0;
  for (auto n : split.counts) total += n;
  std::printf("%-14s %8s %8s\n", "style", "sets", "share");
  json counts = json::object();
  for (auto s : ngf::kAllStyles) {
    const auto n = split.counts[ngf::style_index(s)];
    counts[std::string(ngf::to_string(s))] = n;
    std::printf("%-14s %8zu %8.4f\n", std::string(ngf::to_string(s)).c_str(), n,
                total ? static_cast<double>(n) / static_cast<double>(total) : 0.0);
  }
  std::printf("%-14s %8zu\n", "total", total);
  if (!a.out.empty()) ngf::save_corpus(a.out, ngf::apply_style_labels(corpus, split));
  if (!a.report.empty()) {
    json labels = json::array();
    for (const auto& [id, label] : split.labels) labels.push_back({{"outfit", id}, {"style", ngf::to_string(label)}});
    write_text(a.report, json{{"counts", counts}, {"labels", labels}}.dump(2) + "\n");
  }
  return 0;
}

struct EmbedArgs {
  std::string corpus, out;
  ngf::EmbedTrainConfig cfg;
  std::vector<std::string> apply, apply_out;
};

int cmd_train_embed(EmbedArgs a, const Common& c) {
  if (a.apply.size() != a.apply_out.size()) throw ngf::UsageError("--apply and --apply-out must pair up");
  const auto corpus = ngf::load_corpus(a.corpus);
  a.cfg.seed = c.seed;
  const auto res = ngf::train_embedding(corpus, a.cfg);
  std::printf("initial loss %.6f\n", res.initial_loss);
  for (std::size_t e = 0; e < res.epoch_loss.size(); ++e) std::printf("epoch %zu loss %.6f\n", e + 1, res.epoch_loss[e]);
  const double sat = ngf::margin_satisfaction(corpus, res.transform, a.cfg.triplet, ngf::derive_seed(c.seed, 9));
  std::printf("margin satisfaction (train) %.4f\n", sat);
  ngf::save_checkpoint(a.out, res.transform.params);
  for (std::size_t i = 0; i < a.apply.size(); ++i) {
    ngf::save_corpus(a.apply_out[i], res.transform.apply(ngf::load_corpus(a.apply[i])));
  }
  return 0;
}

struct GraphArgs {
  std::string corpus, out, network, preset = "full", mode, style_head, curve;
  double gamma = -1.0;
  ngf::GraphTrainConfig cfg;
};

int cmd_train_graph(GraphArgs a, const Common& c) {
  const auto corpus = ngf::load_corpus(a.corpus);
  ngf::NetworkConfig net;
  if (!a.network.empty()) {
    net = ngf::network_config_from_json(read_json(a.network));
  } else if (a.preset == "desk") {
    net = ngf::desk_network();
  } else if (a.preset != "full") {
    throw ngf::UsageError("--preset must be full or desk");
  }
  net.input_dim = corpus.dim();
  if (!a.mode.empty()) net.mode = ngf::parse_mode(a.mode);
  if (a.gamma >= 0.0) net.gamma = a.gamma;
  if (!a.style_head.empty()) net.style_head = parse_bool(a.style_head);
  std::cout << "network " << ngf::to_json(net).dump() << "\n";
  a.cfg.seed = c.seed;
  a.cfg.on_epoch = [](std::size_t e, double loss) {
    std::printf("epoch %zu loss %.6f\n", e + 1, loss);
    std::fflush(stdout);
  };
  auto res = ngf::train_graph(corpus, ngf::GraphModel::init(net, ngf::derive_seed(c.seed, 100)), a.cfg);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  ngf::save_model(a.out, res.model);
  if (!a.curve.empty()) write_text(a.curve, json{{"epoch_loss", res.epoch_loss}}.dump(2) + "\n");
  return 0;
}

struct EvalArgs {
  std::string corpus, checkpoint, breakdown, json_out;
};

int cmd_eval(const EvalArgs& a, const Common& c) {
  const auto corpus = ngf::load_corpus(a.corpus);
  const auto model = ngf::load_model(a.checkpoint);
  std::vector<ngf::BreakdownKey> by;
  for (const auto& key : split_list(a.breakdown)) {
    if (key == "style") {
      by.push_back(ngf::BreakdownKey::kStyle);
    } else if (key == "length") {
      by.push_back(ngf::BreakdownKey::kLength);
    } else {
      throw ngf::UsageError("--breakdown accepts style and length, got '" + key + "'");
    }
  }
  const auto report = ngf::evaluate(corpus, ngf::make_scorer(model), ngf::derive_seed(c.seed, 1), by);
  for (const auto& n : report.notices) std::cerr << "notice: " << n << "\n";
  std::cout << ngf::to_table(report);
  if (!a.json_out.empty()) write_text(a.json_out, ngf::to_json(report).dump(2) + "\n");
  return 0;
}

struct FitbArgs {
  std::string corpus, checkpoint, questions, questions_out;
};

int cmd_fitb(const FitbArgs& a, const Common& c) {
  const auto corpus = ngf::load_corpus(a.corpus);
  std::vector<ngf::FITBQuestion> questions;
  if (!a.questions.empty()) {
    for (const auto& q : read_json(a.questions)) questions.push_back(question_from_json(q));
  } else {
    questions = ngf::generate_fitb_questions(corpus, ngf::derive_seed(c.seed, 1));
  }
  if (questions.empty()) throw ngf::DataError("no fitb question could be formed from '" + a.corpus + "'");
  if (!a.questions_out.empty()) {
    json arr = json::array();
    for (const auto& q : questions) arr.push_back(question_to_json(q));
    write_text(a.questions_out, arr.dump(2) + "\n");
  }
  if (a.checkpoint.empty()) {
    std::printf("questions %zu\n", questions.size());
    return 0;
  }
  const auto model = ngf::load_model(a.checkpoint);
  const auto outcomes = ngf::answer_fitb(questions, corpus, ngf::make_scorer(model));
  std::printf("questions %zu\nfitb %.4f\n", outcomes.size(), ngf::fitb_accuracy(outcomes));
  return 0;
}

struct GenerateArgs {
  std::string query, styles, corpus, checkpoint, types, out, strict;
  double threshold = 0.5;
};

int cmd_generate(const GenerateArgs& a, const Common&) {
  const auto corpus = ngf::load_corpus(a.corpus);
  const auto model = ngf::load_model(a.checkpoint);
  std::vector<ngf::StyleLabel> styles;
  for (const auto& s : split_list(a.styles)) styles.push_back(ngf::parse_style(s));
  if (styles.empty()) throw ngf::UsageError("--styles needs at least one style");
  auto req = ngf::make_request(corpus, a.query, styles, split_list(a.types), a.threshold);
  if (!a.strict.empty()) req.accept_ties = !parse_bool(a.strict);
  const auto res = ngf::generate_diverse(req, ngf::make_scorer(model));
  for (const auto& [style, o] : res.outfits) {
    std::cout << ngf::to_string(style) << ":";
    for (const auto& id : o.items) std::cout << ' ' << id;
    std::printf("  (score %.4f)\n", o.set_score);
  }
  for (const auto& [style, msg] : res.errors) std::cerr << "error [" << ngf::to_string(style) << "]: " << msg << "\n";
  const auto j = ngf::to_json(res);
  if (!a.out.empty()) write_text(a.out, j.dump(2) + "\n");
  return res.errors.empty() ? 0 : kExitData;
}

struct GradArgs {
  std::string mode = "hierarchical", sizes = "2,3,5";
  std::size_t dim = 4;
  double epsilon = 1e-4, tol = 1e-4;
};

int cmd_gradcheck(const GradArgs& a, const Common& c) {
  ngf::NetworkConfig net;
  net.input_dim = a.dim;
  net.layers = {{{3, 3}, {3, 3}}, {{4, 4}, {4, 4}}};
  net.node_width = 5;
  net.head_hidden = {4, 3};
  net.mode = ngf::parse_mode(a.mode);
  std::vector<std::size_t> sizes;
  for (const auto& s : split_list(a.sizes)) {
    const auto n = std::stoul(s);
    if (n < 2) throw ngf::UsageError("--sizes entries must be at least 2");
    sizes.push_back(n);
  }
  ngf::GradCheckOptions opts;
  opts.epsilon = a.epsilon;
  opts.rel_tol = a.tol;
  const auto r = ngf::check_graph_gradients(net, c.seed, sizes, opts);
  std::printf("checked %zu coordinates, %zu non-smooth skipped\n", r.checked, r.non_smooth);
  std::printf("worst %s[%zu] analytic %.9g numeric %.9g\n", r.worst.tensor.c_str(), r.worst.index, r.worst.analytic,
              r.worst.numeric);
  std::printf("max relative error %.3e (tolerance %.1e) %s\n", r.max_rel_error, a.tol, r.passed ? "PASS" : "FAIL");
  return r.passed ? 0 : kExitNumeric;
}

int exit_code(const ngf::Error& e) {
  switch (e.kind()) {
    case ngf::Error::Kind::kUsage: return kExitUsage;
    case ngf::Error::Kind::kNumeric:
    case ngf::Error::Kind::kDomain: return kExitNumeric;
    default: return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ngf: garment-set compatibility and style-conditioned outfit generation"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  Common common;
  auto add_seed = [&](CLI::App* s) { s->add_option("--seed", common.seed, "Random seed")->capture_default_str(); };

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth-data", "Generate a synthetic train/test corpus pair");
  s_synth->add_option("--kind", synth.kind, "harmony (color styles) or cluster (metric learning)")->capture_default_str();
  s_synth->add_option("--spec", synth.spec, "Synthesis spec JSON (harmony)");
  s_synth->add_option("--out", synth.out, "Training corpus output")->required();
  s_synth->add_option("--test-out", synth.test_out, "Test corpus output")->required();
  s_synth->add_option("--train-sets", synth.train_sets, "Override training set count");
  s_synth->add_option("--test-sets", synth.test_sets, "Override test set count");
  s_synth->add_option("--dim", synth.dim, "Override embedding dimension");
  s_synth->add_option("--items-per-category", synth.items_per_category, "Override pool size");
  s_synth->add_option("--noise", synth.noise, "Override embedding noise");
  s_synth->add_option("--styles", synth.styles, "Comma list of styles, equal mix");
  s_synth->add_option("--negatives", synth.negatives, "Negative construction: all-swap or one-swap");
  s_synth->add_option("--disjoint", synth.disjoint, "Item-disjoint train/test split (true|false)");
  add_seed(s_synth);

  LabelArgs label;
  auto* s_label = app.add_subcommand("label-styles", "Label compatible outfits with color-theory styles");
  s_label->add_option("--corpus", label.corpus, "Corpus JSON")->required();
  s_label->add_option("--out", label.out, "Write the corpus with style labels attached");
  s_label->add_option("--report", label.report, "Write labels and counts as JSON");
  s_label->add_option("--same-hue", label.rules.same_hue_deg, "Same: max hue gap (deg)")->capture_default_str();
  s_label->add_option("--same-sv", label.rules.same_sv, "Same: max saturation/value gap")->capture_default_str();
  s_label->add_option("--mono-saturation", label.rules.mono_saturation, "Achromatic saturation bound")
      ->capture_default_str();
  s_label->add_option("--analogous-arc", label.rules.analogous_arc_deg, "Analogous arc width (deg)")
      ->capture_default_str();
  s_label->add_option("--cluster-tol", label.rules.cluster_tol_deg, "Hue cluster tolerance (deg)")
      ->capture_default_str();
  add_seed(s_label);

  EmbedArgs embed;
  auto* s_embed = app.add_subcommand("train-embed", "Train the triplet embedding projection");
  s_embed->add_option("--corpus", embed.corpus, "Training corpus JSON")->required();
  s_embed->add_option("--out", embed.out, "Projection checkpoint output")->required();
  s_embed->add_option("--epochs", embed.cfg.epochs)->capture_default_str();
  s_embed->add_option("--lr", embed.cfg.adam.lr)->capture_default_str();
  s_embed->add_option("--batch-size", embed.cfg.batch_size)->capture_default_str();
  s_embed->add_option("--alpha", embed.cfg.triplet.alpha, "Weight of the absolute negative")->capture_default_str();
  s_embed->add_option("--margin", embed.cfg.triplet.margin)->capture_default_str();
  s_embed->add_option("--max-triplets", embed.cfg.max_triplets_per_epoch, "0 = all")->capture_default_str();
  s_embed->add_option("--apply", embed.apply, "Corpora to project with the trained map")->delimiter(',');
  s_embed->add_option("--apply-out", embed.apply_out, "Outputs for --apply, same order")->delimiter(',');
  add_seed(s_embed);

  GraphArgs graph;
  auto* s_graph = app.add_subcommand("train-graph", "Train the garment graph network");
  s_graph->add_option("--corpus", graph.corpus, "Training corpus JSON")->required();
  s_graph->add_option("--out", graph.out, "Checkpoint output (config goes to <out>.json)")->required();
  s_graph->add_option("--network", graph.network, "Network config JSON");
  s_graph->add_option("--preset", graph.preset, "full or desk widths")->capture_default_str();
  s_graph->add_option("--mode", graph.mode, "hierarchical|edge-max|edge-avg|node");
  s_graph->add_option("--gamma", graph.gamma, "Focal loss gamma");
  s_graph->add_option("--style-head", graph.style_head, "Train the style head (true|false)");
  s_graph->add_option("--epochs", graph.cfg.epochs)->capture_default_str();
  s_graph->add_option("--lr", graph.cfg.adam.lr)->capture_default_str();
  s_graph->add_option("--batch-size", graph.cfg.batch_size)->capture_default_str();
  s_graph->add_option("--curve", graph.curve, "Write per-epoch losses as JSON");
  add_seed(s_graph);

  EvalArgs eval;
  auto* s_eval = app.add_subcommand("eval", "AUC and FITB of a checkpoint on a corpus");
  s_eval->add_option("--corpus", eval.corpus, "Evaluation corpus JSON")->required();
  s_eval->add_option("--checkpoint", eval.checkpoint, "Model checkpoint")->required();
  s_eval->add_option("--breakdown", eval.breakdown, "Comma list: style,length");
  s_eval->add_option("--json-out", eval.json_out, "Write the report as JSON");
  add_seed(s_eval);

  FitbArgs fitb;
  auto* s_fitb = app.add_subcommand("fitb", "Generate and/or answer fill-in-the-blank questions");
  s_fitb->add_option("--corpus", fitb.corpus, "Corpus JSON")->required();
  s_fitb->add_option("--checkpoint", fitb.checkpoint, "Model checkpoint; omit to only generate");
  s_fitb->add_option("--questions", fitb.questions, "Read questions instead of generating them");
  s_fitb->add_option("--questions-out", fitb.questions_out, "Write the questions as JSON");
  add_seed(s_fitb);

  GenerateArgs gen;
  auto* s_gen = app.add_subcommand("generate", "Style-conditioned outfit generation from a query item");
  s_gen->add_option("--query", gen.query, "Query item id")->required();
  s_gen->add_option("--styles", gen.styles, "Comma list of target styles")->required();
  s_gen->add_option("--corpus", gen.corpus, "Corpus JSON providing the pools")->required();
  s_gen->add_option("--checkpoint", gen.checkpoint, "Model checkpoint")->required();
  s_gen->add_option("--threshold", gen.threshold, "Compatibility threshold")->capture_default_str();
  s_gen->add_option("--types", gen.types, "Comma list of categories in visiting order");
  s_gen->add_option("--strict", gen.strict, "Require strict improvement (true|false)");
  s_gen->add_option("--out", gen.out, "Write outfits as JSON");
  add_seed(s_gen);

  GradArgs grad;
  auto* s_grad = app.add_subcommand("gradcheck", "Finite-difference check of the network gradients");
  s_grad->add_option("--mode", grad.mode)->capture_default_str();
  s_grad->add_option("--sizes", grad.sizes, "Graph sizes")->capture_default_str();
  s_grad->add_option("--dim", grad.dim, "Input dimension")->capture_default_str();
  s_grad->add_option("--epsilon", grad.epsilon)->capture_default_str();
  s_grad->add_option("--tol", grad.tol, "Relative error tolerance")->capture_default_str();
  add_seed(s_grad);

  try {
    auto args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      std::cerr << "usage error: " << e.what() << "\n";
      const auto subs = app.get_subcommands();
      std::cerr << (subs.empty() ? app.help() : subs.front()->help());
      return kExitUsage;
    }
    const auto* sub = app.get_subcommands().front();
    print_resolved(*sub, common.seed);
    if (sub == s_synth) return cmd_synth(synth, common);
    if (sub == s_label) return cmd_label(label, common);
    if (sub == s_embed) return cmd_train_embed(embed, common);
    if (sub == s_graph) return cmd_train_graph(graph, common);
    if (sub == s_eval) return cmd_eval(eval, common);
    if (sub == s_fitb) return cmd_fitb(fitb, common);
    if (sub == s_gen) return cmd_generate(gen, common);
    return cmd_gradcheck(grad, common);
  } catch (const ngf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
