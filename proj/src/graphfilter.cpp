#include "ngf/graphfilter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include "ngf/error.hpp"
#include "ngf/random.hpp"

namespace ngf {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Graph

GarmentGraph GarmentGraph::build(std::span<const std::vector<double>> items) {
  if (items.size() < 2) {
    throw ContractError("garment graph needs at least 2 items, got " + std::to_string(items.size()));
  }
  const std::size_t d = items.front().size();
  if (d == 0) throw ContractError("garment graph: empty embedding");
  std::vector<double> rows;
  rows.reserve(items.size() * d);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].size() != d) {
      throw ContractError("garment graph: item " + std::to_string(i) + " has dimension " +
                          std::to_string(items[i].size()) + ", expected " + std::to_string(d));
    }
    rows.insert(rows.end(), items[i].begin(), items[i].end());
  }
  return GarmentGraph(Tensor::matrix(items.size(), d, std::move(rows)));
}

GarmentGraph GarmentGraph::build(std::span<const ItemRecord* const> items) {
  std::vector<std::vector<double>> rows;
  rows.reserve(items.size());
  for (const auto* it : items) rows.push_back(it->embedding);
  return build(rows);
}

std::vector<std::pair<std::size_t, std::size_t>> GarmentGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(num_edges());
  for (std::size_t i = 0; i < num_nodes(); ++i) {
    for (std::size_t j = i + 1; j < num_nodes(); ++j) out.emplace_back(i, j);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config

std::string_view to_string(AggregationMode mode) {
  switch (mode) {
    case AggregationMode::kHierarchical: return "hierarchical";
    case AggregationMode::kEdgeMaxOnly: return "edge-max";
    case AggregationMode::kEdgeAvgOnly: return "edge-avg";
    case AggregationMode::kNodeOnly: return "node";
  }
  return "?";
}

AggregationMode parse_mode(std::string_view name) {
  std::string s(name);
  for (auto& c : s) c = c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "hierarchical") return AggregationMode::kHierarchical;
  if (s == "edge-max" || s == "edge-max-only") return AggregationMode::kEdgeMaxOnly;
  if (s == "edge-avg" || s == "edge-avg-only") return AggregationMode::kEdgeAvgOnly;
  if (s == "node" || s == "node-only") return AggregationMode::kNodeOnly;
  throw UsageError("unknown aggregation mode '" + std::string(name) + "' (hierarchical|edge-max|edge-avg|node)");
}

namespace {

std::string_view to_string(Activation a) { return a == Activation::kRelu ? "relu" : "linear"; }

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "linear") return Activation::kLinear;
  throw DataError("unknown activation '" + s + "' (relu|linear)");
}

std::size_t edge_input_width(const NetworkConfig& cfg, std::size_t p) {
  const std::size_t h = cfg.layers[p].h[1];
  return cfg.mode == AggregationMode::kNodeOnly ? h : 3 * h;
}

}  // namespace

std::size_t NetworkConfig::layer_output_width(std::size_t p) const {
  const std::size_t g = layers.at(p).g[1];
  return mode == AggregationMode::kHierarchical ? 2 * g : g;
}

std::size_t NetworkConfig::layer_input_width(std::size_t p) const {
  return p == 0 ? input_dim : layer_output_width(p - 1);
}

void NetworkConfig::validate() const {
  auto positive = [](std::size_t w, const std::string& what) {
    if (w == 0) throw ContractError("network width '" + what + "' must be positive");
  };
  positive(input_dim, "input_dim");
  positive(node_width, "node_width");
  for (std::size_t p = 0; p < layers.size(); ++p) {
    for (int k = 0; k < 2; ++k) {
      positive(layers[p].h[k], "layers[" + std::to_string(p) + "].h");
      positive(layers[p].g[k], "layers[" + std::to_string(p) + "].g");
    }
  }
  for (auto w : head_hidden) positive(w, "head_hidden");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ContractError("focal gamma must be finite and nonnegative");
}

NetworkConfig desk_network() {
  NetworkConfig c;
  c.layers = {{{32, 32}, {32, 32}}, {{64, 64}, {64, 64}}};
  c.node_width = 128;
  c.head_hidden = {64, 32};
  return c;
}

NetworkConfig network_config_from_json(const json& j) {
  if (!j.is_object()) throw DataError("network config must be a JSON object");
  NetworkConfig cfg;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "input_dim") {
        cfg.input_dim = v.get<std::size_t>();
      } else if (key == "layers") {
        cfg.layers.clear();
        for (const auto& l : v) {
          for (const auto& [lk, lv] : l.items()) {
            if (lk != "h" && lk != "g") throw DataError("network config: unknown layer key '" + lk + "'");
          }
          cfg.layers.push_back({l.at("h").get<std::array<std::size_t, 2>>(), l.at("g").get<std::array<std::size_t, 2>>()});
        }
      } else if (key == "node_width") {
        cfg.node_width = v.get<std::size_t>();
      } else if (key == "head_hidden") {
        cfg.head_hidden = v.get<std::vector<std::size_t>>();
      } else if (key == "mode") {
        cfg.mode = parse_mode(v.get<std::string>());
      } else if (key == "activation") {
        cfg.activation = parse_activation(v.get<std::string>());
      } else if (key == "gamma") {
        cfg.gamma = v.get<double>();
      } else if (key == "style_head") {
        cfg.style_head = v.get<bool>();
      } else {
        throw DataError("network config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("network config: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(e.what());
  }
  try {
    cfg.validate();
  } catch (const ContractError& e) {
    throw DataError(e.what());
  }
  return cfg;
}

json to_json(const NetworkConfig& cfg) {
  json layers = json::array();
  for (const auto& l : cfg.layers) layers.push_back({{"h", l.h}, {"g", l.g}});
  return {{"input_dim", cfg.input_dim},   {"layers", layers},
          {"node_width", cfg.node_width}, {"head_hidden", cfg.head_hidden},
          {"mode", to_string(cfg.mode)},  {"activation", to_string(cfg.activation)},
          {"gamma", cfg.gamma},           {"style_head", cfg.style_head}};
}

// ---------------------------------------------------------------------------
// Parameters

namespace {

struct LinearSpec {
  std::string name;
  std::size_t in, out;
};

std::vector<LinearSpec> linear_layout(const NetworkConfig& cfg) {
  std::vector<LinearSpec> out;
  for (std::size_t p = 0; p < cfg.layers.size(); ++p) {
    const auto& l = cfg.layers[p];
    const std::string base = "layer" + std::to_string(p);
    out.push_back({base + ".h.0", cfg.layer_input_width(p), l.h[0]});
    out.push_back({base + ".h.1", l.h[0], l.h[1]});
    out.push_back({base + ".g.0", edge_input_width(cfg, p), l.g[0]});
    out.push_back({base + ".g.1", l.g[0], l.g[1]});
  }
  out.push_back({"node", cfg.layer_input_width(cfg.layers.size()), cfg.node_width});
  std::size_t w = cfg.pooled_width();
  for (std::size_t k = 0; k < cfg.head_hidden.size(); ++k) {
    out.push_back({"head.fc" + std::to_string(k), w, cfg.head_hidden[k]});
    w = cfg.head_hidden[k];
  }
  out.push_back({"head.compat", w, 1});
  out.push_back({"head.style", w, kNumStyles});
  return out;
}

}  // namespace

GraphModel GraphModel::init(const NetworkConfig& config, std::uint64_t seed) {
  config.validate();
  GraphModel m{config, {}};
  Rng rng(seed);
  for (const auto& spec : linear_layout(config)) {
    const double stdev = std::sqrt(2.0 / static_cast<double>(spec.in));
    std::vector<double> w(spec.in * spec.out);
    for (auto& x : w) x = stdev * normal(rng);
    m.params.add(spec.name + ".weight", Tensor::matrix(spec.in, spec.out, std::move(w)));
    m.params.add(spec.name + ".bias", Tensor::zeros({spec.out}));
  }
  return m;
}

void GraphModel::check_shapes() const {
  config.validate();
  const auto layout = linear_layout(config);
  if (params.size() != 2 * layout.size()) {
    throw ContractError("model has " + std::to_string(params.size()) + " tensors, config expects " +
                        std::to_string(2 * layout.size()));
  }
  for (const auto& spec : layout) {
    const auto* w = params.find(spec.name + ".weight");
    const auto* b = params.find(spec.name + ".bias");
    if (!w || !b) throw ContractError("model is missing parameter '" + spec.name + "'");
    if (w->shape() != Shape{spec.in, spec.out} || b->shape() != Shape{spec.out}) {
      throw ContractError("parameter '" + spec.name + "' has shape " + shape_str(w->shape()) + ", expected [" +
                          std::to_string(spec.in) + "x" + std::to_string(spec.out) + "]");
    }
  }
}

std::vector<std::string> parameter_groups(const NetworkConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& spec : linear_layout(cfg)) out.push_back(spec.name);
  return out;
}

StyleLabel NetworkOutput::predicted_style() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kNumStyles; ++i) {
    if (style_distribution[i] > style_distribution[best]) best = i;
  }
  return kAllStyles[best];
}

// ---------------------------------------------------------------------------
// Forward

namespace {

template <class Store>
struct Net {
  Tape& tape;
  const NetworkConfig& cfg;
  Store& params;

  Var linear(Var x, const std::string& name) {
    auto y = affine(x, tape.parameter(params.at(name + ".weight")), tape.parameter(params.at(name + ".bias")));
    return cfg.activation == Activation::kRelu ? relu(y) : y;
  }

  Var two_maps(Var x, const std::string& a, const std::string& b) { return linear(linear(x, a), b); }
};

// Index structure of a ragged batch.
struct BatchLayout {
  std::shared_ptr<RowIndex> edge_i = std::make_shared<RowIndex>();
  std::shared_ptr<RowIndex> edge_j = std::make_shared<RowIndex>();
  std::shared_ptr<RowGroups> incident = std::make_shared<RowGroups>();
  std::shared_ptr<RowGroups> graph_nodes = std::make_shared<RowGroups>();
  Tensor nodes;
};

BatchLayout make_layout(std::span<const GarmentGraph* const> graphs, std::size_t input_dim) {
  if (graphs.empty()) throw ContractError("forward over an empty batch");
  BatchLayout b;
  std::vector<double> rows;
  std::size_t offset = 0, edge = 0;
  for (const auto* g : graphs) {
    if (g->dim() != input_dim) {
      throw ContractError("graph dimension " + std::to_string(g->dim()) + " does not match network input_dim " +
                          std::to_string(input_dim));
    }
    const std::size_t n = g->num_nodes();
    rows.insert(rows.end(), g->nodes().values().begin(), g->nodes().values().end());
    std::vector<std::vector<std::size_t>> inc(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        b.edge_i->push_back(offset + i);
        b.edge_j->push_back(offset + j);
        inc[i].push_back(edge);
        inc[j].push_back(edge);
        ++edge;
      }
    }
    std::vector<std::size_t> members(n);
    for (std::size_t i = 0; i < n; ++i) members[i] = offset + i;
    for (auto& v : inc) b.incident->push_back(std::move(v));
    b.graph_nodes->push_back(std::move(members));
    offset += n;
  }
  b.nodes = Tensor::matrix(offset, input_dim, std::move(rows));
  return b;
}

template <class Store>
Var edge_layer(Net<Store>& net, Var x, std::size_t p, const BatchLayout& b) {
  const std::string base = "layer" + std::to_string(p);
  auto h = net.two_maps(x, base + ".h.0", base + ".h.1");
  if (net.cfg.mode == AggregationMode::kNodeOnly) return net.two_maps(h, base + ".g.0", base + ".g.1");
  auto hi = gather_rows(h, b.edge_i);
  auto hj = gather_rows(h, b.edge_j);
  auto e = concat_cols({minimum(hi, hj), maximum(hi, hj), scale(add(hi, hj), 0.5)});
  auto g = net.two_maps(e, base + ".g.0", base + ".g.1");
  switch (net.cfg.mode) {
    case AggregationMode::kEdgeMaxOnly: return segment_reduce(g, b.incident, ReduceKind::kMax);
    case AggregationMode::kEdgeAvgOnly: return segment_reduce(g, b.incident, ReduceKind::kMean);
    default:
      return concat_cols(
          {segment_reduce(g, b.incident, ReduceKind::kMin), segment_reduce(g, b.incident, ReduceKind::kMax)});
  }
}

template <class Store>
BatchForward forward_impl(Tape& tape, const NetworkConfig& cfg, Store& params,
                          std::span<const GarmentGraph* const> graphs) {
  const auto layout = make_layout(graphs, cfg.input_dim);
  Net<Store> net{tape, cfg, params};
  Var x = tape.constant(layout.nodes);
  for (std::size_t p = 0; p < cfg.layers.size(); ++p) x = edge_layer(net, x, p, layout);
  x = net.linear(x, "node");
  Var z = concat_cols(
      {segment_reduce(x, layout.graph_nodes, ReduceKind::kMax), segment_reduce(x, layout.graph_nodes, ReduceKind::kMean)});
  for (std::size_t k = 0; k < cfg.head_hidden.size(); ++k) z = net.linear(z, "head.fc" + std::to_string(k));
  auto logit = affine(z, tape.parameter(params.at("head.compat.weight")), tape.parameter(params.at("head.compat.bias")));
  auto style = affine(z, tape.parameter(params.at("head.style.weight")), tape.parameter(params.at("head.style.bias")));
  return {sigmoid(logit), softmax_rows(style)};
}

std::vector<NetworkOutput> read_outputs(const BatchForward& f) {
  const auto& c = f.compatibility.value();
  const auto& s = f.style_probs.value();
  std::vector<NetworkOutput> out(c.rows());
  for (std::size_t b = 0; b < out.size(); ++b) {
    out[b].compatibility = c[b];
    for (std::size_t k = 0; k < kNumStyles; ++k) out[b].style_distribution[k] = s.at(b, k);
  }
  return out;
}

}  // namespace

BatchForward forward_batch(Tape& tape, const NetworkConfig& cfg, ParamStore& params,
                           std::span<const GarmentGraph* const> graphs) {
  return forward_impl(tape, cfg, params, graphs);
}

BatchForward forward_batch(Tape& tape, const NetworkConfig& cfg, const ParamStore& params,
                           std::span<const GarmentGraph* const> graphs) {
  return forward_impl(tape, cfg, params, graphs);
}

NetworkOutput forward(const GarmentGraph& graph, const GraphModel& model) {
  const GarmentGraph* one[] = {&graph};
  Tape tape;
  return read_outputs(forward_batch(tape, model.config, model.params, one)).front();
}

std::size_t configured_threads() {
  const char* env = std::getenv("NGF_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw UsageError(std::string("NGF_THREADS must be a positive integer, got '") + env + "'");
  return static_cast<std::size_t>(v);
}

std::vector<NetworkOutput> forward_many(std::span<const GarmentGraph* const> graphs, const GraphModel& model,
                                        std::size_t batch_size) {
  if (batch_size == 0) throw ContractError("forward_many: batch_size must be positive");
  std::vector<NetworkOutput> out(graphs.size());
  const std::size_t chunks = (graphs.size() + batch_size - 1) / batch_size;
  auto run = [&](std::size_t c) {
    const std::size_t lo = c * batch_size, hi = std::min(graphs.size(), lo + batch_size);
    Tape tape;
    auto res = read_outputs(forward_batch(tape, model.config, model.params, graphs.subspan(lo, hi - lo)));
    std::copy(res.begin(), res.end(), out.begin() + static_cast<std::ptrdiff_t>(lo));
  };
  const std::size_t workers = std::min(configured_threads(), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < chunks; c += workers) run(c);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

SetScorer make_scorer(const GraphModel& model, std::size_t batch_size) {
  return [&model, batch_size](std::span<const std::vector<const ItemRecord*>> sets) {
    std::vector<GarmentGraph> graphs;
    graphs.reserve(sets.size());
    for (const auto& s : sets) graphs.push_back(GarmentGraph::build(s));
    std::vector<const GarmentGraph*> ptrs;
    for (const auto& g : graphs) ptrs.push_back(&g);
    return forward_many(ptrs, model, batch_size);
  };
}

std::vector<double> edge_feature(std::span<const double> xi, std::span<const double> xj, const GraphModel& model,
                                 std::size_t layer) {
  if (xi.size() != xj.size()) throw ContractError("edge_feature: endpoint dimensions differ");
  if (layer >= model.config.layers.size()) throw ContractError("edge_feature: no layer " + std::to_string(layer));
  Tape tape;
  Net<const ParamStore> net{tape, model.config, model.params};
  std::vector<double> pair(xi.begin(), xi.end());
  pair.insert(pair.end(), xj.begin(), xj.end());
  const std::string base = "layer" + std::to_string(layer);
  auto h = net.two_maps(tape.constant(Tensor::matrix(2, xi.size(), std::move(pair))), base + ".h.0", base + ".h.1");
  auto a = gather_rows(h, RowIndex{0});
  auto b = gather_rows(h, RowIndex{1});
  auto e = concat_cols({minimum(a, b), maximum(a, b), scale(add(a, b), 0.5)});
  const auto v = e.value().values();
  return {v.begin(), v.end()};
}

Tensor edge_conv_layer(const Tensor& node_features, const GraphModel& model, std::size_t layer) {
  if (layer >= model.config.layers.size()) throw ContractError("edge_conv_layer: no layer " + std::to_string(layer));
  if (node_features.rank() != 2 || node_features.rows() < 2) {
    throw ContractError("edge_conv_layer needs an [n x w] feature matrix with n >= 2");
  }
  std::vector<std::vector<double>> rows(node_features.rows());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto v = node_features.values().subspan(r * node_features.cols(), node_features.cols());
    rows[r].assign(v.begin(), v.end());
  }
  const auto g = GarmentGraph::build(rows);
  const GarmentGraph* one[] = {&g};
  const auto layout = make_layout(one, node_features.cols());
  Tape tape;
  Net<const ParamStore> net{tape, model.config, model.params};
  return edge_layer(net, tape.constant(node_features), layer, layout).value();
}

// ---------------------------------------------------------------------------
// Losses

double compatibility_loss(double compatibility, int label) {
  if (label != 0 && label != 1) throw ContractError("compatibility label must be 0 or 1");
  const double s = std::clamp(compatibility, kProbClamp, 1.0 - kProbClamp);
  return label == 1 ? -std::log(s) : -std::log(1.0 - s);
}

double focal_loss(std::span<const double> probs, std::span<const double> target, double gamma) {
  if (probs.size() != target.size()) throw DimensionError("focal_loss: probability and target sizes differ");
  if (gamma < 0.0) throw DomainError("focal_loss: gamma must be nonnegative");
  double loss = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (target[i] == 0.0) continue;
    const double p = std::max(probs[i], kProbClamp);
    loss -= target[i] * std::pow(1.0 - p, gamma) * std::log(p);
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Training

Var training_objective(Tape& tape, const NetworkConfig& cfg, ParamStore& params,
                       std::span<const GarmentGraph* const> graphs, std::span<const int> labels,
                       std::span<const int> style_targets) {
  if (labels.size() != graphs.size() || style_targets.size() != graphs.size()) {
    throw ContractError("training_objective: one label and style target per graph");
  }
  auto f = forward_batch(tape, cfg, params, graphs);
  std::vector<double> y(labels.begin(), labels.end());
  auto loss = binary_cross_entropy(f.compatibility, std::move(y), std::vector<double>(graphs.size(), 1.0));
  if (!cfg.style_head) return loss;
  std::vector<int> targets(graphs.size(), -1);
  bool any = false;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (labels[i] == 1 && style_targets[i] >= 0) {
      targets[i] = style_targets[i];
      any = true;
    }
  }
  if (!any) return loss;
  return add(loss, focal_loss(f.style_probs, std::move(targets), cfg.gamma, std::vector<double>(graphs.size(), 1.0)));
}

GraphTrainResult train_graph(const Corpus& corpus, GraphModel model, const GraphTrainConfig& cfg) {
  model.check_shapes();
  if (cfg.batch_size == 0) throw ContractError("batch_size must be positive");
  if (corpus.outfits().empty()) throw DataError("train_graph: corpus has no outfits");
  if (corpus.dim() != model.config.input_dim) {
    throw DataError("train_graph: corpus dimension " + std::to_string(corpus.dim()) + " does not match input_dim " +
                    std::to_string(model.config.input_dim));
  }
  GraphTrainResult result{std::move(model), {}, {}};
  if (corpus.count_label(0) == 0 || corpus.count_label(1) == 0) {
    result.warnings.push_back("training corpus has a single label; AUC is undefined downstream");
  }
  std::vector<GarmentGraph> graphs;
  std::vector<int> labels, styles;
  for (const auto& o : corpus.outfits()) {
    graphs.push_back(GarmentGraph::build(corpus.resolve(o)));
    labels.push_back(o.label);
    styles.push_back(o.compatible() && o.style ? static_cast<int>(style_index(*o.style)) : -1);
  }
  auto& params = result.model.params;
  const auto& net = result.model.config;
  const bool style_head = net.style_head;
  auto filter = [style_head](std::string_view name) { return style_head || !is_style_parameter(name); };

  Adam adam(cfg.adam);
  std::vector<std::size_t> order(graphs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<const GarmentGraph*> bg;
  std::vector<int> bl, bs;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, epoch));
    shuffle(order, rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      bg.clear();
      bl.clear();
      bs.clear();
      for (std::size_t k = start; k < std::min(order.size(), start + cfg.batch_size); ++k) {
        bg.push_back(&graphs[order[k]]);
        bl.push_back(labels[order[k]]);
        bs.push_back(styles[order[k]]);
      }
      params.zero_grad();
      Tape tape;
      auto loss = scale(training_objective(tape, net, params, bg, bl, bs), 1.0 / static_cast<double>(bg.size()));
      const double v = loss.value().item();
      if (!std::isfinite(v)) throw NumericError("train_graph: non-finite loss at epoch " + std::to_string(epoch));
      total += v * static_cast<double>(bg.size());
      tape.backward(loss);
      adam.step(params, filter);
    }
    result.epoch_loss.push_back(total / static_cast<double>(graphs.size()));
    if (cfg.on_epoch) cfg.on_epoch(epoch, result.epoch_loss.back());
  }
  return result;
}

GradCheckReport check_graph_gradients(const NetworkConfig& cfg, std::uint64_t seed,
                                      std::span<const std::size_t> sizes, const GradCheckOptions& options) {
  auto model = GraphModel::init(cfg, derive_seed(seed, 0));
  Rng rng(derive_seed(seed, 1));
  std::vector<GarmentGraph> graphs;
  std::vector<int> labels, styles;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    std::vector<std::vector<double>> rows(sizes[g], std::vector<double>(cfg.input_dim));
    for (auto& r : rows) {
      for (auto& x : r) x = normal(rng);
    }
    graphs.push_back(GarmentGraph::build(rows));
    labels.push_back(g % 2 == 0 ? 1 : 0);
    styles.push_back(labels.back() == 1 ? static_cast<int>(uniform_index(rng, kNumStyles)) : -1);
  }
  std::vector<const GarmentGraph*> ptrs;
  for (const auto& g : graphs) ptrs.push_back(&g);
  std::vector<NamedTensor> checked;
  for (auto& [name, t] : model.params) checked.push_back({name, &t});
  auto objective = [&](Tape& tape) { return training_objective(tape, cfg, model.params, ptrs, labels, styles); };
  return finite_diff_check(objective, checked, options);
}

// ---------------------------------------------------------------------------
// Model files

namespace {

std::filesystem::path config_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

}  // namespace

void save_model(const std::filesystem::path& path, const GraphModel& model) {
  model.check_shapes();
  save_checkpoint(path, model.params);
  std::ofstream out(config_path(path), std::ios::binary);
  if (!out) throw DataError("cannot write model config '" + config_path(path).string() + "'");
  out << to_json(model.config).dump(2) << '\n';
  if (!out) throw DataError("failed writing model config '" + config_path(path).string() + "'");
}

GraphModel load_model(const std::filesystem::path& path) {
  const auto cfg_file = config_path(path);
  std::ifstream in(cfg_file, std::ios::binary);
  if (!in) throw DataError("cannot open model config '" + cfg_file.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("model config '" + cfg_file.string() + "': " + e.what());
  }
  GraphModel m{network_config_from_json(j), load_checkpoint(path)};
  try {
    m.check_shapes();
  } catch (const ContractError& e) {
    throw DataError("checkpoint '" + path.string() + "' does not match its config: " + e.what());
  }
  return m;
}

}  // namespace ngf
