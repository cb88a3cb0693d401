#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ngf/autodiff.hpp"
#include "ngf/corpus.hpp"
#include "ngf/gradcheck.hpp"
#include "ngf/params.hpp"
#include "ngf/styles.hpp"

namespace ngf {

/// Fully connected undirected graph over a garment set. Node rows keep the
/// input order; edges are the pairs (i, j) with i < j in lexicographic order.
class GarmentGraph {
 public:
  /// Throws ContractError for fewer than two nodes or ragged dimensions.
  static GarmentGraph build(std::span<const std::vector<double>> items);
  static GarmentGraph build(std::span<const ItemRecord* const> items);

  std::size_t num_nodes() const { return nodes_.rows(); }
  std::size_t num_edges() const { return num_nodes() * (num_nodes() - 1) / 2; }
  std::size_t dim() const { return nodes_.cols(); }
  const Tensor& nodes() const { return nodes_; }
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

 private:
  explicit GarmentGraph(Tensor nodes) : nodes_(std::move(nodes)) {}
  Tensor nodes_;
};

enum class AggregationMode { kHierarchical, kEdgeMaxOnly, kEdgeAvgOnly, kNodeOnly };
enum class Activation { kRelu, kLinear };

std::string_view to_string(AggregationMode mode);
/// Accepts hierarchical | edge-max | edge-avg | node (underscored forms too).
AggregationMode parse_mode(std::string_view name);

/// Widths of one edge-aggregation layer: h() is two position-wise maps over
/// nodes, g() is two position-wise maps over edge features.
struct EdgeConvWidths {
  std::array<std::size_t, 2> h;
  std::array<std::size_t, 2> g;
};

inline constexpr std::size_t kOutputLogits = 1 + kNumStyles;

struct NetworkConfig {
  std::size_t input_dim = 512;
  std::vector<EdgeConvWidths> layers = {{{128, 128}, {128, 128}}, {{256, 256}, {256, 256}}};
  std::size_t node_width = 1024;
  std::vector<std::size_t> head_hidden = {512, 256};
  AggregationMode mode = AggregationMode::kHierarchical;
  Activation activation = Activation::kRelu;
  double gamma = 0.5;
  bool style_head = true;

  /// Width of the node features leaving edge-aggregation layer `p`.
  std::size_t layer_output_width(std::size_t p) const;
  std::size_t layer_input_width(std::size_t p) const;
  std::size_t pooled_width() const { return 2 * node_width; }
  void validate() const;
};

/// Same topology with every width cut down (32/64 edge layers, 128 node
/// width, 64-32 head) for single-core runs.
NetworkConfig desk_network();

/// Rejects unknown keys with DataError.
NetworkConfig network_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NetworkConfig& cfg);

/// Learnable weights, named
///   layer{p}.h.{0,1}.{weight,bias}, layer{p}.g.{0,1}.{weight,bias},
///   node.{weight,bias}, head.fc{k}.{weight,bias},
///   head.compat.{weight,bias} (1 logit), head.style.{weight,bias} (6 logits).
struct GraphModel {
  NetworkConfig config;
  ParamStore params;

  /// He-normal weights, zero biases.
  static GraphModel init(const NetworkConfig& config, std::uint64_t seed);
  /// Throws ContractError when a parameter is missing or has the wrong shape.
  void check_shapes() const;
};

/// Parameter groups used for gradient checks and update gating.
std::vector<std::string> parameter_groups(const NetworkConfig& cfg);
inline bool is_style_parameter(std::string_view name) { return name.starts_with("head.style."); }

struct NetworkOutput {
  double compatibility = 0.0;
  std::array<double, kNumStyles> style_distribution{};

  StyleLabel predicted_style() const;
};

/// Tape-level forward over graphs stacked into one ragged batch.
struct BatchForward {
  Var compatibility;  // [B x 1]
  Var style_probs;    // [B x 6]
};

/// Records the forward pass of `graphs` on `tape`. Mutable params feed
/// gradients into the param tensors; const params are read-only aliases.
BatchForward forward_batch(Tape& tape, const NetworkConfig& cfg, ParamStore& params,
                           std::span<const GarmentGraph* const> graphs);
BatchForward forward_batch(Tape& tape, const NetworkConfig& cfg, const ParamStore& params,
                           std::span<const GarmentGraph* const> graphs);

NetworkOutput forward(const GarmentGraph& graph, const GraphModel& model);
std::vector<NetworkOutput> forward_many(std::span<const GarmentGraph* const> graphs, const GraphModel& model,
                                        std::size_t batch_size = 256);

/// Scores whole garment sets. Implementations must be safe to call
/// concurrently on const state.
using SetScorer = std::function<std::vector<NetworkOutput>(std::span<const std::vector<const ItemRecord*>>)>;

/// Scorer backed by `model`, which must outlive it. Batches of sets are
/// spread over NGF_THREADS workers.
SetScorer make_scorer(const GraphModel& model, std::size_t batch_size = 256);

/// h(xi, xj) for layer p: both endpoints through the layer's two node maps,
/// then min (+) max (+) mean of the pair. Symmetric bitwise.
std::vector<double> edge_feature(std::span<const double> xi, std::span<const double> xj, const GraphModel& model,
                                 std::size_t layer = 0);

/// One edge-aggregation layer applied to node features [n x w] of a single
/// graph, returning [n x layer_output_width(p)].
Tensor edge_conv_layer(const Tensor& node_features, const GraphModel& model, std::size_t layer);

/// -[y log s + (1 - y) log(1 - s)], s clamped into [1e-12, 1 - 1e-12].
double compatibility_loss(double compatibility, int label);
/// -sum_i y_i (1 - p_i)^gamma log p_i, p clamped below at 1e-12.
double focal_loss(std::span<const double> probs, std::span<const double> target, double gamma);

// ---------------------------------------------------------------------------
// Training

struct GraphTrainConfig {
  AdamConfig adam{1e-3};
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  /// Called after each epoch with (epoch index, mean training loss).
  std::function<void(std::size_t, double)> on_epoch;
};

struct GraphTrainResult {
  GraphModel model;
  std::vector<double> epoch_loss;
  std::vector<std::string> warnings;
};

/// Mini-batch Adam on mean(BCE over all outfits + focal over compatible
/// outfits with a style label, the latter only when config.style_head).
/// Style parameters are frozen when the style head is off.
GraphTrainResult train_graph(const Corpus& corpus, GraphModel model, const GraphTrainConfig& cfg);

/// Per-outfit training objective (BCE plus gated focal term) summed over
/// `outfits`. Exposed for gradient checks.
Var training_objective(Tape& tape, const NetworkConfig& cfg, ParamStore& params,
                       std::span<const GarmentGraph* const> graphs, std::span<const int> labels,
                       std::span<const int> style_targets);

/// Finite-difference check of training_objective with respect to every
/// parameter of a freshly initialised model, on one random graph per entry of
/// `sizes`. Graph labels alternate 1, 0, 1, ...; positives get a random style.
GradCheckReport check_graph_gradients(const NetworkConfig& cfg, std::uint64_t seed,
                                      std::span<const std::size_t> sizes, const GradCheckOptions& options = {});

/// Model file pair: NGFW checkpoint at `path` and its NetworkConfig as JSON
/// at `path` + ".json".
void save_model(const std::filesystem::path& path, const GraphModel& model);
GraphModel load_model(const std::filesystem::path& path);

/// Reads NGF_THREADS; defaults to 1.
std::size_t configured_threads();

}  // namespace ngf
