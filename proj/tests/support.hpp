#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ngf/graphfilter.hpp"
#include "ngf/random.hpp"

namespace ngf::test {

inline std::vector<std::vector<double>> random_rows(Rng& rng, std::size_t n, std::size_t d) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (auto& r : rows) {
    for (auto& v : r) v = normal(rng);
  }
  return rows;
}

inline std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  shuffle(p, rng);
  return p;
}

template <class T>
std::vector<T> permuted(const std::vector<T>& v, const std::vector<std::size_t>& p) {
  std::vector<T> out;
  for (auto i : p) out.push_back(v[i]);
  return out;
}

/// Small network with the default topology but narrow widths.
inline NetworkConfig small_config(std::size_t input_dim, AggregationMode mode = AggregationMode::kHierarchical) {
  NetworkConfig cfg;
  cfg.input_dim = input_dim;
  cfg.layers = {{{6, 5}, {5, 4}}, {{7, 6}, {6, 5}}};
  cfg.node_width = 8;
  cfg.head_hidden = {7, 5};
  cfg.mode = mode;
  return cfg;
}

// ---------------------------------------------------------------------------
// Straight-line reference forward pass, written against raw parameter values
// only (no tape, no tensor ops).

namespace oracle {

using Vec = std::vector<double>;

struct Map {
  const Tensor& w;
  const Tensor& b;
};

inline Map map_of(const ParamStore& p, const std::string& name) {
  return {p.at(name + ".weight"), p.at(name + ".bias")};
}

inline Vec apply(const Map& m, const Vec& x, bool relu) {
  const std::size_t din = m.w.rows(), dout = m.w.cols();
  Vec y(dout);
  for (std::size_t j = 0; j < dout; ++j) {
    double acc = m.b[j];
    for (std::size_t k = 0; k < din; ++k) acc += x[k] * m.w.at(k, j);
    y[j] = relu ? (acc > 0.0 ? acc : 0.0) : acc;
  }
  return y;
}

inline Vec cat(std::initializer_list<Vec> parts) {
  Vec out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

struct Output {
  double compatibility;
  Vec style;
};

/// One edge layer at node l: h over endpoints, g over (l, j) pairs, then the
/// mode's aggregation over j != l.
inline std::vector<Vec> edge_layer(const std::vector<Vec>& x, const ParamStore& p, const NetworkConfig& cfg,
                                   std::size_t layer) {
  const bool r = cfg.activation == Activation::kRelu;
  const std::string base = "layer" + std::to_string(layer);
  const auto h0 = map_of(p, base + ".h.0"), h1 = map_of(p, base + ".h.1");
  const auto g0 = map_of(p, base + ".g.0"), g1 = map_of(p, base + ".g.1");
  std::vector<Vec> h;
  for (const auto& v : x) h.push_back(apply(h1, apply(h0, v, r), r));
  std::vector<Vec> out;
  for (std::size_t l = 0; l < x.size(); ++l) {
    if (cfg.mode == AggregationMode::kNodeOnly) {
      out.push_back(apply(g1, apply(g0, h[l], r), r));
      continue;
    }
    std::vector<Vec> msgs;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j == l) continue;
      Vec mn(h[l].size()), mx(h[l].size()), av(h[l].size());
      for (std::size_t c = 0; c < h[l].size(); ++c) {
        mn[c] = std::min(h[l][c], h[j][c]);
        mx[c] = std::max(h[l][c], h[j][c]);
        av[c] = 0.5 * (h[l][c] + h[j][c]);
      }
      msgs.push_back(apply(g1, apply(g0, cat({mn, mx, av}), r), r));
    }
    const std::size_t w = msgs[0].size();
    Vec lo(w, INFINITY), hi(w, -INFINITY), mean(w, 0.0);
    for (const auto& m : msgs) {
      for (std::size_t c = 0; c < w; ++c) {
        lo[c] = std::min(lo[c], m[c]);
        hi[c] = std::max(hi[c], m[c]);
        mean[c] += m[c] / static_cast<double>(msgs.size());
      }
    }
    switch (cfg.mode) {
      case AggregationMode::kEdgeMaxOnly: out.push_back(hi); break;
      case AggregationMode::kEdgeAvgOnly: out.push_back(mean); break;
      default: out.push_back(cat({lo, hi}));
    }
  }
  return out;
}

inline Output forward(const std::vector<Vec>& nodes, const GraphModel& model) {
  const auto& cfg = model.config;
  const auto& p = model.params;
  const bool r = cfg.activation == Activation::kRelu;
  std::vector<Vec> x = nodes;
  for (std::size_t layer = 0; layer < cfg.layers.size(); ++layer) x = edge_layer(x, p, cfg, layer);
  for (auto& v : x) v = apply(map_of(p, "node"), v, r);
  const std::size_t w = x[0].size();
  Vec mx(w, -INFINITY), mean(w, 0.0);
  for (const auto& v : x) {
    for (std::size_t c = 0; c < w; ++c) {
      mx[c] = std::max(mx[c], v[c]);
      mean[c] += v[c] / static_cast<double>(x.size());
    }
  }
  Vec z = cat({mx, mean});
  for (std::size_t k = 0; k < cfg.head_hidden.size(); ++k) z = apply(map_of(p, "head.fc" + std::to_string(k)), z, r);
  const double logit = apply(map_of(p, "head.compat"), z, false)[0];
  Vec s = apply(map_of(p, "head.style"), z, false);
  const double top = *std::max_element(s.begin(), s.end());
  double total = 0.0;
  for (auto& v : s) total += (v = std::exp(v - top));
  for (auto& v : s) v /= total;
  return {1.0 / (1.0 + std::exp(-logit)), s};
}

}  // namespace oracle

}  // namespace ngf::test
