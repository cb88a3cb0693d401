#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ngf/tensor.hpp"

namespace ngf {

/// Insertion-ordered collection of named learnable tensors. Element addresses
/// are stable once the store is fully built (tapes alias them).
class ParamStore {
 public:
  Tensor& add(std::string name, Tensor value);

  Tensor& at(std::string_view name);
  const Tensor& at(std::string_view name) const;
  const Tensor* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t total_values() const;
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  void zero_grad();
  /// Gradient buffers are excluded: equality compares names, shapes, values.
  friend bool operator==(const ParamStore& a, const ParamStore& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

inline constexpr char kCheckpointMagic[4] = {'N', 'G', 'F', 'W'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary container: magic "NGFW", version u32, tensor count u32, then per
/// tensor a u32 name length, UTF-8 name bytes, u32 rank, u64 extents and
/// little-endian f64 values. All integers little-endian.
std::string encode_checkpoint(const ParamStore& params);
ParamStore decode_checkpoint(std::string_view bytes);
void save_checkpoint(const std::filesystem::path& path, const ParamStore& params);
ParamStore load_checkpoint(const std::filesystem::path& path);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam over a ParamStore. `step` reads each tensor's gradient buffer;
/// tensors rejected by `filter` are left bitwise untouched.
class Adam {
 public:
  explicit Adam(AdamConfig config) : config_(config) {}

  void step(ParamStore& params, const std::function<bool(std::string_view)>& filter = {});
  std::size_t steps() const noexcept { return t_; }

 private:
  AdamConfig config_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace ngf
