#include "ngf/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ngf/error.hpp"

namespace ngf {

Tensor& ParamStore::add(std::string name, Tensor value) {
  if (find(name)) throw ContractError("duplicate parameter '" + name + "'");
  value.set_requires_grad(true);
  entries_.emplace_back(std::move(name), std::move(value));
  return entries_.back().second;
}

const Tensor* ParamStore::find(std::string_view name) const {
  for (const auto& [n, t] : entries_) {
    if (n == name) return &t;
  }
  return nullptr;
}

Tensor& ParamStore::at(std::string_view name) {
  return const_cast<Tensor&>(static_cast<const ParamStore&>(*this).at(name));
}

const Tensor& ParamStore::at(std::string_view name) const {
  const Tensor* t = find(name);
  if (!t) throw ContractError("unknown parameter '" + std::string(name) + "'");
  return *t;
}

std::size_t ParamStore::total_values() const {
  std::size_t n = 0;
  for (const auto& [name, t] : entries_) n += t.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [name, t] : entries_) t.zero_grad();
}

// ---------------------------------------------------------------------------
// Checkpoint container

namespace {

template <class T>
void put(std::string& out, T value) {
  static_assert(std::is_integral_v<T> || std::is_same_v<T, double>);
  std::uint64_t bits;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = static_cast<std::uint64_t>(value);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    need(sizeof(T));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    if constexpr (std::is_same_v<T, double>) {
      return std::bit_cast<double>(bits);
    } else {
      return static_cast<T>(bits);
    }
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError("checkpoint truncated at byte " + std::to_string(pos_));
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const ParamStore& params) {
  std::string out(kCheckpointMagic, 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.append(name);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (auto e : t.shape()) put<std::uint64_t>(out, e);
    for (double v : t.values()) put<double>(out, v);
  }
  return out;
}

ParamStore decode_checkpoint(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(4) != std::string_view(kCheckpointMagic, 4)) throw DataError("not an NGFW checkpoint (bad magic)");
  const auto version = in.get<std::uint32_t>();
  if (version != kCheckpointVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));
  const auto count = in.get<std::uint32_t>();
  ParamStore params;
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto len = in.get<std::uint32_t>();
    std::string name(in.take(len));
    const auto rank = in.get<std::uint32_t>();
    Shape shape(rank);
    for (auto& e : shape) e = static_cast<std::size_t>(in.get<std::uint64_t>());
    std::vector<double> values(shape_size(shape));
    for (auto& v : values) v = in.get<double>();
    params.add(std::move(name), Tensor(std::move(shape), std::move(values)));
  }
  if (!in.done()) throw DataError("trailing bytes after checkpoint tensors");
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const ParamStore& params) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write checkpoint " + path.string());
  const auto bytes = encode_checkpoint(params);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("failed writing checkpoint " + path.string());
}

ParamStore load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_checkpoint(ss.str());
}

// ---------------------------------------------------------------------------
// Adam

void Adam::step(ParamStore& params, const std::function<bool(std::string_view)>& filter) {
  if (m_.empty()) {
    for (const auto& [name, t] : params) {
      m_.emplace_back(t.size(), 0.0);
      v_.emplace_back(t.size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw ContractError("Adam bound to a different parameter set");
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  std::size_t k = 0;
  for (auto& [name, t] : params) {
    auto& m = m_[k];
    auto& v = v_[k];
    ++k;
    if (filter && !filter(name)) continue;
    if (!t.has_grad()) continue;
    auto g = t.grad_values();
    auto w = t.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      const double update = config_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.eps);
      if (update != 0.0) w[i] -= update;
    }
    for (double x : w) {
      if (!std::isfinite(x)) throw NumericError("parameter '" + name + "' became non-finite");
    }
  }
}

}  // namespace ngf
