#include "ngf/styles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "ngf/error.hpp"

namespace ngf {

namespace {

double wrap_hue(double h) {
  double w = std::fmod(h, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w -= 360.0;
  return w;
}

double circular_mean(std::span<const double> hues) {
  double s = 0.0, c = 0.0;
  for (double h : hues) {
    const double r = h * std::numbers::pi / 180.0;
    s += std::sin(r);
    c += std::cos(r);
  }
  return wrap_hue(std::atan2(s, c) * 180.0 / std::numbers::pi);
}

// Sorted hues, with the gap after each one (the last gap wraps to the first).
struct HueRing {
  std::vector<double> hues;
  std::vector<double> gaps;
};

HueRing make_ring(std::vector<double> hues) {
  std::sort(hues.begin(), hues.end());
  HueRing ring{hues, std::vector<double>(hues.size())};
  for (std::size_t i = 0; i < hues.size(); ++i) {
    ring.gaps[i] = i + 1 < hues.size() ? hues[i + 1] - hues[i] : hues.front() + 360.0 - hues.back();
  }
  return ring;
}

double covering_arc(const HueRing& ring) {
  return 360.0 - *std::max_element(ring.gaps.begin(), ring.gaps.end());
}

std::vector<double> cluster_centers(const HueRing& ring, double tol) {
  const std::size_t n = ring.hues.size();
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (ring.gaps[i] > tol) {
      start = (i + 1) % n;
      break;
    }
  }
  if (start == n) return {circular_mean(ring.hues)};
  std::vector<double> centers;
  std::vector<double> members;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (start + k) % n;
    members.push_back(ring.hues[i]);
    if (ring.gaps[i] > tol) {
      centers.push_back(circular_mean(members));
      members.clear();
    }
  }
  return centers;
}

}  // namespace

ColorDescriptor make_color(double hue, double saturation, double value) {
  if (!std::isfinite(hue)) throw DataError("hue must be finite");
  if (!(saturation >= 0.0 && saturation <= 1.0)) throw DataError("saturation outside [0,1]");
  if (!(value >= 0.0 && value <= 1.0)) throw DataError("value outside [0,1]");
  return {wrap_hue(hue), saturation, value};
}

std::string_view to_string(StyleLabel style) {
  switch (style) {
    case StyleLabel::kAnalogous: return "analogous";
    case StyleLabel::kComplementary: return "complementary";
    case StyleLabel::kTriadic: return "triadic";
    case StyleLabel::kSame: return "same";
    case StyleLabel::kMonochromatic: return "monochromatic";
    case StyleLabel::kOther: return "other";
  }
  return "other";
}

StyleLabel parse_style(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto s : kAllStyles) {
    if (to_string(s) == lower) return s;
  }
  throw DataError("unknown style '" + std::string(name) + "'");
}

double hue_distance(double a, double b) {
  const double d = std::abs(wrap_hue(a) - wrap_hue(b));
  return std::min(d, 360.0 - d);
}

StyleLabel label_style(std::span<const ColorDescriptor> colors, const StyleRuleConfig& cfg) {
  if (colors.size() < 2) throw ContractError("label_style needs at least two colors");

  bool same = true;
  for (std::size_t i = 0; i < colors.size() && same; ++i) {
    for (std::size_t j = i + 1; j < colors.size(); ++j) {
      if (hue_distance(colors[i].hue, colors[j].hue) > cfg.same_hue_deg ||
          std::abs(colors[i].saturation - colors[j].saturation) > cfg.same_sv ||
          std::abs(colors[i].value - colors[j].value) > cfg.same_sv) {
        same = false;
        break;
      }
    }
  }
  if (same) return StyleLabel::kSame;

  std::vector<double> chromatic;
  for (const auto& c : colors) {
    if (c.saturation > cfg.mono_saturation) chromatic.push_back(wrap_hue(c.hue));
  }
  if (chromatic.empty()) return StyleLabel::kMonochromatic;

  const auto ring = make_ring(std::move(chromatic));
  if (covering_arc(ring) <= cfg.analogous_arc_deg) return StyleLabel::kAnalogous;

  const auto centers = cluster_centers(ring, cfg.cluster_tol_deg);
  if (centers.size() == 2 && std::abs(hue_distance(centers[0], centers[1]) - 180.0) <= cfg.cluster_tol_deg) {
    return StyleLabel::kComplementary;
  }
  if (centers.size() == 3) {
    bool triadic = true;
    for (std::size_t i = 0; i < 3; ++i) {
      if (std::abs(hue_distance(centers[i], centers[(i + 1) % 3]) - 120.0) > cfg.cluster_tol_deg) triadic = false;
    }
    if (triadic) return StyleLabel::kTriadic;
  }
  return StyleLabel::kOther;
}

}  // namespace ngf
