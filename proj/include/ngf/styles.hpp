#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ngf {

/// Dominant color of a garment. Hue in degrees [0, 360), saturation and
/// value in [0, 1].
struct ColorDescriptor {
  double hue = 0.0;
  double saturation = 0.0;
  double value = 0.0;

  friend bool operator==(const ColorDescriptor&, const ColorDescriptor&) = default;
};

/// Validates ranges (hue is wrapped into [0, 360) first). Throws DataError.
ColorDescriptor make_color(double hue, double saturation, double value);

enum class StyleLabel { kAnalogous = 0, kComplementary, kTriadic, kSame, kMonochromatic, kOther };

inline constexpr std::size_t kNumStyles = 6;
inline constexpr std::array<StyleLabel, kNumStyles> kAllStyles = {
    StyleLabel::kAnalogous, StyleLabel::kComplementary, StyleLabel::kTriadic,
    StyleLabel::kSame,      StyleLabel::kMonochromatic, StyleLabel::kOther};

std::string_view to_string(StyleLabel style);
/// Case-insensitive; throws DataError on unknown names.
StyleLabel parse_style(std::string_view name);
inline std::size_t style_index(StyleLabel s) { return static_cast<std::size_t>(s); }

struct StyleRuleConfig {
  double same_hue_deg = 5.0;
  double same_sv = 0.1;
  double mono_saturation = 0.15;
  double analogous_arc_deg = 60.0;
  double cluster_tol_deg = 15.0;
};

/// Smallest angle between two hues, in [0, 180].
double hue_distance(double a, double b);

/// Color-theory rule cascade, first match wins:
///   Same          all pairwise hue gaps <= same_hue_deg and all saturation
///                 and value gaps <= same_sv
///   Monochromatic every saturation <= mono_saturation
///   Analogous     chromatic hues fit in an arc of analogous_arc_deg
///   Complementary chromatic hues form 2 clusters 180 +- cluster_tol apart
///   Triadic       chromatic hues form 3 clusters pairwise 120 +- cluster_tol
///   Other         otherwise
/// "Chromatic" means saturation > mono_saturation. Clusters come from circular
/// single linkage: consecutive sorted hues further apart than cluster_tol_deg
/// start a new cluster. Throws ContractError for fewer than two colors.
StyleLabel label_style(std::span<const ColorDescriptor> colors, const StyleRuleConfig& cfg = {});

}  // namespace ngf
