#pragma once

#include <span>
#include <string>
#include <vector>

#include "tristat/colorspace.hpp"

namespace tristat {

/// A named display color with its population-mean XYZ at full brightness.
struct ColorSpec {
  std::string id;
  Tristimulus xyz;
};

/// Display primaries (XYZ of full red, green, blue). Mixtures are modeled
/// as linear combinations of these.
struct Primaries {
  Vec3 red;
  Vec3 green;
  Vec3 blue;

  /// Rec. 709 / D65 primaries, white at Y = 100 (to the tabulated 5 decimals).
  static Primaries Rec709();

  Tristimulus Mix(double r, double g, double b) const;
};

/// red, green, blue, white, cyan, magenta, yellow, followed by a fixed
/// enumeration of drive levels {0, 1/6, ..., 1}^3 (black excluded,
/// duplicates of the named colors skipped). Up to 342 colors.
std::vector<ColorSpec> standard_palette(std::size_t count,
                                        const Primaries& primaries = Primaries::Rec709());

inline constexpr std::size_t kMaxPaletteSize = 342;

/// Looks up a color by id, throwing ValidationError if absent.
const ColorSpec& find_color(std::span<const ColorSpec> palette, const std::string& id);

}  // namespace tristat
