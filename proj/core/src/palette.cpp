#include "tristat/palette.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <tuple>

#include "tristat/error.hpp"

namespace tristat {

Primaries Primaries::Rec709() {
  return {Vec3(41.24564, 21.26729, 1.93339), Vec3(35.75761, 71.51522, 11.91920),
          Vec3(18.04375, 7.21750, 95.03041)};
}

Tristimulus Primaries::Mix(double r, double g, double b) const {
  return Tristimulus::FromVector(r * red + g * green + b * blue);
}

std::vector<ColorSpec> standard_palette(std::size_t count, const Primaries& primaries) {
  if (count > kMaxPaletteSize) {
    throw ValidationError("standard palette holds at most " +
                          std::to_string(kMaxPaletteSize) + " colors");
  }
  constexpr int kLevels = 6;
  using Drive = std::tuple<int, int, int>;
  const std::array<std::pair<const char*, Drive>, 7> named = {{
      {"red", {kLevels, 0, 0}},
      {"green", {0, kLevels, 0}},
      {"blue", {0, 0, kLevels}},
      {"white", {kLevels, kLevels, kLevels}},
      {"cyan", {0, kLevels, kLevels}},
      {"magenta", {kLevels, 0, kLevels}},
      {"yellow", {kLevels, kLevels, 0}},
  }};

  std::vector<ColorSpec> out;
  out.reserve(count);
  std::set<Drive> used;
  auto push = [&](std::string id, const Drive& d) {
    const auto [r, g, b] = d;
    out.push_back({std::move(id), primaries.Mix(r / double(kLevels), g / double(kLevels),
                                                b / double(kLevels))});
    used.insert(d);
  };

  for (const auto& [name, drive] : named) {
    if (out.size() == count) return out;
    push(name, drive);
  }
  // Brightest mixtures first so that small palettes stay well exposed.
  std::vector<Drive> grid;
  for (int r = 0; r <= kLevels; ++r)
    for (int g = 0; g <= kLevels; ++g)
      for (int b = 0; b <= kLevels; ++b)
        if (r + g + b > 0 && !used.contains({r, g, b})) grid.emplace_back(r, g, b);
  std::stable_sort(grid.begin(), grid.end(), [](const Drive& x, const Drive& y) {
    const auto [xr, xg, xb] = x;
    const auto [yr, yg, yb] = y;
    return xr + xg + xb > yr + yg + yb;
  });
  for (const Drive& d : grid) {
    if (out.size() == count) break;
    const auto [r, g, b] = d;
    push("rgb" + std::to_string(r) + std::to_string(g) + std::to_string(b), d);
  }
  return out;
}

const ColorSpec& find_color(std::span<const ColorSpec> palette, const std::string& id) {
  const auto it = std::find_if(palette.begin(), palette.end(),
                               [&](const ColorSpec& c) { return c.id == id; });
  if (it == palette.end()) throw ValidationError("unknown color id '" + id + "'");
  return *it;
}

}  // namespace tristat
