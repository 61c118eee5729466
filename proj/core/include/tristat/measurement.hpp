#pragma once

#include <optional>
#include <string>

#include "tristat/colorspace.hpp"

namespace tristat {

/// One row of a measurement campaign. (panel_id, color_id, brightness,
/// repeat_index) is unique within a dataset.
struct MeasurementRecord {
  std::string panel_id;
  std::string color_id;
  double brightness = 1.0;
  int repeat_index = 0;
  std::optional<double> timestamp;
  Tristimulus xyz;
};

}  // namespace tristat
