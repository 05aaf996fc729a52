#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tele/access_control.hpp"
#include "tele/cube.hpp"
#include "tele/dimension.hpp"

namespace tele {

struct RadarSeries {
  Source source;
  std::string label;
  PerDimension<std::optional<double>> values{};  // nullopt = MISSING

  bool operator==(const RadarSeries&) const = default;
};

/// Seven axes in the fixed dimension order, up to three provenance series.
struct RadarDataset {
  std::string node_id;
  std::string node_name;
  std::string period;  // window label
  std::vector<Dimension> axes{kDimensions.begin(), kDimensions.end()};
  std::vector<RadarSeries> series;

  bool operator==(const RadarDataset&) const = default;
};

std::string_view source_label(Source s) noexcept;

/// Throws Error(validation) if the axes differ from the fixed order, a
/// value lies outside [1,5], or there are more than three series.
void validate_dataset(const RadarDataset& dataset);

/// Three series from the three sources at (node, period). The principal
/// must be allowed to see the node's aggregate (AccessDenied otherwise).
RadarDataset radar_dataset(const Cube& cube, std::string_view node, std::size_t period,
                           const Principal& principal);

struct RadarStyle {
  double size = 640.0;
  double outer_radius = 220.0;
  std::array<std::string, kSourceCount> colors{"#1f77b4", "#d62728", "#2ca02c"};
  std::string ring_color = "#b0b0b0";
  std::string axis_color = "#808080";
  std::string font_family = "sans-serif";
};

/// Standalone SVG document. Spoke i points at angle -90 + i * 360/7
/// degrees (12 o'clock, clockwise); a value v sits at radius
/// (v - 1) / 4 * outer_radius. Fully present series become a closed
/// polygon; MISSING values break a series into open polylines. Every
/// present value also gets one vertex marker. Output bytes depend only on
/// the dataset and style.
std::string render_svg(const RadarDataset& dataset, const RadarStyle& style = {});

/// Machine-readable dataset file shared with the dashboard.
std::string dataset_to_json(const RadarDataset& dataset);
RadarDataset dataset_from_json(std::string_view text);

}  // namespace tele
