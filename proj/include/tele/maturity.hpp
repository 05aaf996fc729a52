#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tele/dimension.hpp"
#include "tele/metrics.hpp"
#include "tele/time.hpp"

namespace tele {

/// Integration level of the LCMS in teaching and learning.
enum class Level : int {
  entry = 1,
  adoption = 2,
  adaptation = 3,
  immersion = 4,
  transformation = 5,
};

std::string_view to_string(Level level) noexcept;  // "Entry" ... "Transformation"
constexpr int value_of(Level level) noexcept { return static_cast<int>(level); }
/// Throws Error(invalid_argument) outside 1..5.
Level level_from_value(int value);

/// Four strictly increasing cut points c1 < c2 < c3 < c4.
using Cuts = std::array<double, 4>;

/// Unvalidated threshold configuration as read from a file.
struct ThresholdSpec {
  std::optional<int> version;
  std::string label;
  std::map<std::string, std::vector<double>> dimensions;
};

/// Validated per-dimension cut points.
struct ThresholdConfig {
  int version = 1;
  std::string label;
  PerDimension<Cuts> cuts{};

  const Cuts& operator[](Dimension d) const noexcept { return cuts[index_of(d)]; }
};

/// Every violation found, one message each; empty means valid.
std::vector<std::string> validate_thresholds(const ThresholdSpec& spec);
/// Throws Error(validation) carrying all violations.
ThresholdConfig make_thresholds(const ThresholdSpec& spec);

/// Shipped defaults. Illustrative and institution-tunable; nothing in them
/// is a measured value.
ThresholdConfig default_thresholds();
ThresholdSpec to_spec(const ThresholdConfig& config);

/// Parses the threshold file (JSON object with "version" and "dimensions").
/// Throws Error(parse) on bad syntax; does not validate.
ThresholdSpec read_threshold_spec(std::istream& in);
void write_thresholds(std::ostream& out, const ThresholdConfig& config);
ThresholdConfig load_thresholds(const std::string& path);

/// Empty when cuts are valid, otherwise the reason.
std::optional<std::string> check_cuts(const Cuts& cuts);

/// Lower-inclusive step function: Entry below c1, Transformation at or
/// above c4. Throws Error(validation) on invalid cuts.
Level classify(double value, const Cuts& cuts);

/// Unweighted mean of exactly seven levels. Throws Error(invalid_argument)
/// on any other arity.
double composite_score(std::span<const Level> levels);

struct LevelProfile {
  std::string cu_id;
  Window window;
  PerDimension<Level> levels{};
  double composite = 1.0;

  Level operator[](Dimension d) const noexcept { return levels[index_of(d)]; }
  bool operator==(const LevelProfile&) const = default;
};

LevelProfile profile_levels(const DimensionProfile& profile,
                            const ThresholdConfig& config);

void write_level_profiles(std::ostream& out, std::span<const LevelProfile> levels);
std::vector<LevelProfile> read_level_profiles(std::istream& in);

}  // namespace tele
