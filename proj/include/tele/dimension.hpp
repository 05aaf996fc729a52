#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace tele {

/// The seven TELE dimensions, in the fixed axis order used by every output.
enum class Dimension : std::size_t {
  dynamics,
  information,
  synchronous,
  asynchronous,
  content,
  delivery,
  evaluation,
};

inline constexpr std::size_t kDimensionCount = 7;

inline constexpr std::array<Dimension, kDimensionCount> kDimensions{
    Dimension::dynamics,     Dimension::information, Dimension::synchronous,
    Dimension::asynchronous, Dimension::content,     Dimension::delivery,
    Dimension::evaluation,
};

template <class T>
using PerDimension = std::array<T, kDimensionCount>;

constexpr std::size_t index_of(Dimension d) noexcept {
  return static_cast<std::size_t>(d);
}

std::string_view to_string(Dimension d) noexcept;
std::optional<Dimension> dimension_from_string(std::string_view name) noexcept;

}  // namespace tele
