#include "tele/dimension.hpp"

namespace tele {
namespace {
constexpr std::array<std::string_view, kDimensionCount> kNames{
    "dynamics", "information", "synchronous", "asynchronous",
    "content",  "delivery",    "evaluation",
};
}  // namespace

std::string_view to_string(Dimension d) noexcept { return kNames[index_of(d)]; }

std::optional<Dimension> dimension_from_string(std::string_view name) noexcept {
  for (auto d : kDimensions) {
    if (kNames[index_of(d)] == name) return d;
  }
  return std::nullopt;
}

}  // namespace tele
