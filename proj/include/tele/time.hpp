#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace tele {

/// UTC instant at second resolution.
using Timestamp = std::chrono::sys_seconds;

/// Half-open UTC interval [start, end).
struct Window {
  Timestamp start;
  Timestamp end;

  bool contains(Timestamp t) const noexcept { return start <= t && t < end; }
  std::chrono::seconds length() const noexcept { return end - start; }
  double weeks() const noexcept;
  bool valid() const noexcept { return start < end; }

  auto operator<=>(const Window&) const = default;
};

/// Accepts "YYYY-MM-DDTHH:MM:SS" followed by "Z" or a "+HH:MM"/"-HH:MM"
/// offset; the result is normalized to UTC. Throws Error(parse).
Timestamp parse_timestamp(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);

/// "YYYY-MM-DD" at 00:00:00 UTC. Throws Error(parse).
Timestamp parse_date(std::string_view text);

/// "A..B" where each side is a date or a full timestamp. Throws Error(parse)
/// on bad syntax and Error(validation) when start >= end.
Window parse_window(std::string_view text);

/// Inverse of parse_window; dates are used when both ends sit on midnight.
std::string format_window(const Window& w);

Timestamp make_timestamp(int year, unsigned month, unsigned day,
                         int hour = 0, int minute = 0, int second = 0);

}  // namespace tele
