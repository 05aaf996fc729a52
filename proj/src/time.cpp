#include "tele/time.hpp"

#include <charconv>
#include <cstdio>

#include "tele/error.hpp"

namespace tele {
namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t width,
              int& out) {
  if (pos + width > text.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto [ptr, ec] =
      std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return ec == std::errc{};
}

[[noreturn]] void bad(std::string_view what, std::string_view text) {
  throw Error(Errc::parse,
              std::string("bad ") + std::string(what) + " '" +
                  std::string(text) + "'");
}

Timestamp date_part(std::string_view text, std::string_view what) {
  int y = 0, m = 0, d = 0;
  if (text.size() < 10 || !read_int(text, 0, 4, y) || text[4] != '-' ||
      !read_int(text, 5, 2, m) || text[7] != '-' || !read_int(text, 8, 2, d)) {
    bad(what, text);
  }
  std::chrono::year_month_day ymd{std::chrono::year{y},
                                  std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) bad(what, text);
  return std::chrono::sys_days{ymd};
}

}  // namespace

double Window::weeks() const noexcept {
  return static_cast<double>(length().count()) / (7.0 * 24 * 3600);
}

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour,
                         int minute, int second) {
  std::chrono::sys_days days{std::chrono::year{year} / std::chrono::month{month} /
                             std::chrono::day{day}};
  return days + std::chrono::hours{hour} + std::chrono::minutes{minute} +
         std::chrono::seconds{second};
}

Timestamp parse_date(std::string_view text) {
  if (text.size() != 10) bad("date", text);
  return date_part(text, "date");
}

Timestamp parse_timestamp(std::string_view text) {
  Timestamp day = date_part(text, "timestamp");
  int hh = 0, mm = 0, ss = 0;
  if (text.size() < 19 || text[10] != 'T' || !read_int(text, 11, 2, hh) ||
      text[13] != ':' || !read_int(text, 14, 2, mm) || text[16] != ':' ||
      !read_int(text, 17, 2, ss) || hh > 23 || mm > 59 || ss > 59) {
    bad("timestamp", text);
  }
  Timestamp t = day + std::chrono::hours{hh} + std::chrono::minutes{mm} +
                std::chrono::seconds{ss};
  std::string_view zone = text.substr(19);
  if (zone == "Z") return t;
  int oh = 0, om = 0;
  if (zone.size() != 6 || (zone[0] != '+' && zone[0] != '-') ||
      !read_int(zone, 1, 2, oh) || zone[3] != ':' || !read_int(zone, 4, 2, om) ||
      oh > 23 || om > 59) {
    bad("timestamp", text);
  }
  auto offset = std::chrono::hours{oh} + std::chrono::minutes{om};
  return zone[0] == '+' ? t - offset : t + offset;
}

std::string format_timestamp(Timestamp t) {
  auto days = std::chrono::floor<std::chrono::days>(t);
  std::chrono::year_month_day ymd{days};
  std::chrono::hh_mm_ss hms{t - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Window parse_window(std::string_view text) {
  auto sep = text.find("..");
  if (sep == std::string_view::npos) bad("window", text);
  auto side = [&](std::string_view s) {
    return s.size() == 10 ? parse_date(s) : parse_timestamp(s);
  };
  Window w{side(text.substr(0, sep)), side(text.substr(sep + 2))};
  if (!w.valid()) {
    throw Error(Errc::validation,
                "inverted window '" + std::string(text) + "'");
  }
  return w;
}

std::string format_window(const Window& w) {
  auto midnight = [](Timestamp t) {
    return t == std::chrono::floor<std::chrono::days>(t);
  };
  if (midnight(w.start) && midnight(w.end)) {
    return format_timestamp(w.start).substr(0, 10) + ".." +
           format_timestamp(w.end).substr(0, 10);
  }
  return format_timestamp(w.start) + ".." + format_timestamp(w.end);
}

}  // namespace tele
