#include "tele/event_ingest.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>

#include "jsonl.hpp"
#include "tele/digest.hpp"
#include "tele/error.hpp"

namespace tele {
namespace {

using detail::json;
using detail::ordered_json;

constexpr std::string_view kEventSchema = "tele.events";
constexpr int kEventVersion = 1;

constexpr std::array<std::string_view, kEventKindCount> kKindNames{
    "ACCESS",
    "ANNOUNCEMENT",
    "MESSAGE",
    "PROGRAMME_POST",
    "CALENDAR_ENTRY",
    "FORUM_OPEN",
    "FORUM_POST",
    "ASYNC_TOOL_USE",
    "CONTENT_PUBLISH",
    "SUBMISSION_INDIVIDUAL",
    "SUBMISSION_GROUP",
    "GROUP_PROGRESS_VIEW",
    "PLAGIARISM_CHECK",
    "TEST_ATTEMPT",
};

constexpr std::array<std::string_view, 4> kCoreFields{"t", "user", "cu", "kind"};

std::size_t offset_of(std::string_view line, std::string_view field) {
  std::string quoted = "\"" + std::string(field) + "\"";
  auto pos = line.find(quoted);
  return pos == std::string_view::npos ? 0 : pos;
}

EventParseError field_error(std::string_view line, std::string field,
                            std::string message) {
  auto off = offset_of(line, field);
  return {std::move(field), off, std::move(message)};
}

ordered_json attr_to_json(const AttrValue& v) {
  return std::visit([](const auto& x) { return ordered_json(x); }, v);
}

bool by_time(const Event& a, const Event& b) { return a.timestamp < b.timestamp; }

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<EventKind> event_kind_from_string(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

bool Event::flag(std::string_view key) const {
  auto it = attrs.find(key);
  if (it == attrs.end()) return false;
  const bool* b = std::get_if<bool>(&it->second);
  return b != nullptr && *b;
}

std::optional<std::int64_t> Event::integer(std::string_view key) const {
  auto it = attrs.find(key);
  if (it == attrs.end()) return std::nullopt;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
  if (const auto* d = std::get_if<double>(&it->second)) {
    return static_cast<std::int64_t>(*d);
  }
  return std::nullopt;
}

const std::string* Event::text(std::string_view key) const {
  auto it = attrs.find(key);
  if (it == attrs.end()) return nullptr;
  return std::get_if<std::string>(&it->second);
}

std::variant<Event, EventParseError> parse_event_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    return EventParseError{"", e.byte == 0 ? 0 : e.byte - 1,
                           "malformed record"};
  }
  if (!j.is_object()) return EventParseError{"", 0, "malformed record: not an object"};

  for (auto f : kCoreFields) {
    auto it = j.find(std::string(f));
    if (it == j.end()) {
      return field_error(line, std::string(f), "missing field " + std::string(f));
    }
    if (!it->is_string()) {
      return field_error(line, std::string(f), "field " + std::string(f) + " not a string");
    }
  }

  Event e;
  try {
    e.timestamp = parse_timestamp(j["t"].get<std::string>());
  } catch (const Error& err) {
    return field_error(line, "t", err.what());
  }
  e.user_id = j["user"].get<std::string>();
  e.cu_id = j["cu"].get<std::string>();
  if (e.user_id.empty()) return field_error(line, "user", "empty user id");
  if (e.cu_id.empty()) return field_error(line, "cu", "empty cu id");
  auto kind = event_kind_from_string(j["kind"].get<std::string>());
  if (!kind) {
    return field_error(line, "kind", "unknown kind '" + j["kind"].get<std::string>() + "'");
  }
  e.kind = *kind;

  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (std::find(kCoreFields.begin(), kCoreFields.end(), key) != kCoreFields.end()) {
      continue;
    }
    const json& v = it.value();
    if (v.is_boolean()) {
      e.attrs.emplace(key, v.get<bool>());
    } else if (v.is_number_integer()) {
      e.attrs.emplace(key, v.get<std::int64_t>());
    } else if (v.is_number_float()) {
      e.attrs.emplace(key, v.get<double>());
    } else if (v.is_string()) {
      e.attrs.emplace(key, v.get<std::string>());
    } else {
      return field_error(line, key, "attr " + key + " is not a scalar");
    }
  }

  switch (e.kind) {
    case EventKind::content_publish: {
      auto it = e.attrs.find("rich");
      if (it == e.attrs.end()) return field_error(line, "rich", "missing attr rich");
      if (!std::holds_alternative<bool>(it->second)) {
        return field_error(line, "rich", "attr rich must be boolean");
      }
      break;
    }
    case EventKind::submission_individual:
    case EventKind::submission_group: {
      auto it = e.attrs.find("work_id");
      if (it == e.attrs.end()) return field_error(line, "work_id", "missing attr work_id");
      if (!std::holds_alternative<std::string>(it->second)) {
        return field_error(line, "work_id", "attr work_id must be a string");
      }
      break;
    }
    case EventKind::access: {
      auto it = e.attrs.find("mobile");
      if (it == e.attrs.end()) {
        e.attrs.emplace("mobile", false);
      } else if (!std::holds_alternative<bool>(it->second)) {
        return field_error(line, "mobile", "attr mobile must be boolean");
      }
      break;
    }
    default:
      break;
  }
  return e;
}

std::string serialize_event(const Event& e) {
  ordered_json j;
  j["t"] = format_timestamp(e.timestamp);
  j["user"] = e.user_id;
  j["cu"] = e.cu_id;
  j["kind"] = to_string(e.kind);
  for (const auto& [k, v] : e.attrs) j[k] = attr_to_json(v);
  return j.dump();
}

std::string event_log_header() {
  return detail::header_line(kEventSchema, kEventVersion);
}

std::span<const Event> EventStore::partition(std::string_view cu) const {
  auto it = partitions_.find(cu);
  if (it == partitions_.end()) return {};
  return it->second;
}

std::span<const Event> EventStore::slice(std::string_view cu,
                                         const Window& window) const {
  if (!window.valid()) {
    throw Error(Errc::validation, "inverted window " + format_window(window));
  }
  auto events = partition(cu);
  auto lo = std::lower_bound(events.begin(), events.end(), window.start,
                             [](const Event& e, Timestamp t) { return e.timestamp < t; });
  auto hi = std::lower_bound(lo, events.end(), window.end,
                             [](const Event& e, Timestamp t) { return e.timestamp < t; });
  return {lo, hi};
}

std::size_t EventStore::count(std::string_view cu, EventKind kind,
                              const Window& window) const {
  auto it = kind_index_.find(std::make_pair(std::string(cu), kind));
  if (it == kind_index_.end()) return 0;
  const auto& ts = it->second;
  auto lo = std::lower_bound(ts.begin(), ts.end(), window.start);
  auto hi = std::lower_bound(lo, ts.end(), window.end);
  return static_cast<std::size_t>(hi - lo);
}

std::vector<Event> EventStore::all() const {
  std::vector<Event> out;
  out.reserve(size_);
  for (const auto& [cu, events] : partitions_) {
    out.insert(out.end(), events.begin(), events.end());
  }
  return out;
}

std::string EventStore::digest() const {
  std::string buf;
  for (const auto& [cu, events] : partitions_) {
    for (const auto& e : events) {
      buf += serialize_event(e);
      buf += '\n';
    }
  }
  return sha256_hex(buf);
}

EventStore EventStore::from_events(std::vector<Event> events) {
  EventStore store;
  store.size_ = events.size();
  for (auto& e : events) {
    std::string cu = e.cu_id;
    store.partitions_[cu].push_back(std::move(e));
  }
  for (auto& [cu, part] : store.partitions_) {
    std::stable_sort(part.begin(), part.end(), by_time);
    for (const auto& e : part) {
      store.kind_index_[std::make_pair(cu, e.kind)].push_back(e.timestamp);
    }
  }
  return store;
}

namespace {

class Ingestor {
 public:
  Ingestor(const OrgTree& tree, const IngestOptions& options)
      : tree_(tree), options_(options) {}

  void line(std::string_view text, std::size_t line_no) {
    auto parsed = parse_event_line(text);
    if (auto* err = std::get_if<EventParseError>(&parsed)) {
      std::string reason = "malformed record";
      if (err->message.starts_with("unknown kind")) reason = "unknown kind";
      else if (err->message.starts_with("missing attr")) reason = "missing attr";
      else if (err->field == "t") reason = "bad timestamp";
      rejects_.push_back({line_no, reason,
                          err->message + " (field '" + err->field + "', byte " +
                              std::to_string(err->byte_offset) + ")"});
      return;
    }
    auto& e = std::get<Event>(parsed);
    if (!options_.accepted.contains(e.timestamp)) {
      rejects_.push_back({line_no, "timestamp out of range", format_timestamp(e.timestamp)});
      return;
    }
    const CourseUnit* cu = tree_.find_course_unit(e.cu_id);
    if (cu == nullptr) {
      rejects_.push_back({line_no, "unknown cu", e.cu_id});
      return;
    }
    if (!cu->has_member(e.user_id)) {
      rejects_.push_back({line_no, "not a member", e.user_id + " in " + e.cu_id});
      return;
    }
    events_.push_back(std::move(e));
  }

  IngestResult finish(bool complete, std::string failure) {
    IngestResult r{EventStore::from_events(std::move(events_)), std::move(rejects_),
                   complete, std::move(failure)};
    return r;
  }

 private:
  const OrgTree& tree_;
  const IngestOptions& options_;
  std::vector<Event> events_;
  std::vector<Reject> rejects_;
};

}  // namespace

IngestResult ingest_events(std::istream& in, const OrgTree& tree,
                           const IngestOptions& options) {
  std::size_t line_no = 0;
  detail::expect_header(in, kEventSchema, kEventVersion, line_no);
  Ingestor ing(tree, options);
  std::string line;
  try {
    while (detail::next_line(in, line, line_no)) ing.line(line, line_no);
  } catch (const Error& e) {
    if (e.code() != Errc::io) throw;
    return ing.finish(false, e.what());
  }
  return ing.finish(true, {});
}

IngestResult ingest_event_lines(std::span<const std::string> lines,
                                const OrgTree& tree, const IngestOptions& options) {
  Ingestor ing(tree, options);
  std::size_t line_no = 0;
  for (const auto& l : lines) {
    ++line_no;
    if (l.find_first_not_of(" \t\r") == std::string::npos) continue;
    ing.line(l, line_no);
  }
  return ing.finish(true, {});
}

std::span<const Event> slice_window(const EventStore& store, const OrgTree& tree,
                                    std::string_view cu, const Window& window) {
  if (!window.valid()) {
    throw Error(Errc::validation, "inverted window " + format_window(window));
  }
  tree.course_unit(cu);
  return store.slice(cu, window);
}

void write_event_log(std::ostream& out, std::span<const Event> events) {
  out << event_log_header() << '\n';
  for (const auto& e : events) out << serialize_event(e) << '\n';
}

void write_rejects(std::ostream& out, std::span<const Reject> rejects) {
  out << detail::header_line("tele.rejects", 1) << '\n';
  for (const auto& r : rejects) {
    ordered_json j;
    j["line"] = r.line;
    j["reason"] = r.reason;
    j["detail"] = r.detail;
    out << j.dump() << '\n';
  }
}

}  // namespace tele
