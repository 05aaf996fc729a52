#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tele/org_model.hpp"
#include "tele/time.hpp"

namespace tele {

enum class EventKind {
  access,
  announcement,
  message,
  programme_post,
  calendar_entry,
  forum_open,
  forum_post,
  async_tool_use,
  content_publish,
  submission_individual,
  submission_group,
  group_progress_view,
  plagiarism_check,
  test_attempt,
};

inline constexpr std::size_t kEventKindCount = 14;

/// Wire names, e.g. "ACCESS", "CONTENT_PUBLISH".
std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> event_kind_from_string(std::string_view name) noexcept;

using AttrValue = std::variant<bool, std::int64_t, double, std::string>;
using Attrs = std::map<std::string, AttrValue, std::less<>>;

struct Event {
  Timestamp timestamp;
  std::string user_id;
  std::string cu_id;
  EventKind kind;
  Attrs attrs;

  bool flag(std::string_view key) const;  // false when absent or not a bool
  std::optional<std::int64_t> integer(std::string_view key) const;
  const std::string* text(std::string_view key) const;

  bool operator==(const Event&) const = default;
};

/// Structured parse failure: which field, and the byte offset when known.
struct EventParseError {
  std::string field;
  std::size_t byte_offset = 0;
  std::string message;
};

/// Parses one event record (a JSON object on a single line). Never throws
/// for bad input; returns the error instead.
std::variant<Event, EventParseError> parse_event_line(std::string_view line);

/// Canonical single-line serialization: t, user, cu, kind, then attrs in
/// key order. parse_event_line(serialize_event(e)) == e.
std::string serialize_event(const Event& e);

/// Header line every event log starts with.
std::string event_log_header();

struct IngestOptions {
  /// Accepted timestamp range (academic-year bounds), half-open.
  Window accepted{make_timestamp(1970, 1, 1), make_timestamp(2100, 1, 1)};
};

struct Reject {
  std::size_t line = 0;
  std::string reason;  // "unknown cu", "not a member", "malformed record", ...
  std::string detail;
};

/// Frozen, per-CU partitioned event store. Events within a partition are
/// sorted by timestamp (stable with respect to input order).
class EventStore {
 public:
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  /// Events of one CU in time order; empty span for CUs with no events.
  std::span<const Event> partition(std::string_view cu) const;
  const std::map<std::string, std::vector<Event>, std::less<>>& partitions()
      const noexcept {
    return partitions_;
  }

  /// Events of `cu` with start <= t < end. Throws Error(validation) on an
  /// inverted window. Unknown-CU checking is done against the org tree by
  /// the overload below.
  std::span<const Event> slice(std::string_view cu, const Window& window) const;

  /// Number of events of `kind` in the window, from the (cu, kind) index.
  std::size_t count(std::string_view cu, EventKind kind, const Window& window) const;

  /// All events, grouped by CU id then time.
  std::vector<Event> all() const;

  /// SHA-256 over the canonical serialization; identifies the snapshot.
  std::string digest() const;

  /// Assembles a store from arbitrary-order events (used by ingest and tests).
  static EventStore from_events(std::vector<Event> events);

 private:
  std::map<std::string, std::vector<Event>, std::less<>> partitions_;
  // (cu, kind) -> sorted timestamps
  std::map<std::pair<std::string, EventKind>, std::vector<Timestamp>, std::less<>>
      kind_index_;
  std::size_t size_ = 0;
};

struct IngestResult {
  EventStore store;
  std::vector<Reject> rejects;
  bool complete = true;  // false when the stream failed mid-read
  std::string failure;
};

/// Reads a full event log: header line first, then one record per line.
/// Bad lines go to the reject report. A missing or wrong header throws
/// Error(parse); a stream that becomes unreadable yields complete = false
/// with whatever was read so far.
IngestResult ingest_events(std::istream& in, const OrgTree& tree,
                           const IngestOptions& options = {});

/// Record-level variant without the header line (lines are bare records).
IngestResult ingest_event_lines(std::span<const std::string> lines,
                                const OrgTree& tree,
                                const IngestOptions& options = {});

/// Checked slice: the CU must exist in `tree`.
std::span<const Event> slice_window(const EventStore& store, const OrgTree& tree,
                                    std::string_view cu, const Window& window);

void write_event_log(std::ostream& out, std::span<const Event> events);
void write_rejects(std::ostream& out, std::span<const Reject> rejects);

}  // namespace tele
