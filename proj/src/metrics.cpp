#include "tele/metrics.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "jsonl.hpp"
#include "tele/error.hpp"

namespace tele {
namespace {

using detail::json;
using detail::ordered_json;

constexpr std::string_view kProfileSchema = "tele.profiles";
constexpr int kProfileVersion = 1;

std::int64_t count_kind(std::span<const Event> events, EventKind kind) {
  return std::count_if(events.begin(), events.end(),
                       [kind](const Event& e) { return e.kind == kind; });
}

int distinct_kinds(std::span<const Event> events, std::span<const EventKind> kinds) {
  int used = 0;
  for (auto k : kinds) {
    if (std::any_of(events.begin(), events.end(),
                    [k](const Event& e) { return e.kind == k; })) {
      ++used;
    }
  }
  return used;
}

}  // namespace

double DimensionProfile::scalar(Dimension d) const noexcept {
  switch (d) {
    case Dimension::dynamics: return access_dynamics;
    case Dimension::information: return information_presence;
    case Dimension::synchronous: return sync_posts_per_active_user;
    case Dimension::asynchronous: return async_user_pct;
    case Dimension::content: return static_cast<double>(rich_content_count);
    case Dimension::delivery: return work_delivery_features;
    case Dimension::evaluation: return static_cast<double>(evaluation_test_count);
  }
  return 0.0;
}

std::int64_t active_users(std::span<const Event> events) {
  std::set<std::string_view> users;
  for (const auto& e : events) {
    if (e.kind == EventKind::access) users.insert(e.user_id);
  }
  return static_cast<std::int64_t>(users.size());
}

double access_dynamics(std::span<const Event> events, const Window& window) {
  if (!window.valid()) {
    throw Error(Errc::validation, "zero-length or inverted window " + format_window(window));
  }
  auto active = active_users(events);
  if (active == 0) return 0.0;
  auto hits = count_kind(events, EventKind::access);
  return static_cast<double>(hits) / window.weeks() / static_cast<double>(active);
}

int information_presence(std::span<const Event> events) {
  static constexpr std::array kinds{EventKind::announcement, EventKind::message,
                                    EventKind::programme_post, EventKind::calendar_entry};
  return distinct_kinds(events, kinds);
}

SyncComm sync_comm(std::span<const Event> events) {
  SyncComm out;
  out.forums_open = count_kind(events, EventKind::forum_open);
  auto active = active_users(events);
  if (active > 0) {
    out.posts_per_active_user =
        static_cast<double>(count_kind(events, EventKind::forum_post)) /
        static_cast<double>(active);
  }
  return out;
}

double async_comm(std::span<const Event> events, const CourseUnit& cu) {
  auto population = cu.population();
  if (population == 0) return 0.0;
  std::set<std::string_view> users;
  for (const auto& e : events) {
    if (e.kind == EventKind::async_tool_use && cu.has_member(e.user_id)) {
      users.insert(e.user_id);
    }
  }
  return 100.0 * static_cast<double>(users.size()) / static_cast<double>(population);
}

std::int64_t rich_content(std::span<const Event> events) {
  return std::count_if(events.begin(), events.end(), [](const Event& e) {
    return e.kind == EventKind::content_publish && e.flag("rich");
  });
}

int work_delivery(std::span<const Event> events) {
  static constexpr std::array kinds{EventKind::submission_individual,
                                    EventKind::submission_group,
                                    EventKind::group_progress_view,
                                    EventKind::plagiarism_check};
  return distinct_kinds(events, kinds);
}

std::int64_t evaluation_tests(std::span<const Event> events) {
  return count_kind(events, EventKind::test_attempt);
}

DimensionProfile dimension_profile(const EventStore& store, const OrgTree& tree,
                                   std::string_view cu_id, const Window& window) {
  const CourseUnit& cu = tree.course_unit(cu_id);
  auto events = slice_window(store, tree, cu_id, window);

  DimensionProfile p;
  p.cu_id = cu.id;
  p.window = window;
  p.active_user_count = active_users(events);
  p.no_activity = p.active_user_count == 0;
  p.access_dynamics = access_dynamics(events, window);
  p.information_presence = information_presence(events);
  auto sync = sync_comm(events);
  p.sync_forums_open = sync.forums_open;
  p.sync_posts_per_active_user = sync.posts_per_active_user;
  p.async_user_pct = p.no_activity ? 0.0 : async_comm(events, cu);
  p.rich_content_count = rich_content(events);
  p.work_delivery_features = work_delivery(events);
  p.evaluation_test_count = evaluation_tests(events);
  return p;
}

std::vector<DimensionProfile> compute_profiles(const EventStore& store,
                                               const OrgTree& tree,
                                               std::span<const Window> windows) {
  std::vector<DimensionProfile> out;
  out.reserve(tree.course_units().size() * windows.size());
  for (const auto& [id, cu] : tree.course_units()) {
    for (const auto& w : windows) out.push_back(dimension_profile(store, tree, id, w));
  }
  return out;
}

void write_profiles(std::ostream& out, std::span<const DimensionProfile> profiles) {
  out << detail::header_line(kProfileSchema, kProfileVersion) << '\n';
  for (const auto& p : profiles) {
    ordered_json j;
    j["cu"] = p.cu_id;
    j["window"] = format_window(p.window);
    j["active_users"] = p.active_user_count;
    j["no_activity"] = p.no_activity;
    j["access_dynamics"] = p.access_dynamics;
    j["information_presence"] = p.information_presence;
    j["sync_forums_open"] = p.sync_forums_open;
    j["sync_posts_per_active_user"] = p.sync_posts_per_active_user;
    j["async_user_pct"] = p.async_user_pct;
    j["rich_content_count"] = p.rich_content_count;
    j["work_delivery_features"] = p.work_delivery_features;
    j["evaluation_test_count"] = p.evaluation_test_count;
    out << j.dump() << '\n';
  }
}

std::vector<DimensionProfile> read_profiles(std::istream& in) {
  std::size_t line_no = 0;
  detail::expect_header(in, kProfileSchema, kProfileVersion, line_no);
  std::vector<DimensionProfile> out;
  std::string line;
  while (detail::next_line(in, line, line_no)) {
    json j = detail::parse_json_line(line, line_no);
    try {
      DimensionProfile p;
      p.cu_id = j.at("cu").get<std::string>();
      p.window = parse_window(j.at("window").get<std::string>());
      p.active_user_count = j.at("active_users").get<std::int64_t>();
      p.no_activity = j.at("no_activity").get<bool>();
      p.access_dynamics = j.at("access_dynamics").get<double>();
      p.information_presence = j.at("information_presence").get<int>();
      p.sync_forums_open = j.at("sync_forums_open").get<std::int64_t>();
      p.sync_posts_per_active_user = j.at("sync_posts_per_active_user").get<double>();
      p.async_user_pct = j.at("async_user_pct").get<double>();
      p.rich_content_count = j.at("rich_content_count").get<std::int64_t>();
      p.work_delivery_features = j.at("work_delivery_features").get<int>();
      p.evaluation_test_count = j.at("evaluation_test_count").get<std::int64_t>();
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw Error(Errc::parse, detail::line_prefix(line_no) + e.what());
    }
  }
  return out;
}

}  // namespace tele
