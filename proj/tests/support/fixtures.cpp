#include "fixtures.hpp"

#include <cstdio>

namespace tele::testing {

Event make_event(const std::string& t, const std::string& user, const std::string& cu,
                 EventKind kind, Attrs attrs) {
  if (kind == EventKind::access && !attrs.contains("mobile")) attrs.emplace("mobile", false);
  return Event{parse_timestamp(t), user, cu, kind, std::move(attrs)};
}

BusyCu busy_cu() {
  BusyCu b;
  b.org = {
      NodeRecord{NodeKind::university, "U", "University", ""},
      NodeRecord{NodeKind::school, "S1", "School", "U"},
      NodeRecord{NodeKind::department, "D1", "Department", "S1"},
      NodeRecord{NodeKind::course_unit, "BUSY", "Busy CU", "D1"},
      MembershipRecord{"BUSY", "t1", MemberRole::teacher},
  };
  for (int i = 1; i <= 9; ++i) {
    b.org.push_back(MembershipRecord{"BUSY", "s" + std::to_string(i), MemberRole::student});
  }
  b.window = parse_window("2011-10-17..2011-10-31");

  auto& ev = b.events;
  auto add = [&](const char* t, const char* user, EventKind kind, Attrs attrs = {}) {
    ev.push_back(make_event(t, user, "BUSY", kind, std::move(attrs)));
  };
  // 16 hits by 6 users: t1 x4, s1 x4, s2 x3, s3 x2, s4 x2, s5 x1.
  add("2011-10-17T08:00:00Z", "t1", EventKind::access);
  add("2011-10-18T08:00:00Z", "t1", EventKind::access);
  add("2011-10-24T08:00:00Z", "t1", EventKind::access);
  add("2011-10-30T23:59:59Z", "t1", EventKind::access);
  add("2011-10-17T10:00:00Z", "s1", EventKind::access, {{"mobile", true}});
  add("2011-10-19T10:00:00Z", "s1", EventKind::access);
  add("2011-10-21T10:00:00Z", "s1", EventKind::access);
  add("2011-10-28T10:00:00Z", "s1", EventKind::access);
  add("2011-10-17T11:00:00Z", "s2", EventKind::access);
  add("2011-10-20T11:00:00Z", "s2", EventKind::access);
  add("2011-10-27T11:00:00Z", "s2", EventKind::access);
  add("2011-10-18T12:00:00Z", "s3", EventKind::access);
  add("2011-10-25T12:00:00Z", "s3", EventKind::access);
  add("2011-10-19T13:00:00Z", "s4", EventKind::access);
  add("2011-10-26T13:00:00Z", "s4", EventKind::access);
  add("2011-10-22T14:00:00Z", "s5", EventKind::access, {{"mobile", true}});
  // Information: two announcements, a programme post, a calendar entry.
  add("2011-10-17T08:05:00Z", "t1", EventKind::announcement);
  add("2011-10-24T08:05:00Z", "t1", EventKind::announcement);
  add("2011-10-17T08:10:00Z", "t1", EventKind::programme_post);
  add("2011-10-18T08:10:00Z", "t1", EventKind::calendar_entry);
  // Forums: two opened, six posts.
  add("2011-10-17T08:20:00Z", "t1", EventKind::forum_open, {{"forum_id", "f1"}});
  add("2011-10-24T08:20:00Z", "t1", EventKind::forum_open, {{"forum_id", "f2"}});
  add("2011-10-17T10:30:00Z", "s1", EventKind::forum_post, {{"forum_id", "f1"}});
  add("2011-10-17T11:30:00Z", "s2", EventKind::forum_post, {{"forum_id", "f1"}});
  add("2011-10-18T12:30:00Z", "s3", EventKind::forum_post, {{"forum_id", "f1"}});
  add("2011-10-24T09:00:00Z", "t1", EventKind::forum_post, {{"forum_id", "f2"}});
  add("2011-10-25T12:30:00Z", "s3", EventKind::forum_post, {{"forum_id", "f2"}});
  add("2011-10-28T10:30:00Z", "s1", EventKind::forum_post, {{"forum_id", "f2"}});
  // Async tools: s1 twice, s2, t1.
  add("2011-10-19T10:15:00Z", "s1", EventKind::async_tool_use);
  add("2011-10-21T10:15:00Z", "s1", EventKind::async_tool_use);
  add("2011-10-20T11:15:00Z", "s2", EventKind::async_tool_use);
  add("2011-10-18T08:15:00Z", "t1", EventKind::async_tool_use);
  // Content: two rich, one plain.
  add("2011-10-17T08:30:00Z", "t1", EventKind::content_publish, {{"rich", true}});
  add("2011-10-24T08:30:00Z", "t1", EventKind::content_publish, {{"rich", true}});
  add("2011-10-25T08:30:00Z", "t1", EventKind::content_publish, {{"rich", false}});
  // Delivery: two individual submissions and a plagiarism check.
  add("2011-10-27T11:20:00Z", "s2", EventKind::submission_individual, {{"work_id", "w1"}});
  add("2011-10-28T10:40:00Z", "s1", EventKind::submission_individual, {{"work_id", "w1"}});
  add("2011-10-29T09:00:00Z", "t1", EventKind::plagiarism_check);
  // Evaluation: two test attempts.
  add("2011-10-26T13:10:00Z", "s4", EventKind::test_attempt, {{"test_id", "q1"}});
  add("2011-10-22T14:10:00Z", "s5", EventKind::test_attempt, {{"test_id", "q1"}});
  return b;
}

std::vector<OrgRecord> access_fixture() {
  std::vector<OrgRecord> r{NodeRecord{NodeKind::university, "U", "University", ""}};
  const std::vector<std::pair<std::string, std::vector<std::pair<std::string, int>>>> layout{
      {"S1", {{"D11", 4}, {"D12", 3}}},
      {"S2", {{"D21", 4}, {"D22", 4}}},
      {"S3", {{"D31", 5}, {"D32", 0}}},
  };
  int cu = 0;
  for (const auto& [school, depts] : layout) {
    r.push_back(NodeRecord{NodeKind::school, school, "School " + school, "U"});
    for (const auto& [dept, n] : depts) {
      r.push_back(NodeRecord{NodeKind::department, dept, "Department " + dept, school});
      for (int i = 0; i < n; ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "C%02d", ++cu);
        r.push_back(NodeRecord{NodeKind::course_unit, id, id, dept});
      }
    }
  }
  auto teach = [&](const std::string& t, std::vector<int> cus) {
    for (int c : cus) {
      char id[16];
      std::snprintf(id, sizeof id, "C%02d", c);
      r.push_back(MembershipRecord{id, t, MemberRole::teacher});
      r.push_back(MembershipRecord{id, "st" + std::to_string(c), MemberRole::student});
    }
  };
  teach("T1", {1, 2});
  teach("T2", {3, 8});
  teach("T3", {5, 6, 7});
  teach("T4", {9, 10, 11, 12, 13, 14, 15});
  teach("T5", {16, 17, 18, 19, 20});
  teach("T1", {4});
  r.push_back(TeacherRecord{"T6", "Idle teacher", {"S3"}});
  return r;
}

std::vector<Principal> access_principals(const OrgTree& tree) {
  std::vector<Principal> out;
  for (const auto& [id, t] : tree.teachers()) {
    out.push_back({"teacher:" + id, {RoleKind::teacher, id}, "", false});
  }
  for (const auto& d : tree.nodes_of_kind(NodeKind::department)) {
    out.push_back({"coord:" + d, {RoleKind::dept_coordinator, d}, "", false});
  }
  for (const auto& s : tree.nodes_of_kind(NodeKind::school)) {
    out.push_back({"director:" + s, {RoleKind::school_director, s}, "", false});
  }
  out.push_back({"quality", {RoleKind::quality_service, ""}, "", false});
  out.push_back({"direction", {RoleKind::direction, ""}, "", false});
  return out;
}

}  // namespace tele::testing
