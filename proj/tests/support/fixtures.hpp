#pragma once

#include <string>
#include <vector>

#include "tele/access_control.hpp"
#include "tele/event_ingest.hpp"
#include "tele/org_model.hpp"

namespace tele::testing {

// "Busy CU": one CU, teacher t1, students s1..s9, a two-week window and a
// scripted 40-event log. Hand-computed indicator values:
//   active users 6 (t1, s1..s5), hits 16 -> 16 / 2 weeks / 6 = 4/3
//   information channels: announcement, programme, calendar -> 3
//   forums opened 2, posts 6 -> 6 / 6 active = 1.0
//   async users t1, s1, s2 of population 10 -> 30.0 %
//   rich content 2 (a third publish is plain)
//   delivery classes: individual submission, plagiarism check -> 2
//   tests 2
struct BusyCu {
  std::vector<OrgRecord> org;
  std::vector<Event> events;
  Window window;
};
BusyCu busy_cu();

// Access fixture: 3 schools, 6 departments, 20 CUs.
//   S1: D11 {C01..C04}, D12 {C05..C07}
//   S2: D21 {C08..C11}, D22 {C12..C15}
//   S3: D31 {C16..C20}, D32 {} (empty)
// Teachers: T1 {C01, C02, C04}; T2 {C03, C08} (two schools); T3 {C05, C06, C07};
// T4 {C09..C15}; T5 {C16..C20}; T6 teaches nothing (school S3).
std::vector<OrgRecord> access_fixture();

/// One principal per possible role binding in the access fixture.
std::vector<Principal> access_principals(const OrgTree& tree);

Event make_event(const std::string& t, const std::string& user, const std::string& cu,
                 EventKind kind, Attrs attrs = {});

}  // namespace tele::testing
