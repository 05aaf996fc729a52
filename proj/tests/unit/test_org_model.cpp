#include <doctest.h>

#include <random>
#include <sstream>

#include "support/fixtures.hpp"
#include "tele/error.hpp"
#include "tele/org_model.hpp"
#include "tele/time.hpp"

using namespace tele;

namespace {

std::string validation_message(const std::vector<OrgRecord>& records) {
  try {
    build_org_tree(records);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::validation);
    return e.what();
  }
  return "";
}

std::vector<OrgRecord> minimal() {
  return {NodeRecord{NodeKind::university, "U", "Uni", ""},
          NodeRecord{NodeKind::school, "S", "School", "U"},
          NodeRecord{NodeKind::department, "D", "Dept", "S"},
          NodeRecord{NodeKind::course_unit, "C", "CU", "D"}};
}

}  // namespace

TEST_CASE("timestamps and windows") {
  CHECK(format_timestamp(parse_timestamp("2011-10-17T09:00:00Z")) == "2011-10-17T09:00:00Z");
  CHECK(parse_timestamp("2011-10-17T10:30:00+01:30") == parse_timestamp("2011-10-17T09:00:00Z"));
  CHECK(parse_timestamp("2011-10-16T23:00:00-10:00") == parse_timestamp("2011-10-17T09:00:00Z"));
  CHECK_THROWS_AS(parse_timestamp("2011-13-01T00:00:00Z"), Error);
  CHECK_THROWS_AS(parse_timestamp("2011-10-17 09:00:00"), Error);

  Window w = parse_window("2011-10-17..2011-11-14");
  CHECK(w.weeks() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(format_window(w) == "2011-10-17..2011-11-14");
  CHECK(w.contains(w.start));
  CHECK_FALSE(w.contains(w.end));

  try {
    parse_window("2011-11-14..2011-10-17");
    FAIL("inverted window accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::validation);
  }
  try {
    parse_window("2011-10-17");
    FAIL("window without separator accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse);
  }
  Window t = parse_window("2011-10-17T08:00:00Z..2011-10-17T09:30:00Z");
  CHECK(format_window(t) == "2011-10-17T08:00:00Z..2011-10-17T09:30:00Z");
}

TEST_CASE("minimal tree has four levels") {
  OrgTree tree = build_org_tree(minimal());
  CHECK(tree.node_count() == 4);
  CHECK(tree.height() == 4);
  CHECK(tree.root_id() == "U");
  CHECK(tree.descendant_cus("C") == std::set<std::string>{"C"});
  CHECK(tree.descendant_cus("U") == std::set<std::string>{"C"});
  CHECK(tree.course_unit("C").no_enrollment());
}

TEST_CASE("structural violations are named") {
  auto r = minimal();
  r.push_back(NodeRecord{NodeKind::course_unit, "C2", "CU", "S"});
  CHECK(validation_message(r).find("wrong parent kind") != std::string::npos);

  r = minimal();
  r.push_back(NodeRecord{NodeKind::course_unit, "C2", "CU", ""});
  CHECK(validation_message(r).find("CU without department") != std::string::npos);

  r = minimal();
  r.push_back(NodeRecord{NodeKind::course_unit, "C", "dup", "D"});
  CHECK(validation_message(r).find("duplicate") != std::string::npos);

  r = minimal();
  r.push_back(NodeRecord{NodeKind::department, "D2", "Dept", "NOPE"});
  CHECK(validation_message(r).find("dangling parent_id") != std::string::npos);

  r = minimal();
  r.push_back(NodeRecord{NodeKind::university, "U2", "Other", ""});
  CHECK_FALSE(validation_message(r).empty());

  // A two-node loop hanging off nothing.
  r = minimal();
  r.push_back(NodeRecord{NodeKind::department, "DX", "x", "SX"});
  r.push_back(NodeRecord{NodeKind::school, "SX", "x", "DX"});
  CHECK(validation_message(r).find("cycle detected") != std::string::npos);

  r = minimal();
  r.push_back(MembershipRecord{"C", "p1", MemberRole::teacher});
  r.push_back(MembershipRecord{"C", "p1", MemberRole::student});
  CHECK(validation_message(r).find("both teacher and student") != std::string::npos);

  r = minimal();
  r.push_back(MembershipRecord{"ZZ", "p1", MemberRole::student});
  CHECK(validation_message(r).find("unknown cu") != std::string::npos);

  r = minimal();
  r.push_back(TeacherRecord{"T", "Idle", {}});
  CHECK(validation_message(r).find("teacher without school") != std::string::npos);
}

TEST_CASE("teacher across two schools") {
  // 2 schools, 3 departments, 10 CUs; T teaches in both schools.
  std::vector<OrgRecord> r{NodeRecord{NodeKind::university, "U", "U", ""},
                           NodeRecord{NodeKind::school, "S1", "S1", "U"},
                           NodeRecord{NodeKind::school, "S2", "S2", "U"},
                           NodeRecord{NodeKind::department, "D1", "D1", "S1"},
                           NodeRecord{NodeKind::department, "D2", "D2", "S1"},
                           NodeRecord{NodeKind::department, "D3", "D3", "S2"}};
  const char* depts[] = {"D1", "D1", "D1", "D2", "D2", "D2", "D3", "D3", "D3", "D3"};
  for (int i = 0; i < 10; ++i) {
    r.push_back(NodeRecord{NodeKind::course_unit, "C" + std::to_string(i), "cu", depts[i]});
  }
  r.push_back(MembershipRecord{"C0", "T", MemberRole::teacher});
  r.push_back(MembershipRecord{"C9", "T", MemberRole::teacher});
  OrgTree tree = build_org_tree(r);
  CHECK(tree.teachers().at("T").school_ids.size() == 2);
  CHECK(tree.cus_taught_by("T") == std::set<std::string>{"C0", "C9"});

  // Traversal oracle: walk parent links from each CU.
  for (const auto& id : tree.preorder()) {
    std::set<std::string> expected;
    for (const auto& [cu, unit] : tree.course_units()) {
      for (std::string cur = cu; !cur.empty(); cur = tree.node(cur).parent_id) {
        if (cur == id) expected.insert(cu);
      }
    }
    CHECK(tree.descendant_cus(id) == expected);
  }
  CHECK(tree.descendant_cus("S1") == std::set<std::string>{"C0", "C1", "C2", "C3", "C4", "C5"});
}

TEST_CASE("org records round-trip through the file format") {
  auto records = testing::access_fixture();
  OrgTree tree = build_org_tree(records);
  std::stringstream s;
  write_org_records(s, tree.to_records());
  OrgTree again = build_org_tree(read_org_records(s));
  CHECK(again == tree);

  std::stringstream bad("{\"schema\":\"tele.org\",\"version\":1}\n{\"kind\":\"planet\",\"id\":\"x\"}\n");
  CHECK_THROWS_AS(read_org_records(bad), Error);
  std::stringstream noheader("{\"kind\":\"university\",\"id\":\"U\",\"name\":\"U\"}\n");
  CHECK_THROWS_AS(read_org_records(noheader), Error);
}

TEST_CASE("empty department has no descendants") {
  OrgTree tree = build_org_tree(testing::access_fixture());
  CHECK(tree.descendant_cus("D32").empty());
  CHECK(tree.descendant_cus("S3").size() == 5);
  CHECK(tree.descendant_cus("U").size() == 20);
  CHECK(tree.is_within("C03", "S1"));
  CHECK_FALSE(tree.is_within("C08", "S1"));
  CHECK(tree.nodes_under("S2", NodeKind::course_unit).size() == 8);
}
