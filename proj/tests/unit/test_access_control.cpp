#include <doctest.h>

#include <sstream>

#include "support/fixtures.hpp"
#include "tele/access_control.hpp"
#include "tele/digest.hpp"
#include "tele/error.hpp"

using namespace tele;
using namespace tele::testing;

namespace {

std::set<std::string> range(int from, int to) {
  std::set<std::string> out;
  for (int i = from; i <= to; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "C%02d", i);
    out.insert(buf);
  }
  return out;
}

// Visible sets written out from the fixture layout, not from the tree.
std::map<std::string, std::set<std::string>> expected_visible() {
  return {
      {"teacher:T1", {"C01", "C02", "C04"}},
      {"teacher:T2", {"C03", "C08"}},
      {"teacher:T3", range(5, 7)},
      {"teacher:T4", range(9, 15)},
      {"teacher:T5", range(16, 20)},
      {"teacher:T6", {}},
      {"coord:D11", range(1, 4)},
      {"coord:D12", range(5, 7)},
      {"coord:D21", range(8, 11)},
      {"coord:D22", range(12, 15)},
      {"coord:D31", range(16, 20)},
      {"coord:D32", {}},
      {"director:S1", range(1, 7)},
      {"director:S2", range(8, 15)},
      {"director:S3", range(16, 20)},
      {"quality", range(1, 20)},
      {"direction", range(1, 20)},
  };
}

}  // namespace

TEST_CASE("visible CU sets per role") {
  OrgTree tree = build_org_tree(access_fixture());
  auto expected = expected_visible();
  auto principals = access_principals(tree);
  CHECK(principals.size() == expected.size());
  for (const auto& p : principals) {
    CAPTURE(p.id);
    CHECK(visible_cus(p, tree) == expected.at(p.id));
  }
}

TEST_CASE("authorized queries never exceed the visible set") {
  OrgTree tree = build_org_tree(access_fixture());
  auto expected = expected_visible();
  const NodeKind kinds[] = {NodeKind::university, NodeKind::school, NodeKind::department,
                            NodeKind::course_unit};
  std::size_t granted = 0, denied = 0;
  for (const auto& p : access_principals(tree)) {
    const auto& visible = expected.at(p.id);
    for (const auto& scope : tree.preorder()) {
      for (auto g : kinds) {
        if (depth_of(g) < depth_of(tree.node(scope).kind)) continue;
        CubeQuery q;
        q.org_scope = scope;
        q.granularity = g;
        CAPTURE(p.id);
        CAPTURE(scope);
        try {
          CubeQuery out = authorize(p, q, tree);
          ++granted;
          auto nodes = query_nodes(tree, out);
          CHECK_FALSE(nodes.empty());
          for (const auto& n : nodes) {
            for (const auto& cu : tree.descendant_cus(n)) CHECK(visible.contains(cu));
          }
          // Nothing fully visible and non-empty is dropped.
          for (const auto& n : query_nodes(tree, q)) {
            auto cus = tree.descendant_cus(n);
            bool inside = !cus.empty() && std::all_of(cus.begin(), cus.end(), [&](auto& c) {
              return visible.contains(c);
            });
            if (inside) CHECK(std::find(nodes.begin(), nodes.end(), n) != nodes.end());
          }
        } catch (const AccessDenied& e) {
          ++denied;
          CHECK(e.denial().reason == "insufficient scope");
          CHECK(e.denial().scope == scope);
          for (const auto& n : query_nodes(tree, q)) {
            auto cus = tree.descendant_cus(n);
            bool inside = !cus.empty() && std::all_of(cus.begin(), cus.end(), [&](auto& c) {
              return visible.contains(c);
            });
            CHECK_FALSE(inside);
          }
        }
      }
    }
  }
  CHECK(granted > 0);
  CHECK(denied > 0);
}

TEST_CASE("mixed-scope aggregates are denied") {
  OrgTree tree = build_org_tree(access_fixture());
  auto ps = access_principals(tree);
  auto who = [&](const std::string& id) {
    return *std::find_if(ps.begin(), ps.end(), [&](const Principal& p) { return p.id == id; });
  };
  // T1 sees C01, C02, C04 but not C03: the D11 aggregate would mix.
  CubeQuery d11{"D11", NodeKind::department, {}, {}, {}, {}};
  CHECK_THROWS_AS(authorize(who("teacher:T1"), d11, tree), AccessDenied);
  CubeQuery d11_cus{"D11", NodeKind::course_unit, {}, {}, {}, {}};
  auto out = authorize(who("teacher:T1"), d11_cus, tree);
  REQUIRE(out.nodes);
  CHECK(*out.nodes == std::vector<std::string>{"C01", "C02", "C04"});

  // T2 spans two schools; neither school aggregate is allowed.
  CubeQuery schools{"U", NodeKind::school, {}, {}, {}, {}};
  CHECK_THROWS_AS(authorize(who("teacher:T2"), schools, tree), AccessDenied);

  // A director sees their school and nothing above it.
  CubeQuery uni{"U", NodeKind::university, {}, {}, {}, {}};
  CHECK_THROWS_AS(authorize(who("director:S1"), uni, tree), AccessDenied);
  auto s = authorize(who("director:S1"), schools, tree);
  CHECK(*s.nodes == std::vector<std::string>{"S1"});
  CHECK_NOTHROW(authorize(who("direction"), uni, tree));
  CHECK_FALSE(authorize(who("quality"), uni, tree).nodes.has_value());

  // T4 covers all of D22 but only part of D21.
  auto depts = authorize(who("teacher:T4"), CubeQuery{"S2", NodeKind::department, {}, {}, {}, {}}, tree);
  CHECK(*depts.nodes == std::vector<std::string>{"D22"});
}

TEST_CASE("empty department is visible only to those who manage it") {
  OrgTree tree = build_org_tree(access_fixture());
  auto ps = access_principals(tree);
  auto who = [&](const std::string& id) {
    return *std::find_if(ps.begin(), ps.end(), [&](const Principal& p) { return p.id == id; });
  };
  CubeQuery d32{"D32", NodeKind::department, {}, {}, {}, {}};
  CHECK_NOTHROW(authorize(who("coord:D32"), d32, tree));
  CHECK_NOTHROW(authorize(who("director:S3"), d32, tree));
  CHECK_THROWS_AS(authorize(who("teacher:T6"), d32, tree), AccessDenied);
  CHECK_THROWS_AS(authorize(who("teacher:T5"), d32, tree), AccessDenied);
}

TEST_CASE("malformed queries fail before any access decision") {
  OrgTree tree = build_org_tree(access_fixture());
  Principal t6{"t6", {RoleKind::teacher, "T6"}, "", false};
  try {
    authorize(t6, CubeQuery{"S1", NodeKind::university, {}, {}, {}, {}}, tree);
    FAIL("granularity above scope accepted");
  } catch (const AccessDenied&) {
    FAIL("denied instead of rejected");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_argument);
  }
  CHECK_THROWS_AS(authorize(t6, CubeQuery{"S9", NodeKind::school, {}, {}, {}, {}}, tree), Error);
  Principal ghost{"g", {RoleKind::dept_coordinator, "S1"}, "", false};
  CHECK_THROWS_AS(visible_cus(ghost, tree), Error);
}

TEST_CASE("registry authenticates by token hash") {
  OrgTree tree = build_org_tree(access_fixture());
  PrincipalRegistry reg;
  reg.add({"dir", {RoleKind::direction, ""}, sha256_hex("secret"), true});
  reg.add({"t1", {RoleKind::teacher, "T1"}, sha256_hex("t1-token"), false});
  CHECK(reg.authenticate("secret")->id == "dir");
  CHECK(reg.authenticate("t1-token")->id == "t1");
  CHECK(reg.authenticate("nope") == nullptr);
  CHECK(reg.authenticate("") == nullptr);
  CHECK_THROWS_AS(reg.add({"dir", {RoleKind::direction, ""}, "", false}), Error);
  CHECK_NOTHROW(reg.validate(tree));

  std::stringstream s;
  write_principals(s, reg);
  PrincipalRegistry back = read_principals(s);
  CHECK(back.principals().size() == 2);
  CHECK(back.authenticate("secret")->admin);
  CHECK_FALSE(back.authenticate("t1-token")->admin);
}
