#include <doctest.h>

#include <sstream>

#include "support/fixtures.hpp"
#include "tele/error.hpp"
#include "tele/maturity.hpp"
#include "tele/metrics.hpp"

using namespace tele;
using testing::make_event;

TEST_CASE("busy CU reproduces the hand-computed indicators") {
  auto busy = testing::busy_cu();
  OrgTree tree = build_org_tree(busy.org);
  EventStore store = EventStore::from_events(busy.events);
  REQUIRE(store.size() == 40);

  auto slice = store.slice("BUSY", busy.window);
  CHECK(active_users(slice) == 6);
  CHECK(access_dynamics(slice, busy.window) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(information_presence(slice) == 3);
  CHECK(sync_comm(slice) == SyncComm{2, 1.0});
  CHECK(async_comm(slice, tree.course_unit("BUSY")) == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(rich_content(slice) == 2);
  CHECK(work_delivery(slice) == 2);
  CHECK(evaluation_tests(slice) == 2);

  DimensionProfile p = dimension_profile(store, tree, "BUSY", busy.window);
  CHECK(p.active_user_count == 6);
  CHECK_FALSE(p.no_activity);
  CHECK(p.scalar(Dimension::synchronous) == 1.0);
  CHECK(p.scalar(Dimension::asynchronous) == doctest::Approx(30.0));

  LevelProfile lp = profile_levels(p, default_thresholds());
  PerDimension<Level> expected{Level::adoption, Level::immersion, Level::adaptation,
                               Level::adaptation, Level::adoption, Level::adaptation,
                               Level::adoption};
  CHECK(lp.levels == expected);
  CHECK(lp.composite == doctest::Approx(19.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("zero active users divide safely") {
  std::vector<Event> ev{
      make_event("2011-10-17T09:00:00Z", "t1", "BUSY", EventKind::forum_post),
      make_event("2011-10-17T09:00:00Z", "t1", "BUSY", EventKind::forum_open),
  };
  Window w = parse_window("2011-10-17..2011-10-24");
  CHECK(active_users(ev) == 0);
  CHECK(access_dynamics(ev, w) == 0.0);
  CHECK(sync_comm(ev).posts_per_active_user == 0.0);
  CHECK(sync_comm(ev).forums_open == 1);
  CHECK_THROWS_AS(access_dynamics(ev, Window{w.end, w.start}), Error);
}

TEST_CASE("async percentage over an empty population is zero") {
  CourseUnit empty{"E", "E", "D", {}, {}};
  std::vector<Event> ev{make_event("2011-10-17T09:00:00Z", "x", "E", EventKind::async_tool_use)};
  CHECK(async_comm(ev, empty) == 0.0);
}

TEST_CASE("one event per category: indicators move by one") {
  auto busy = testing::busy_cu();
  OrgTree tree = build_org_tree(busy.org);
  std::vector<Event> base = busy.events;
  auto before = dimension_profile(EventStore::from_events(base), tree, "BUSY", busy.window);

  auto with = [&](Event e) {
    auto ev = base;
    ev.push_back(std::move(e));
    return dimension_profile(EventStore::from_events(ev), tree, "BUSY", busy.window);
  };
  const std::string t = "2011-10-20T12:00:00Z";
  CHECK(with(make_event(t, "s1", "BUSY", EventKind::content_publish, {{"rich", true}}))
            .rich_content_count == before.rich_content_count + 1);
  CHECK(with(make_event(t, "s1", "BUSY", EventKind::content_publish, {{"rich", false}}))
            .rich_content_count == before.rich_content_count);
  CHECK(with(make_event(t, "t1", "BUSY", EventKind::test_attempt)).evaluation_test_count ==
        before.evaluation_test_count + 1);
  CHECK(with(make_event(t, "t1", "BUSY", EventKind::forum_open)).sync_forums_open ==
        before.sync_forums_open + 1);
  CHECK(with(make_event(t, "t1", "BUSY", EventKind::message)).information_presence ==
        before.information_presence + 1);
  CHECK(with(make_event(t, "t1", "BUSY", EventKind::group_progress_view))
            .work_delivery_features == before.work_delivery_features + 1);
  // s9 never appears in the busy log.
  CHECK(with(make_event(t, "s9", "BUSY", EventKind::async_tool_use)).async_user_pct ==
        doctest::Approx(before.async_user_pct + 10.0));
  // The window is half-open: an event at its end is ignored.
  CHECK(with(make_event("2011-10-31T00:00:00Z", "t1", "BUSY", EventKind::test_attempt)) ==
        before);
}

TEST_CASE("profiles are emitted per CU and window") {
  auto busy = testing::busy_cu();
  OrgTree tree = build_org_tree(busy.org);
  EventStore store = EventStore::from_events(busy.events);
  std::vector<Window> ws{parse_window("2011-10-17..2011-10-24"),
                         parse_window("2011-10-24..2011-10-31")};
  auto ps = compute_profiles(store, tree, ws);
  REQUIRE(ps.size() == 2);
  CHECK(ps[0].window == ws[0]);
  CHECK(ps[1].window == ws[1]);

  std::stringstream s;
  write_profiles(s, ps);
  CHECK(read_profiles(s) == ps);
}
