#include <doctest.h>

#include <random>
#include <sstream>

#include "support/fixtures.hpp"
#include "tele/error.hpp"
#include "tele/event_ingest.hpp"

using namespace tele;
using testing::make_event;

namespace {

OrgTree access_tree() { return build_org_tree(testing::access_fixture()); }

}  // namespace

TEST_CASE("event serialization round-trips") {
  std::vector<Event> samples{
      make_event("2011-10-17T09:00:00Z", "st1", "C01", EventKind::access,
                 {{"mobile", true}, {"pages", std::int64_t{12}}, {"duration", 301.5}}),
      make_event("2011-10-17T09:00:01Z", "T1", "C01", EventKind::content_publish,
                 {{"rich", false}, {"title", std::string("week \"1\"\n")}}),
      make_event("2011-10-18T00:00:00Z", "st2", "C02", EventKind::submission_group,
                 {{"work_id", std::string("w9")}}),
      make_event("2011-10-18T00:00:00Z", "T1", "C02", EventKind::test_attempt),
  };
  for (const auto& e : samples) {
    auto back = parse_event_line(serialize_event(e));
    REQUIRE(std::holds_alternative<Event>(back));
    CHECK(std::get<Event>(back) == e);
    CHECK(serialize_event(std::get<Event>(back)) == serialize_event(e));
  }
}

TEST_CASE("random events round-trip") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    auto kind = static_cast<EventKind>(rng() % kEventKindCount);
    Attrs attrs;
    if (kind == EventKind::content_publish) attrs.emplace("rich", rng() % 2 == 0);
    if (kind == EventKind::submission_individual || kind == EventKind::submission_group) {
      attrs.emplace("work_id", "w" + std::to_string(rng() % 10));
    }
    if (kind == EventKind::access) attrs.emplace("mobile", rng() % 3 == 0);
    attrs.emplace("n", static_cast<std::int64_t>(rng() % 1000) - 500);
    attrs.emplace("x", static_cast<double>(rng() % 10000) / 7.0);
    Event e{make_timestamp(2011, 10, 1) + std::chrono::seconds(rng() % 5000000), "u", "c",
            kind, attrs};
    auto back = parse_event_line(serialize_event(e));
    REQUIRE(std::holds_alternative<Event>(back));
    CHECK(std::get<Event>(back) == e);
  }
}

TEST_CASE("parse errors carry the field") {
  auto field_of = [](std::string_view line) {
    auto r = parse_event_line(line);
    REQUIRE(std::holds_alternative<EventParseError>(r));
    return std::get<EventParseError>(r).field;
  };
  CHECK(field_of(R"({"user":"a","cu":"C","kind":"ACCESS"})") == "t");
  CHECK(field_of(R"({"t":"2011-10-17T09:00:00Z","user":"a","cu":"C","kind":"TELEPORT"})") == "kind");
  CHECK(field_of(R"({"t":"2011-10-17T09:00:00Z","user":"a","cu":"C","kind":"CONTENT_PUBLISH"})") == "rich");
  CHECK(field_of(R"({"t":"2011-10-17T09:00:00Z","user":"a","cu":"C","kind":"SUBMISSION_GROUP"})") == "work_id");
  CHECK(field_of(R"({"t":"yesterday","user":"a","cu":"C","kind":"ACCESS"})") == "t");
  auto r = parse_event_line("{\"t\":");
  CHECK(std::holds_alternative<EventParseError>(r));

  // ACCESS without mobile defaults to false.
  auto ok = parse_event_line(R"({"t":"2011-10-17T09:00:00Z","user":"a","cu":"C","kind":"ACCESS"})");
  REQUIRE(std::holds_alternative<Event>(ok));
  CHECK_FALSE(std::get<Event>(ok).flag("mobile"));
  CHECK(std::get<Event>(ok).attrs.contains("mobile"));
}

TEST_CASE("ingest rejects with reasons and keeps the rest") {
  OrgTree tree = access_tree();
  std::stringstream in;
  in << event_log_header() << "\n";
  in << serialize_event(make_event("2011-10-17T09:00:00Z", "st1", "C01", EventKind::access)) << "\n";
  in << serialize_event(make_event("2011-10-17T09:00:00Z", "st1", "C99", EventKind::access)) << "\n";
  in << serialize_event(make_event("2011-10-17T09:00:00Z", "st2", "C01", EventKind::access)) << "\n";
  in << R"({"t":"2011-10-17T09:00:00Z","user":"T1","cu":"C01","kind":"CONTENT_PUBLISH"})" << "\n";
  in << "not json\n";
  in << serialize_event(make_event("2011-10-16T09:00:00Z", "T1", "C01", EventKind::announcement)) << "\n";

  IngestResult r = ingest_events(in, tree);
  CHECK(r.complete);
  CHECK(r.store.size() == 2);
  REQUIRE(r.rejects.size() == 4);
  CHECK(r.rejects[0].reason == "unknown cu");
  CHECK(r.rejects[0].line == 3);
  CHECK(r.rejects[1].reason == "not a member");
  CHECK(r.rejects[2].reason == "missing attr");
  CHECK(r.rejects[3].reason == "malformed record");

  // Partition order is by time, not by input line.
  auto part = r.store.partition("C01");
  REQUIRE(part.size() == 2);
  CHECK(part[0].kind == EventKind::announcement);
  CHECK(r.store.partition("C02").empty());
}

TEST_CASE("ingest without a header is a parse error") {
  OrgTree tree = access_tree();
  std::stringstream in(serialize_event(make_event("2011-10-17T09:00:00Z", "st1", "C01",
                                                   EventKind::access)) + "\n");
  try {
    ingest_events(in, tree);
    FAIL("accepted a headerless log");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse);
  }
}

TEST_CASE("timestamp range is enforced") {
  OrgTree tree = access_tree();
  IngestOptions opt;
  opt.accepted = parse_window("2011-09-01..2012-08-01");
  std::vector<std::string> lines{
      serialize_event(make_event("2011-08-31T23:59:59Z", "st1", "C01", EventKind::access)),
      serialize_event(make_event("2011-09-01T00:00:00Z", "st1", "C01", EventKind::access)),
      serialize_event(make_event("2012-08-01T00:00:00Z", "st1", "C01", EventKind::access)),
  };
  auto r = ingest_event_lines(lines, tree, opt);
  CHECK(r.store.size() == 1);
  REQUIRE(r.rejects.size() == 2);
  CHECK(r.rejects[0].reason == "timestamp out of range");
}

TEST_CASE("slicing is half-open and checked") {
  OrgTree tree = access_tree();
  std::vector<Event> ev;
  for (int d = 10; d < 20; ++d) {
    ev.push_back(make_event("2011-10-" + std::to_string(d) + "T00:00:00Z", "st1", "C01",
                            EventKind::access));
  }
  EventStore store = EventStore::from_events(ev);
  Window w = parse_window("2011-10-12..2011-10-15");
  CHECK(store.slice("C01", w).size() == 3);
  CHECK(store.count("C01", EventKind::access, w) == 3);
  CHECK(store.count("C01", EventKind::forum_post, w) == 0);
  CHECK(slice_window(store, tree, "C02", w).empty());
  CHECK_THROWS_AS(slice_window(store, tree, "C77", w), Error);
  Window inverted{w.end, w.start};
  CHECK_THROWS_AS(store.slice("C01", inverted), Error);

  // Random windows against a linear scan.
  std::mt19937 rng(3);
  auto all = store.partition("C01");
  for (int i = 0; i < 200; ++i) {
    auto a = make_timestamp(2011, 10, 9) + std::chrono::hours(rng() % 300);
    auto b = a + std::chrono::hours(1 + rng() % 300);
    Window q{a, b};
    std::size_t expected = 0;
    for (const auto& e : all) expected += q.contains(e.timestamp);
    CHECK(store.slice("C01", q).size() == expected);
  }
}

TEST_CASE("digest depends on content only") {
  auto a = make_event("2011-10-17T09:00:00Z", "st1", "C01", EventKind::access);
  auto b = make_event("2011-10-17T10:00:00Z", "st3", "C03", EventKind::access);
  CHECK(EventStore::from_events({a, b}).digest() == EventStore::from_events({b, a}).digest());
  CHECK(EventStore::from_events({a}).digest() != EventStore::from_events({b}).digest());
}
