#include <doctest.h>

#include <sstream>

#include "support/fixtures.hpp"
#include "tele/error.hpp"
#include "tele/survey.hpp"

using namespace tele;

namespace {

const std::string kHeader = "respondent_id,cu_id,item_id,value,timestamp\n";

ResponseIngestResult ingest_csv(const std::string& rows, Audience a, const OrgTree& tree) {
  std::stringstream in(kHeader + rows);
  return ingest_responses(in, default_instrument(a), tree);
}

}  // namespace

TEST_CASE("default instruments cover every dimension") {
  for (auto a : {Audience::teacher, Audience::student}) {
    Instrument inst = default_instrument(a);
    CHECK_NOTHROW(validate_instrument(inst));
    CHECK(inst.items.size() == 14);
    std::stringstream s;
    write_instrument(s, inst);
    CHECK(read_instrument(s) == inst);
  }
}

TEST_CASE("instrument validation") {
  Instrument inst = default_instrument(Audience::student);
  Instrument gap = inst;
  std::erase_if(gap.items, [](const InstrumentItem& i) { return i.dimension == Dimension::content; });
  CHECK_THROWS_AS(validate_instrument(gap), Error);

  Instrument dup = inst;
  dup.items.push_back(dup.items.front());
  CHECK_THROWS_AS(validate_instrument(dup), Error);

  Instrument scale = inst;
  scale.scale_max = 7;
  CHECK_THROWS_AS(validate_instrument(scale), Error);
}

TEST_CASE("rows are rejected with a reason") {
  OrgTree tree = build_org_tree(testing::access_fixture());
  auto r = ingest_csv(
      "st1,C01,s_content_1,4,2011-10-20T10:00:00Z\n"
      "st1,C01,s_content_1,6,2011-10-20T10:00:00Z\n"
      "st1,C01,s_content_9,4,2011-10-20T10:00:00Z\n"
      "st1,C99,s_content_1,4,2011-10-20T10:00:00Z\n"
      "st2,C01,s_content_1,4,2011-10-20T10:00:00Z\n"
      "T1,C01,s_content_1,4,2011-10-20T10:00:00Z\n"
      "st1,C01,s_content_1,four,2011-10-20T10:00:00Z\n"
      "st1,C01\n",
      Audience::student, tree);
  CHECK(r.store.size() == 1);
  std::vector<std::string> reasons;
  for (const auto& j : r.rejects) reasons.push_back(j.reason);
  CHECK(reasons == std::vector<std::string>{"scale violation", "unknown item", "unknown cu",
                                            "not a member", "audience mismatch",
                                            "malformed row", "malformed row"});
  CHECK(r.rejects.front().line == 3);
}

TEST_CASE("latest answer wins and scores are pooled means") {
  OrgTree tree = build_org_tree(testing::access_fixture());
  // T4 teaches C09..C15. Two items per dimension; T4 answers content twice
  // on item 1 (later one wins) and once on item 2.
  auto r = ingest_csv(
      "T4,C09,t_content_1,2,2011-10-20T10:00:00Z\n"
      "T4,C09,t_content_1,5,2011-10-21T10:00:00Z\n"
      "T4,C09,t_content_2,3,2011-10-20T10:00:00Z\n"
      "T4,C09,t_content_1,1,2011-10-19T10:00:00Z\n",
      Audience::teacher, tree);
  CHECK(r.rejects.empty());
  CHECK(r.store.size() == 2);
  auto scores = survey_scores(r.store, tree, "C09", Audience::teacher);
  CHECK(scores[index_of(Dimension::content)].score == 4.0);
  CHECK(scores[index_of(Dimension::content)].respondent_count == 1);
  CHECK_FALSE(scores[index_of(Dimension::dynamics)].score.has_value());
  CHECK_FALSE(survey_scores(r.store, tree, "C09", Audience::student)[4].score.has_value());

  // Windowed: only the answer on the 20th falls inside.
  auto w = survey_scores(r.store, tree, "C09", Audience::teacher,
                         parse_window("2011-10-20..2011-10-21"));
  CHECK(w[index_of(Dimension::content)].score == 3.0);

  CHECK_THROWS_AS(survey_scores(r.store, tree, "C404", Audience::teacher), Error);
}

TEST_CASE("record format is accepted too") {
  OrgTree tree = build_org_tree(testing::access_fixture());
  std::stringstream in(
      "{\"schema\":\"tele.responses\",\"version\":1}\n"
      "{\"respondent_id\":\"st5\",\"cu_id\":\"C05\",\"item_id\":\"s_delivery_2\",\"value\":2,"
      "\"timestamp\":\"2011-10-20T10:00:00Z\"}\n");
  auto r = ingest_responses(in, default_instrument(Audience::student), tree);
  CHECK(r.rejects.empty());
  CHECK(r.store.size() == 1);
}

TEST_CASE("csv round-trip") {
  OrgTree tree = build_org_tree(testing::access_fixture());
  std::vector<SurveyResponse> rows{
      {"st3", "C03", "s_evaluation_1", 5, parse_timestamp("2011-10-20T10:00:00Z")},
      {"st4", "C04", "s_dynamics_2", 1, parse_timestamp("2011-10-21T10:00:00Z")},
  };
  std::stringstream s;
  write_responses_csv(s, rows);
  auto r = ingest_responses(s, default_instrument(Audience::student), tree);
  CHECK(r.rejects.empty());
  std::vector<SurveyResponse> back;
  for (const auto& e : r.store.entries()) back.push_back(e.response);
  std::sort(back.begin(), back.end(),
            [](const auto& a, const auto& b) { return a.cu_id < b.cu_id; });
  CHECK(back == rows);
}
