#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tele/access_control.hpp"
#include "tele/event_ingest.hpp"
#include "tele/maturity.hpp"
#include "tele/org_model.hpp"
#include "tele/survey.hpp"
#include "tele/time.hpp"

namespace tele {

/// Knobs for the synthetic campus. Defaults reproduce the autumn 2011
/// campus dynamics: 5,864 registered users, 666 CUs, about 4,000 visits a
/// day, 16 pages and 473 seconds per visit, mobile peaks near 150 hits.
struct GenParams {
  std::uint64_t seed = 20111017;
  std::int64_t n_users = 5864;
  std::int64_t n_cus = 666;
  int days = 28;
  Timestamp start = make_timestamp(2011, 10, 17);
  double daily_visits_mean = 4000.0;
  double pages_per_visit_mean = 16.0;
  double session_seconds_mean = 473.0;
  double mobile_daily_peak = 150.0;
  /// Share of CUs targeted at Entry, Adoption, Adaptation, Immersion,
  /// Transformation.
  std::array<double, 5> intensity_mix{0.30, 0.30, 0.20, 0.15, 0.05};

  // Org template.
  int schools = 4;
  int departments_per_school = 3;
  double teacher_fraction = 0.06;
  int enrollments_per_student = 5;
  int min_cu_students = 12;

  double teacher_response_rate = 0.8;
  double student_response_rate = 0.3;

  Window window() const;
};

/// Throws Error(validation) listing what is wrong: non-positive counts,
/// mix not summing to 1 (within 1e-9), more teachers than users, ...
void validate_params(const GenParams& params);

GenParams read_gen_params(std::istream& in);
void write_gen_params(std::ostream& out, const GenParams& params);

struct GeneratedData {
  std::vector<OrgRecord> org;
  std::vector<Event> events;  // by (timestamp, cu), the canonical log order
  std::vector<SurveyResponse> teacher_responses;
  std::vector<SurveyResponse> student_responses;
  /// CU id -> intended level band.
  std::map<std::string, Level> intended;
  /// CU id -> intended level per dimension. Access dynamics always equals
  /// the band; other dimensions of non-Entry CUs may sit one level off.
  std::map<std::string, PerDimension<Level>> intended_levels;
};

/// Deterministic for a given seed. Each CU receives an event mix whose
/// indicators classify exactly at its intended per-dimension levels under
/// the default thresholds.
/// Throws Error(validation) on infeasible parameters (including a visit
/// budget the targeted bands cannot absorb).
GeneratedData generate(const GenParams& params);

/// Writes org.jsonl, events.jsonl, instruments/{teacher,student}.json,
/// responses/{teacher,student}.csv and bands.csv (cu_id, band and the
/// seven intended levels) into `dir`.
void write_generated(const std::filesystem::path& dir, const GeneratedData& data);

/// Demo credentials for a generated org: "admin" (direction, admin),
/// "direction", "quality", "director-<school>", "coord-<department>" and
/// "teacher-<teacher>". The bearer token of principal X is "demo-X".
PrincipalRegistry demo_principals(const OrgTree& tree);

struct DailyUsage {
  Timestamp day;
  std::int64_t visits = 0;
  std::int64_t visitors = 0;
  std::int64_t pages = 0;
  std::int64_t mobile_hits = 0;
};

/// Usage panel over a window: one ACCESS event is one visit, its "pages"
/// attr the pages seen (1 when absent), its "duration" attr the session
/// length in seconds.
struct UsageSummary {
  std::vector<DailyUsage> days;
  std::int64_t total_visits = 0;
  double visits_per_day = 0.0;
  std::int64_t max_daily_visits = 0;
  double visitors_per_day = 0.0;
  std::int64_t max_daily_visitors = 0;
  double pages_per_day = 0.0;
  std::int64_t max_daily_pages = 0;
  double pages_per_visit = 0.0;
  double mean_session_seconds = 0.0;
  std::int64_t total_mobile_hits = 0;
  std::int64_t max_daily_mobile_hits = 0;
  std::int64_t max_sessions_per_hour = 0;
  std::int64_t distinct_users = 0;
  std::int64_t active_cus = 0;
};

UsageSummary summarize(const EventStore& store, const Window& window);

void write_summary(std::ostream& out, const UsageSummary& summary);

}  // namespace tele
