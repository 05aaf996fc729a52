#include "tele/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <tuple>

#include "jsonl.hpp"
#include "tele/digest.hpp"
#include "tele/error.hpp"

namespace tele {
namespace {

using detail::json;
using detail::ordered_json;
using Rng = std::mt19937_64;

// Weekly pattern, Monday first: busy weekdays, Saturday dip, Sunday
// evening catch-up.
constexpr std::array<double, 7> kWeekday{1.15, 1.20, 1.15, 1.10, 0.95, 0.55, 0.90};
constexpr double kDayNoise = 0.10;
// Chance of a dimension sitting one level below (and, separately, above)
// the CU's band.
constexpr double kDrift = 0.15;

// Hour-of-day activity profile (UTC).
constexpr std::array<double, 24> kHour{0.20, 0.10, 0.05, 0.05, 0.05, 0.10, 0.30, 0.80,
                                       1.60, 2.30, 2.60, 2.20, 1.50, 1.60, 1.90, 2.00,
                                       1.90, 1.70, 1.50, 1.60, 1.80, 1.60, 1.00, 0.50};

struct UnitPlan {
  std::string id;
  std::string department;
  std::vector<std::string> teachers;
  std::vector<std::string> students;
  Level band = Level::entry;
  PerDimension<Level> dims{};  // per-dimension target, dynamics = band
  double rate = 0.0;
  Level at(Dimension d) const { return dims[index_of(d)]; }
  std::vector<std::string> members() const {
    std::vector<std::string> m = teachers;
    m.insert(m.end(), students.begin(), students.end());
    return m;
  }
};

std::vector<std::int64_t> apportion(std::int64_t total, std::span<const double> weights) {
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::int64_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double exact = sum > 0 ? static_cast<double>(total) * weights[i] / sum : 0.0;
    out[i] = static_cast<std::int64_t>(std::floor(exact));
    assigned += out[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned) {
    ++out[remainders[k].second];
  }
  return out;
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(v.size()) - 1))];
}

std::string numbered(const char* prefix, std::int64_t n, int width) {
  std::string digits = std::to_string(n);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return prefix + digits;
}

// Real-valued band [lo, hi) for a level under cuts; the top band is capped
// at 1.5 * c4 for sampling.
std::pair<double, double> band_interval(const Cuts& c, Level b) {
  int v = value_of(b);
  double lo = v == 1 ? 0.0 : c[static_cast<std::size_t>(v - 2)];
  double hi = v == 5 ? 1.5 * c[3] : c[static_cast<std::size_t>(v - 1)];
  return {lo, hi};
}

double pick_in_band(Rng& rng, const Cuts& c, Level b) {
  auto [lo, hi] = band_interval(c, b);
  return lo + uniform(rng, 0.25, 0.75) * (hi - lo);
}

std::int64_t pick_count(Rng& rng, const Cuts& c, Level b) {
  int v = value_of(b);
  auto lo = v == 1 ? std::int64_t{0}
                   : static_cast<std::int64_t>(std::ceil(c[static_cast<std::size_t>(v - 2)]));
  auto hi = v == 5 ? lo + 4
                   : static_cast<std::int64_t>(std::ceil(c[static_cast<std::size_t>(v - 1)])) - 1;
  return uniform_int(rng, lo, std::max(lo, hi));
}

// Smallest/largest integer n in [0, limit] whose ratio n / denom classifies
// at band b; moves `n` there.
void settle_ratio(std::int64_t& n, std::int64_t limit, double scale, const Cuts& cuts, Level b) {
  auto level_of = [&](std::int64_t x) { return classify(scale * static_cast<double>(x), cuts); };
  while (n < limit && level_of(n) < b) ++n;
  while (n > 0 && level_of(n) > b) --n;
}

class Generator {
 public:
  explicit Generator(const GenParams& p) : p_(p), rng_(p.seed), cuts_(default_thresholds()) {}

  GeneratedData run() {
    build_org();
    plan_bands();
    plan_access();
    for (auto& u : units_) unit_events(u);
    emit_visits();
    emit_surveys();
    std::stable_sort(data_.events.begin(), data_.events.end(),
                     [](const Event& a, const Event& b) {
                       return std::tie(a.timestamp, a.cu_id) < std::tie(b.timestamp, b.cu_id);
                     });
    return std::move(data_);
  }

 private:
  Timestamp random_time() {
    auto day = uniform_int(rng_, 0, p_.days - 1);
    return time_in_day(day);
  }

  Timestamp time_in_day(std::int64_t day) {
    std::discrete_distribution<int> hour(kHour.begin(), kHour.end());
    int h = hour(rng_);
    auto sec = uniform_int(rng_, 0, 3599);
    return p_.start + std::chrono::days{day} + std::chrono::hours{h} + std::chrono::seconds{sec};
  }

  void add_event(Timestamp t, const std::string& user, const std::string& cu, EventKind kind,
                 Attrs attrs = {}) {
    if (kind == EventKind::access && !attrs.contains("mobile")) attrs.emplace("mobile", false);
    data_.events.push_back(Event{t, user, cu, kind, std::move(attrs)});
  }

  void build_org() {
    auto& rec = data_.org;
    rec.push_back(NodeRecord{NodeKind::university, "U", "University", ""});
    std::vector<std::string> departments;
    std::vector<std::string> dept_school;
    for (int s = 1; s <= p_.schools; ++s) {
      std::string sid = numbered("S", s, 2);
      rec.push_back(NodeRecord{NodeKind::school, sid, "School " + std::to_string(s), "U"});
      for (int d = 1; d <= p_.departments_per_school; ++d) {
        std::string did = sid + "-D" + std::to_string(d);
        rec.push_back(NodeRecord{NodeKind::department, did,
                                 "Department " + std::to_string(s) + "." + std::to_string(d), sid});
        departments.push_back(did);
        dept_school.push_back(sid);
      }
    }

    auto n_teachers = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(static_cast<double>(p_.n_users) * p_.teacher_fraction)));
    auto n_students = p_.n_users - n_teachers;

    // Teachers get a home department round-robin.
    std::vector<std::vector<std::string>> dept_teachers(departments.size());
    std::vector<std::string> teachers;
    for (std::int64_t t = 0; t < n_teachers; ++t) {
      std::string tid = numbered("T", t + 1, 4);
      auto home = static_cast<std::size_t>(t) % departments.size();
      dept_teachers[home].push_back(tid);
      teachers.push_back(tid);
      rec.push_back(TeacherRecord{tid, "Teacher " + std::to_string(t + 1), {dept_school[home]}});
    }

    units_.resize(static_cast<std::size_t>(p_.n_cus));
    std::vector<std::size_t> next_in_dept(departments.size(), 0);
    for (std::int64_t c = 0; c < p_.n_cus; ++c) {
      auto& u = units_[static_cast<std::size_t>(c)];
      auto dept = static_cast<std::size_t>(c) % departments.size();
      u.id = numbered("CU", c + 1, 4);
      u.department = departments[dept];
      rec.push_back(NodeRecord{NodeKind::course_unit, u.id, "Course unit " + std::to_string(c + 1),
                               u.department});
      const auto& pool = dept_teachers[dept].empty() ? teachers : dept_teachers[dept];
      u.teachers.push_back(pool[next_in_dept[dept]++ % pool.size()]);
      // Some CUs are co-taught, possibly by a teacher from another school.
      if (teachers.size() > 1 && uniform(rng_, 0, 1) < 0.25) {
        const auto& extra = pick(rng_, teachers);
        if (extra != u.teachers.front()) u.teachers.push_back(extra);
      }
    }

    // Enrollment: each student takes enrollments_per_student distinct CUs
    // with popularity-weighted probability, then small CUs are topped up.
    std::vector<double> popularity(units_.size());
    for (auto& w : popularity) w = uniform(rng_, 0.5, 1.5);
    std::discrete_distribution<std::size_t> choose(popularity.begin(), popularity.end());
    std::vector<std::set<std::string>> enrolled(units_.size());
    std::vector<std::string> students;
    for (std::int64_t s = 0; s < n_students; ++s) {
      std::string sid = numbered("P", s + 1, 5);
      students.push_back(sid);
      std::set<std::size_t> picked;
      auto want = std::min<std::int64_t>(p_.enrollments_per_student, p_.n_cus);
      while (static_cast<std::int64_t>(picked.size()) < want) picked.insert(choose(rng_));
      for (auto c : picked) enrolled[c].insert(sid);
    }
    for (std::size_t c = 0; c < units_.size(); ++c) {
      auto target = std::min<std::int64_t>(p_.min_cu_students, n_students);
      while (static_cast<std::int64_t>(enrolled[c].size()) < target) {
        enrolled[c].insert(pick(rng_, students));
      }
      auto& u = units_[c];
      for (const auto& t : u.teachers) enrolled[c].erase(t);
      u.students.assign(enrolled[c].begin(), enrolled[c].end());
      for (const auto& t : u.teachers) rec.push_back(MembershipRecord{u.id, t, MemberRole::teacher});
      for (const auto& s : u.students) rec.push_back(MembershipRecord{u.id, s, MemberRole::student});
    }
  }

  void plan_bands() {
    auto counts = apportion(p_.n_cus, p_.intensity_mix);
    std::vector<Level> bands;
    for (int b = 0; b < 5; ++b) bands.insert(bands.end(), static_cast<std::size_t>(counts[b]), static_cast<Level>(b + 1));
    std::shuffle(bands.begin(), bands.end(), rng_);
    for (std::size_t i = 0; i < units_.size(); ++i) {
      auto& u = units_[i];
      u.band = bands[i];
      // Non-Entry CUs drift by one level on some dimensions so profiles
      // are not flat; Entry CUs stay Entry throughout.
      for (auto d : kDimensions) {
        int v = value_of(u.band);
        if (d != Dimension::dynamics && u.band != Level::entry) {
          double r = uniform(rng_, 0, 1);
          if (r < kDrift) v = std::max(1, v - 1);
          else if (r < 2 * kDrift) v = std::min(5, v + 1);
        }
        u.dims[index_of(d)] = static_cast<Level>(v);
      }
      units_[i].rate = pick_in_band(rng_, cuts_[Dimension::dynamics], bands[i]);
      data_.intended.emplace(u.id, u.band);
      data_.intended_levels.emplace(u.id, u.dims);
    }
  }

  // Splits the visit budget so every CU keeps its targeted hits-per-week
  // rate; the share of active members is what absorbs the budget.
  void plan_access() {
    const double weeks = p_.window().weeks();
    const double budget = p_.daily_visits_mean * p_.days;
    double demand = 0.0;
    for (const auto& u : units_) demand += u.rate * static_cast<double>(u.members().size());
    double active_share = budget / (weeks * demand);
    if (active_share > 1.0) {
      throw Error(Errc::validation,
                  "infeasible params: " + std::to_string(p_.daily_visits_mean) +
                      " visits/day exceed what the intensity mix can absorb (needs " +
                      std::to_string(active_share) + "x the enrolled population)");
    }
    const auto& cuts = cuts_[Dimension::dynamics];
    for (auto& u : units_) {
      auto members = u.members();
      auto m = static_cast<std::int64_t>(members.size());
      auto active = std::min<std::int64_t>(
          m, std::llround(active_share * static_cast<double>(m)));
      if (u.band != Level::entry) active = std::max<std::int64_t>(active, 1);
      auto hits = std::max<std::int64_t>(active, std::llround(u.rate * weeks * static_cast<double>(active)));
      auto rate = [&] {
        return active == 0 ? 0.0 : static_cast<double>(hits) / weeks / static_cast<double>(active);
      };
      while (active > 0 && classify(rate(), cuts) < u.band) ++hits;
      while (active > 0 && hits > active && classify(rate(), cuts) > u.band) --hits;
      if (active > 0 && classify(rate(), cuts) != u.band) {
        if (u.band != Level::entry) {
          throw Error(Errc::validation, "infeasible params: window too short for band " +
                                            std::string(to_string(u.band)));
        }
        active = 0;
        hits = 0;
      }
      std::shuffle(members.begin(), members.end(), rng_);
      members.resize(static_cast<std::size_t>(active));
      active_[u.id] = members;
      for (const auto& user : members) visits_.emplace_back(u.id, user);
      for (std::int64_t h = active; h < hits; ++h) visits_.emplace_back(u.id, pick(rng_, members));
    }
  }

  void unit_events(const UnitPlan& u) {
    const auto& active = active_[u.id];
    const auto active_n = static_cast<std::int64_t>(active.size());
    const auto members = u.members();

    // Information channels.
    std::vector<EventKind> channels{EventKind::announcement, EventKind::message,
                                    EventKind::programme_post, EventKind::calendar_entry};
    std::shuffle(channels.begin(), channels.end(), rng_);
    auto n_channels = std::min<std::int64_t>(4, pick_count(rng_, cuts_[Dimension::information], u.at(Dimension::information)));
    for (std::int64_t i = 0; i < n_channels; ++i) {
      auto n = uniform_int(rng_, 1, 3);
      for (std::int64_t k = 0; k < n; ++k) {
        add_event(random_time(), pick(rng_, u.teachers), u.id, channels[static_cast<std::size_t>(i)]);
      }
    }

    // Forums: open count follows the band, posts per active user is the
    // classified scalar.
    auto forums = static_cast<std::int64_t>(value_of(u.at(Dimension::synchronous)) - 1);
    for (std::int64_t f = 0; f < forums; ++f) {
      add_event(random_time(), pick(rng_, u.teachers), u.id, EventKind::forum_open,
                {{"forum_id", "f" + std::to_string(f + 1)}});
    }
    std::int64_t posts = 0;
    if (active_n > 0) {
      const auto& sync = cuts_[Dimension::synchronous];
      posts = std::llround(pick_in_band(rng_, sync, u.at(Dimension::synchronous)) * static_cast<double>(active_n));
      settle_ratio(posts, std::max<std::int64_t>(posts, 1) * 4 + 4 * active_n,
                   1.0 / static_cast<double>(active_n), sync, u.at(Dimension::synchronous));
    }
    for (std::int64_t k = 0; k < posts; ++k) {
      auto forum = forums > 0 ? uniform_int(rng_, 1, forums) : 0;
      add_event(random_time(), pick(rng_, active), u.id, EventKind::forum_post,
                {{"forum_id", "f" + std::to_string(forum)}});
    }

    // Asynchronous tools: share of the whole CU population.
    std::int64_t async_users = 0;
    if (active_n > 0) {
      const auto& ac = cuts_[Dimension::asynchronous];
      auto pop = static_cast<std::int64_t>(members.size());
      double pct = std::min(100.0, pick_in_band(rng_, ac, u.at(Dimension::asynchronous)));
      async_users = std::llround(pct / 100.0 * static_cast<double>(pop));
      settle_ratio(async_users, pop, 100.0 / static_cast<double>(pop), ac, u.at(Dimension::asynchronous));
    }
    auto pool = members;
    std::shuffle(pool.begin(), pool.end(), rng_);
    for (std::int64_t i = 0; i < async_users; ++i) {
      auto n = uniform_int(rng_, 1, 3);
      for (std::int64_t k = 0; k < n; ++k) {
        add_event(random_time(), pool[static_cast<std::size_t>(i)], u.id, EventKind::async_tool_use,
                  {{"tool", k % 2 == 0 ? "mail" : "blog"}});
      }
    }

    // Content.
    auto rich = pick_count(rng_, cuts_[Dimension::content], u.at(Dimension::content));
    auto plain = uniform_int(rng_, 0, 4);
    for (std::int64_t i = 0; i < rich + plain; ++i) {
      add_event(random_time(), pick(rng_, u.teachers), u.id, EventKind::content_publish,
                {{"rich", i < rich}, {"content_id", "k" + std::to_string(i + 1)}});
    }

    // Work delivery feature classes, used in a fixed order of adoption.
    static constexpr std::array<EventKind, 4> kDelivery{
        EventKind::submission_individual, EventKind::submission_group,
        EventKind::group_progress_view, EventKind::plagiarism_check};
    auto classes = std::min<std::int64_t>(4, pick_count(rng_, cuts_[Dimension::delivery], u.at(Dimension::delivery)));
    const auto& submitters = u.students.empty() ? u.teachers : u.students;
    for (std::int64_t i = 0; i < classes; ++i) {
      auto kind = kDelivery[static_cast<std::size_t>(i)];
      auto n = uniform_int(rng_, 1, 4);
      for (std::int64_t k = 0; k < n; ++k) {
        if (kind == EventKind::submission_individual || kind == EventKind::submission_group) {
          add_event(random_time(), pick(rng_, submitters), u.id, kind,
                    {{"work_id", "w" + std::to_string(k + 1)}});
        } else {
          add_event(random_time(), pick(rng_, u.teachers), u.id, kind);
        }
      }
    }

    auto tests = pick_count(rng_, cuts_[Dimension::evaluation], u.at(Dimension::evaluation));
    for (std::int64_t i = 0; i < tests; ++i) {
      add_event(random_time(), pick(rng_, submitters), u.id, EventKind::test_attempt,
                {{"test_id", "q" + std::to_string(i % 3 + 1)}});
    }
  }

  void emit_visits() {
    std::shuffle(visits_.begin(), visits_.end(), rng_);
    auto dow0 = std::chrono::weekday{std::chrono::floor<std::chrono::days>(p_.start)};
    std::vector<double> day_weight(static_cast<std::size_t>(p_.days));
    for (int d = 0; d < p_.days; ++d) {
      // c_encoding: Sunday 0; kWeekday is Monday first.
      unsigned wd = (dow0.c_encoding() + static_cast<unsigned>(d)) % 7;
      double base = kWeekday[(wd + 6) % 7];
      day_weight[static_cast<std::size_t>(d)] = base * (1.0 + uniform(rng_, -kDayNoise, kDayNoise));
    }
    auto per_day = apportion(static_cast<std::int64_t>(visits_.size()), day_weight);
    auto busiest = *std::max_element(per_day.begin(), per_day.end());

    std::poisson_distribution<int> extra_pages(std::max(0.0, p_.pages_per_visit_mean - 1.0));
    std::gamma_distribution<double> duration(2.0, p_.session_seconds_mean / 2.0);
    std::size_t next = 0;
    std::int64_t session = 0;
    for (int d = 0; d < p_.days; ++d) {
      auto n = per_day[static_cast<std::size_t>(d)];
      auto mobile = busiest == 0 ? 0
                                 : std::llround(p_.mobile_daily_peak * static_cast<double>(n) /
                                                static_cast<double>(busiest));
      for (std::int64_t k = 0; k < n; ++k, ++next) {
        const auto& [cu, user] = visits_[next];
        Attrs attrs;
        attrs.emplace("session", numbered("v", ++session, 7));
        attrs.emplace("pages", std::int64_t{1} + extra_pages(rng_));
        attrs.emplace("duration", std::max<std::int64_t>(1, std::llround(duration(rng_))));
        attrs.emplace("mobile", k < mobile);
        add_event(time_in_day(d), user, cu, EventKind::access, std::move(attrs));
      }
    }
  }

  void emit_surveys() {
    const auto teacher_inst = default_instrument(Audience::teacher);
    const auto student_inst = default_instrument(Audience::student);
    const auto last = std::min(7, p_.days);
    std::normal_distribution<double> noise(0.0, 0.7);
    auto answer = [&](const UnitPlan& u, const std::string& who, const Instrument& inst,
                      std::vector<SurveyResponse>& out) {
      auto day = uniform_int(rng_, p_.days - last, p_.days - 1);
      auto t = time_in_day(day);
      for (const auto& item : inst.items) {
        auto v = std::clamp<std::int64_t>(std::llround(value_of(u.at(item.dimension)) + noise(rng_)), 1, 5);
        out.push_back({who, u.id, item.id, static_cast<int>(v), t});
      }
    };
    for (const auto& u : units_) {
      for (const auto& t : u.teachers) {
        if (uniform(rng_, 0, 1) < p_.teacher_response_rate) {
          answer(u, t, teacher_inst, data_.teacher_responses);
        }
      }
      for (const auto& s : u.students) {
        if (uniform(rng_, 0, 1) < p_.student_response_rate) {
          answer(u, s, student_inst, data_.student_responses);
        }
      }
    }
  }

  const GenParams& p_;
  Rng rng_;
  ThresholdConfig cuts_;
  std::vector<UnitPlan> units_;
  std::map<std::string, std::vector<std::string>> active_;
  std::vector<std::pair<std::string, std::string>> visits_;
  GeneratedData data_;
};

}  // namespace

Window GenParams::window() const {
  return {start, start + std::chrono::days{days}};
}

void validate_params(const GenParams& p) {
  std::vector<std::string> errors;
  if (p.n_users <= 0) errors.push_back("n_users must be > 0");
  if (p.n_cus <= 0) errors.push_back("n_cus must be > 0");
  if (p.days <= 0) errors.push_back("days must be > 0");
  if (!(p.daily_visits_mean > 0)) errors.push_back("daily_visits_mean must be > 0");
  if (!(p.pages_per_visit_mean >= 1)) errors.push_back("pages_per_visit_mean must be >= 1");
  if (!(p.session_seconds_mean > 0)) errors.push_back("session_seconds_mean must be > 0");
  if (!(p.mobile_daily_peak >= 0)) errors.push_back("mobile_daily_peak must be >= 0");
  if (p.schools <= 0 || p.departments_per_school <= 0) {
    errors.push_back("schools and departments_per_school must be > 0");
  }
  if (p.enrollments_per_student <= 0) errors.push_back("enrollments_per_student must be > 0");
  if (p.min_cu_students <= 0) errors.push_back("min_cu_students must be > 0");
  double sum = 0.0;
  for (double m : p.intensity_mix) {
    if (!(m >= 0.0)) errors.push_back("intensity_mix entries must be >= 0");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-9) errors.push_back("intensity_mix must sum to 1");
  if (!(p.teacher_fraction > 0.0 && p.teacher_fraction < 1.0)) {
    errors.push_back("teacher_fraction must lie in (0,1)");
  }
  if (p.n_users > 0) {
    auto teachers = std::max<std::int64_t>(
        1, std::llround(static_cast<double>(p.n_users) * p.teacher_fraction));
    if (teachers >= p.n_users) errors.push_back("more teachers than users");
  }
  for (double r : {p.teacher_response_rate, p.student_response_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) errors.push_back("response rates must lie in [0,1]");
  }
  if (!errors.empty()) {
    std::string msg = "invalid generator params:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw Error(Errc::validation, msg);
  }
}

GeneratedData generate(const GenParams& params) {
  validate_params(params);
  return Generator(params).run();
}

GenParams read_gen_params(std::istream& in) {
  GenParams p;
  json j;
  try {
    j = json::parse(in);
    p.seed = j.value("seed", p.seed);
    p.n_users = j.value("n_users", p.n_users);
    p.n_cus = j.value("n_cus", p.n_cus);
    p.days = j.value("days", p.days);
    if (j.contains("start")) p.start = parse_date(j["start"].get<std::string>());
    p.daily_visits_mean = j.value("daily_visits_mean", p.daily_visits_mean);
    p.pages_per_visit_mean = j.value("pages_per_visit_mean", p.pages_per_visit_mean);
    p.session_seconds_mean = j.value("session_seconds_mean", p.session_seconds_mean);
    p.mobile_daily_peak = j.value("mobile_daily_peak", p.mobile_daily_peak);
    if (j.contains("intensity_mix")) {
      auto mix = j["intensity_mix"].get<std::vector<double>>();
      if (mix.size() != 5) throw Error(Errc::validation, "intensity_mix needs 5 entries");
      std::copy(mix.begin(), mix.end(), p.intensity_mix.begin());
    }
    p.schools = j.value("schools", p.schools);
    p.departments_per_school = j.value("departments_per_school", p.departments_per_school);
    p.teacher_fraction = j.value("teacher_fraction", p.teacher_fraction);
    p.enrollments_per_student = j.value("enrollments_per_student", p.enrollments_per_student);
    p.min_cu_students = j.value("min_cu_students", p.min_cu_students);
    p.teacher_response_rate = j.value("teacher_response_rate", p.teacher_response_rate);
    p.student_response_rate = j.value("student_response_rate", p.student_response_rate);
  } catch (const json::exception& e) {
    throw Error(Errc::parse, std::string("generator params: ") + e.what());
  }
  return p;
}

void write_gen_params(std::ostream& out, const GenParams& p) {
  ordered_json j;
  j["seed"] = p.seed;
  j["n_users"] = p.n_users;
  j["n_cus"] = p.n_cus;
  j["days"] = p.days;
  j["start"] = format_timestamp(p.start).substr(0, 10);
  j["daily_visits_mean"] = p.daily_visits_mean;
  j["pages_per_visit_mean"] = p.pages_per_visit_mean;
  j["session_seconds_mean"] = p.session_seconds_mean;
  j["mobile_daily_peak"] = p.mobile_daily_peak;
  j["intensity_mix"] = p.intensity_mix;
  j["schools"] = p.schools;
  j["departments_per_school"] = p.departments_per_school;
  j["teacher_fraction"] = p.teacher_fraction;
  j["enrollments_per_student"] = p.enrollments_per_student;
  j["min_cu_students"] = p.min_cu_students;
  j["teacher_response_rate"] = p.teacher_response_rate;
  j["student_response_rate"] = p.student_response_rate;
  out << j.dump(2) << '\n';
}

void write_generated(const std::filesystem::path& dir, const GeneratedData& data) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "instruments");
  fs::create_directories(dir / "responses");
  auto open = [](const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot write " + path.string());
    return out;
  };
  {
    auto out = open(dir / "org.jsonl");
    write_org_records(out, data.org);
  }
  {
    auto out = open(dir / "events.jsonl");
    write_event_log(out, data.events);
  }
  {
    auto out = open(dir / "instruments" / "teacher.json");
    write_instrument(out, default_instrument(Audience::teacher));
  }
  {
    auto out = open(dir / "instruments" / "student.json");
    write_instrument(out, default_instrument(Audience::student));
  }
  {
    auto out = open(dir / "responses" / "teacher.csv");
    write_responses_csv(out, data.teacher_responses);
  }
  {
    auto out = open(dir / "responses" / "student.csv");
    write_responses_csv(out, data.student_responses);
  }
  {
    auto out = open(dir / "bands.csv");
    out << "cu_id,band";
    for (auto d : kDimensions) out << ',' << to_string(d);
    out << '\n';
    for (const auto& [cu, level] : data.intended) {
      out << cu << ',' << value_of(level);
      for (auto l : data.intended_levels.at(cu)) out << ',' << value_of(l);
      out << '\n';
    }
  }
}

PrincipalRegistry demo_principals(const OrgTree& tree) {
  PrincipalRegistry reg;
  auto add = [&](std::string id, RoleKind kind, std::string ref, bool admin = false) {
    auto hash = sha256_hex("demo-" + id);
    reg.add(Principal{std::move(id), Role{kind, std::move(ref)}, std::move(hash), admin});
  };
  add("admin", RoleKind::direction, "", true);
  add("direction", RoleKind::direction, "");
  add("quality", RoleKind::quality_service, "");
  for (const auto& s : tree.nodes_of_kind(NodeKind::school)) {
    add("director-" + s, RoleKind::school_director, s);
  }
  for (const auto& d : tree.nodes_of_kind(NodeKind::department)) {
    add("coord-" + d, RoleKind::dept_coordinator, d);
  }
  for (const auto& [id, teacher] : tree.teachers()) add("teacher-" + id, RoleKind::teacher, id);
  return reg;
}

UsageSummary summarize(const EventStore& store, const Window& window) {
  UsageSummary s;
  if (!window.valid()) throw Error(Errc::validation, "inverted window " + format_window(window));
  auto day0 = std::chrono::floor<std::chrono::days>(window.start);
  auto n_days = static_cast<std::size_t>(
      (std::chrono::ceil<std::chrono::days>(window.end) - day0).count());
  s.days.resize(n_days);
  for (std::size_t d = 0; d < n_days; ++d) s.days[d].day = day0 + std::chrono::days{d};

  std::vector<std::set<std::string>> visitors(n_days);
  std::map<Timestamp, std::int64_t> sessions_by_hour;
  std::set<std::string> users;
  double seconds = 0.0;
  std::int64_t timed = 0;
  std::int64_t pages_total = 0;
  for (const auto& [cu, events] : store.partitions()) {
    bool any = false;
    for (const auto& e : store.slice(cu, window)) {
      any = true;
      users.insert(e.user_id);
      if (e.kind != EventKind::access) continue;
      auto d = static_cast<std::size_t>(
          (std::chrono::floor<std::chrono::days>(e.timestamp) - day0).count());
      auto& day = s.days[d];
      ++day.visits;
      auto pages = e.integer("pages").value_or(1);
      day.pages += pages;
      pages_total += pages;
      if (e.flag("mobile")) ++day.mobile_hits;
      visitors[d].insert(e.user_id);
      ++sessions_by_hour[std::chrono::floor<std::chrono::hours>(e.timestamp)];
      if (auto dur = e.integer("duration")) {
        seconds += static_cast<double>(*dur);
        ++timed;
      }
    }
    if (any) ++s.active_cus;
  }
  for (std::size_t d = 0; d < n_days; ++d) {
    auto& day = s.days[d];
    day.visitors = static_cast<std::int64_t>(visitors[d].size());
    s.total_visits += day.visits;
    s.total_mobile_hits += day.mobile_hits;
    s.max_daily_visits = std::max(s.max_daily_visits, day.visits);
    s.max_daily_visitors = std::max(s.max_daily_visitors, day.visitors);
    s.max_daily_pages = std::max(s.max_daily_pages, day.pages);
    s.max_daily_mobile_hits = std::max(s.max_daily_mobile_hits, day.mobile_hits);
    s.visitors_per_day += static_cast<double>(day.visitors);
  }
  if (n_days > 0) {
    s.visits_per_day = static_cast<double>(s.total_visits) / static_cast<double>(n_days);
    s.visitors_per_day /= static_cast<double>(n_days);
    s.pages_per_day = static_cast<double>(pages_total) / static_cast<double>(n_days);
  }
  if (s.total_visits > 0) {
    s.pages_per_visit = static_cast<double>(pages_total) / static_cast<double>(s.total_visits);
  }
  if (timed > 0) s.mean_session_seconds = seconds / static_cast<double>(timed);
  for (const auto& [hour, n] : sessions_by_hour) s.max_sessions_per_hour = std::max(s.max_sessions_per_hour, n);
  s.distinct_users = static_cast<std::int64_t>(users.size());
  return s;
}

void write_summary(std::ostream& out, const UsageSummary& s) {
  ordered_json j;
  j["total_visits"] = s.total_visits;
  j["visits_per_day"] = s.visits_per_day;
  j["max_daily_visits"] = s.max_daily_visits;
  j["visitors_per_day"] = s.visitors_per_day;
  j["max_daily_visitors"] = s.max_daily_visitors;
  j["pages_per_day"] = s.pages_per_day;
  j["max_daily_pages"] = s.max_daily_pages;
  j["pages_per_visit"] = s.pages_per_visit;
  j["mean_session_seconds"] = s.mean_session_seconds;
  j["total_mobile_hits"] = s.total_mobile_hits;
  j["max_daily_mobile_hits"] = s.max_daily_mobile_hits;
  j["max_sessions_per_hour"] = s.max_sessions_per_hour;
  j["distinct_users"] = s.distinct_users;
  j["active_cus"] = s.active_cus;
  ordered_json days = ordered_json::array();
  for (const auto& d : s.days) {
    ordered_json dj;
    dj["day"] = format_timestamp(d.day).substr(0, 10);
    dj["visits"] = d.visits;
    dj["visitors"] = d.visitors;
    dj["pages"] = d.pages;
    dj["mobile_hits"] = d.mobile_hits;
    days.push_back(std::move(dj));
  }
  j["days"] = std::move(days);
  out << j.dump(2) << '\n';
}

}  // namespace tele
