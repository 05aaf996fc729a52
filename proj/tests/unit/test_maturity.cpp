#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "support/oracle.hpp"
#include "tele/error.hpp"
#include "tele/maturity.hpp"

using namespace tele;

namespace {

Cuts random_cuts(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> step(0.01, 10.0);
  Cuts c{};
  double v = std::uniform_real_distribution<double>(0.0, 5.0)(rng) - 0.01;
  for (auto& x : c) {
    v += step(rng);
    x = v;
  }
  return c;
}

ThresholdSpec spec_with(const std::string& dim, std::vector<double> cuts) {
  ThresholdSpec s = to_spec(default_thresholds());
  s.dimensions[dim] = std::move(cuts);
  return s;
}

}  // namespace

TEST_CASE("boundaries are lower-inclusive") {
  Cuts c{1, 3, 7, 20};
  CHECK(classify(0.999, c) == Level::entry);
  CHECK(classify(1.0, c) == Level::adoption);
  CHECK(classify(2.999, c) == Level::adoption);
  CHECK(classify(3.0, c) == Level::adaptation);
  CHECK(classify(7.0, c) == Level::immersion);
  CHECK(classify(19.999, c) == Level::immersion);
  CHECK(classify(20.0, c) == Level::transformation);
  CHECK(classify(1e300, c) == Level::transformation);
  CHECK(classify(-1e300, c) == Level::entry);
}

TEST_CASE("classify agrees with the longhand step function") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    Cuts c = random_cuts(rng);
    std::uniform_real_distribution<double> v(c[0] - 5.0, c[3] + 5.0);
    for (int k = 0; k < 20; ++k) {
      double x = v(rng);
      CHECK(value_of(classify(x, c)) == testing::oracle_level(x, c));
    }
    for (double cut : c) {
      CHECK(value_of(classify(cut, c)) == testing::oracle_level(cut, c));
      double below = std::nextafter(cut, -std::numeric_limits<double>::infinity());
      CHECK(value_of(classify(below, c)) == value_of(classify(cut, c)) - 1);
    }
  }
}

TEST_CASE("classify is monotone in the value") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    Cuts c = random_cuts(rng);
    std::uniform_real_distribution<double> v(c[0] - 5.0, c[3] + 5.0);
    double a = v(rng), b = v(rng);
    if (a > b) std::swap(a, b);
    CHECK(classify(a, c) <= classify(b, c));
  }
}

TEST_CASE("raising a cut never raises a level") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    Cuts c = random_cuts(rng);
    std::size_t k = rng() % 4;
    Cuts raised = c;
    double room = k == 3 ? 10.0 : c[k + 1] - c[k];
    raised[k] += std::uniform_real_distribution<double>(0.0, room)(rng) * 0.999;
    if (check_cuts(raised)) continue;
    std::uniform_real_distribution<double> v(c[0] - 5.0, c[3] + 15.0);
    for (int j = 0; j < 20; ++j) {
      double x = v(rng);
      CHECK(classify(x, raised) <= classify(x, c));
    }
  }
}

TEST_CASE("invalid cuts are rejected") {
  CHECK(check_cuts({1, 2, 3, 4}) == std::nullopt);
  CHECK(check_cuts({1, 1, 3, 4}).has_value());
  CHECK(check_cuts({4, 3, 2, 1}).has_value());
  CHECK(check_cuts({0, 1, std::nan(""), 4}).has_value());
  CHECK(check_cuts({0, 1, 2, std::numeric_limits<double>::infinity()}).has_value());
  CHECK_THROWS_AS(classify(1.0, Cuts{2, 1, 3, 4}), Error);
  CHECK(check_cuts({-1, 1, 2, 3}).has_value());
}

TEST_CASE("threshold validation names the dimension") {
  CHECK(validate_thresholds(to_spec(default_thresholds())).empty());

  auto errors = validate_thresholds(spec_with("content", {1, 3, 3, 10}));
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find("content") != std::string::npos);

  errors = validate_thresholds(spec_with("delivery", {1, 2, 3}));
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find("delivery") != std::string::npos);

  ThresholdSpec missing = to_spec(default_thresholds());
  missing.dimensions.erase("evaluation");
  missing.dimensions["vibes"] = {1, 2, 3, 4};
  errors = validate_thresholds(missing);
  CHECK(errors.size() == 2);

  try {
    make_thresholds(spec_with("dynamics", {5, 4, 3, 2}));
    FAIL("bad thresholds accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::validation);
    CHECK(std::string(e.what()).find("dynamics") != std::string::npos);
  }
}

TEST_CASE("threshold file round-trips") {
  std::stringstream s;
  write_thresholds(s, default_thresholds());
  ThresholdConfig back = make_thresholds(read_threshold_spec(s));
  CHECK(back.cuts == default_thresholds().cuts);
  std::stringstream bad("{\"version\":1,\"dimensions\":{\"dynamics\":[1,\"x\",3,4]}}");
  CHECK_THROWS_AS(read_threshold_spec(bad), Error);
}

TEST_CASE("no activity classifies all Entry with composite 1") {
  DimensionProfile p;
  p.cu_id = "C";
  p.window = parse_window("2011-10-17..2011-10-24");
  LevelProfile lp = profile_levels(p, default_thresholds());
  for (auto d : kDimensions) CHECK(lp[d] == Level::entry);
  CHECK(lp.composite == 1.0);

  // Cuts at zero would put an idle CU at Adoption; no activity overrides that.
  ThresholdSpec low = to_spec(default_thresholds());
  for (auto& [name, cuts] : low.dimensions) cuts = {0, 1, 2, 3};
  LevelProfile forced = profile_levels(p, make_thresholds(low));
  for (auto d : kDimensions) CHECK(forced[d] == Level::entry);
}

TEST_CASE("composite is the plain mean of seven levels") {
  std::vector<Level> seven(7, Level::transformation);
  CHECK(composite_score(seven) == 5.0);
  seven[0] = Level::entry;
  CHECK(composite_score(seven) == doctest::Approx(31.0 / 7.0).epsilon(1e-15));
  std::vector<Level> six(6, Level::entry);
  CHECK_THROWS_AS(composite_score(six), Error);
  CHECK_THROWS_AS(level_from_value(0), Error);
  CHECK_THROWS_AS(level_from_value(6), Error);
}

TEST_CASE("level profiles round-trip") {
  DimensionProfile p;
  p.cu_id = "C";
  p.window = parse_window("2011-10-17..2011-10-24");
  p.no_activity = false;
  p.active_user_count = 3;
  p.access_dynamics = 8.0;
  p.information_presence = 4;
  std::vector<LevelProfile> ls{profile_levels(p, default_thresholds())};
  CHECK(ls[0][Dimension::dynamics] == Level::immersion);
  CHECK(ls[0][Dimension::information] == Level::transformation);
  std::stringstream s;
  write_level_profiles(s, ls);
  CHECK(read_level_profiles(s) == ls);
}
