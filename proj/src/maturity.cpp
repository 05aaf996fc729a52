#include "tele/maturity.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "jsonl.hpp"
#include "tele/error.hpp"

namespace tele {
namespace {

using detail::json;
using detail::ordered_json;

constexpr std::string_view kLevelSchema = "tele.levels";
constexpr int kLevelVersion = 1;

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

}  // namespace

std::string_view to_string(Level level) noexcept {
  switch (level) {
    case Level::entry: return "Entry";
    case Level::adoption: return "Adoption";
    case Level::adaptation: return "Adaptation";
    case Level::immersion: return "Immersion";
    case Level::transformation: return "Transformation";
  }
  return "?";
}

Level level_from_value(int value) {
  if (value < 1 || value > 5) {
    throw Error(Errc::invalid_argument, "level out of range: " + std::to_string(value));
  }
  return static_cast<Level>(value);
}

std::optional<std::string> check_cuts(const Cuts& cuts) {
  for (double c : cuts) {
    if (!std::isfinite(c)) return "non-finite cut";
  }
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (!(cuts[i - 1] < cuts[i])) return "cuts not strictly increasing";
  }
  if (cuts[0] < 0.0) return "first cut negative";
  return std::nullopt;
}

std::vector<std::string> validate_thresholds(const ThresholdSpec& spec) {
  std::vector<std::string> errors;
  if (!spec.version) errors.push_back("missing version");
  else if (*spec.version != 1) errors.push_back("unsupported version " + std::to_string(*spec.version));

  for (const auto& [name, cuts] : spec.dimensions) {
    if (!dimension_from_string(name)) errors.push_back("unknown dimension: " + name);
  }
  for (auto d : kDimensions) {
    std::string name(to_string(d));
    auto it = spec.dimensions.find(name);
    if (it == spec.dimensions.end()) {
      errors.push_back("missing dimension: " + name);
      continue;
    }
    if (it->second.size() != 4) {
      errors.push_back(name + ": expected 4 cuts, got " + std::to_string(it->second.size()));
      continue;
    }
    Cuts c{it->second[0], it->second[1], it->second[2], it->second[3]};
    if (auto why = check_cuts(c)) errors.push_back(name + ": " + *why);
  }
  return errors;
}

ThresholdConfig make_thresholds(const ThresholdSpec& spec) {
  auto errors = validate_thresholds(spec);
  if (!errors.empty()) throw Error(Errc::validation, join(errors));
  ThresholdConfig config;
  config.version = *spec.version;
  config.label = spec.label;
  for (auto d : kDimensions) {
    const auto& v = spec.dimensions.at(std::string(to_string(d)));
    config.cuts[index_of(d)] = {v[0], v[1], v[2], v[3]};
  }
  return config;
}

ThresholdConfig default_thresholds() {
  ThresholdConfig c;
  c.version = 1;
  c.label = "illustrative defaults, institution-tunable via back office";
  c.cuts[index_of(Dimension::dynamics)] = {1, 3, 7, 20};
  c.cuts[index_of(Dimension::information)] = {1, 2, 3, 4};
  c.cuts[index_of(Dimension::synchronous)] = {0.5, 1, 2, 4};
  c.cuts[index_of(Dimension::asynchronous)] = {10, 25, 50, 75};
  c.cuts[index_of(Dimension::content)] = {1, 3, 6, 10};
  c.cuts[index_of(Dimension::delivery)] = {1, 2, 3, 4};
  c.cuts[index_of(Dimension::evaluation)] = {1, 3, 6, 10};
  return c;
}

ThresholdSpec to_spec(const ThresholdConfig& config) {
  ThresholdSpec s;
  s.version = config.version;
  s.label = config.label;
  for (auto d : kDimensions) {
    const auto& c = config[d];
    s.dimensions[std::string(to_string(d))] = {c.begin(), c.end()};
  }
  return s;
}

ThresholdSpec read_threshold_spec(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, std::string("threshold file: ") + e.what());
  }
  if (!j.is_object()) throw Error(Errc::parse, "threshold file: expected an object");
  ThresholdSpec spec;
  if (auto it = j.find("version"); it != j.end()) {
    if (!it->is_number_integer()) throw Error(Errc::parse, "threshold file: version must be an integer");
    spec.version = it->get<int>();
  }
  if (auto it = j.find("label"); it != j.end() && it->is_string()) {
    spec.label = it->get<std::string>();
  }
  auto dims = j.find("dimensions");
  if (dims == j.end() || !dims->is_object()) {
    throw Error(Errc::parse, "threshold file: 'dimensions' object required");
  }
  for (auto it = dims->begin(); it != dims->end(); ++it) {
    if (!it->is_array()) throw Error(Errc::parse, "threshold file: " + it.key() + " must be a list");
    std::vector<double> cuts;
    for (const auto& v : *it) {
      if (v.is_number()) {
        cuts.push_back(v.get<double>());
      } else if (v.is_string()) {
        // "inf"/"nan" spelled as strings so that validation can report them.
        try {
          cuts.push_back(std::stod(v.get<std::string>()));
        } catch (const std::exception&) {
          throw Error(Errc::parse, "threshold file: " + it.key() + " has a non-numeric cut");
        }
      } else {
        throw Error(Errc::parse, "threshold file: " + it.key() + " has a non-numeric cut");
      }
    }
    spec.dimensions[it.key()] = std::move(cuts);
  }
  return spec;
}

void write_thresholds(std::ostream& out, const ThresholdConfig& config) {
  ordered_json j;
  j["version"] = config.version;
  j["label"] = config.label;
  ordered_json dims = ordered_json::object();
  for (auto d : kDimensions) dims[std::string(to_string(d))] = config[d];
  j["dimensions"] = dims;
  out << j.dump(2) << '\n';
}

ThresholdConfig load_thresholds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open threshold file " + path);
  return make_thresholds(read_threshold_spec(in));
}

Level classify(double value, const Cuts& cuts) {
  if (auto why = check_cuts(cuts)) throw Error(Errc::validation, *why);
  int level = 1;
  for (double c : cuts) {
    if (value >= c) ++level;
  }
  return static_cast<Level>(level);
}

double composite_score(std::span<const Level> levels) {
  if (levels.size() != kDimensionCount) {
    throw Error(Errc::invalid_argument,
                "composite needs 7 levels, got " + std::to_string(levels.size()));
  }
  int sum = 0;
  for (auto l : levels) sum += value_of(l);
  return static_cast<double>(sum) / static_cast<double>(kDimensionCount);
}

LevelProfile profile_levels(const DimensionProfile& profile,
                            const ThresholdConfig& config) {
  LevelProfile out;
  out.cu_id = profile.cu_id;
  out.window = profile.window;
  for (auto d : kDimensions) {
    out.levels[index_of(d)] =
        profile.no_activity ? Level::entry : classify(profile.scalar(d), config[d]);
  }
  out.composite = composite_score(out.levels);
  return out;
}

void write_level_profiles(std::ostream& out, std::span<const LevelProfile> levels) {
  out << detail::header_line(kLevelSchema, kLevelVersion) << '\n';
  for (const auto& l : levels) {
    ordered_json j;
    j["cu"] = l.cu_id;
    j["window"] = format_window(l.window);
    ordered_json lv = ordered_json::object();
    for (auto d : kDimensions) lv[std::string(to_string(d))] = value_of(l[d]);
    j["levels"] = lv;
    j["composite"] = l.composite;
    out << j.dump() << '\n';
  }
}

std::vector<LevelProfile> read_level_profiles(std::istream& in) {
  std::size_t line_no = 0;
  detail::expect_header(in, kLevelSchema, kLevelVersion, line_no);
  std::vector<LevelProfile> out;
  std::string line;
  while (detail::next_line(in, line, line_no)) {
    json j = detail::parse_json_line(line, line_no);
    try {
      LevelProfile l;
      l.cu_id = j.at("cu").get<std::string>();
      l.window = parse_window(j.at("window").get<std::string>());
      for (auto d : kDimensions) {
        l.levels[index_of(d)] =
            level_from_value(j.at("levels").at(std::string(to_string(d))).get<int>());
      }
      l.composite = composite_score(l.levels);
      out.push_back(std::move(l));
    } catch (const json::exception& e) {
      throw Error(Errc::parse, detail::line_prefix(line_no) + e.what());
    } catch (const Error& e) {
      throw Error(Errc::parse, detail::line_prefix(line_no) + e.what());
    }
  }
  return out;
}

}  // namespace tele
