#include "tele/survey.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "jsonl.hpp"
#include "tele/digest.hpp"
#include "tele/error.hpp"

namespace tele {
namespace {

using detail::json;
using detail::ordered_json;

constexpr std::string_view kInstrumentSchema = "tele.instrument";
constexpr std::string_view kResponseSchema = "tele.responses";

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct RawRow {
  std::string respondent, cu, item, value, timestamp;
};

class ResponseChecker {
 public:
  ResponseChecker(const Instrument& instrument, const OrgTree& tree)
      : instrument_(instrument), tree_(tree) {}

  void row(const RawRow& raw, std::size_t line_no, ResponseIngestResult& out) const {
    auto reject = [&](std::string reason, std::string detail) {
      out.rejects.push_back({line_no, std::move(reason), std::move(detail)});
    };
    if (raw.respondent.empty() || raw.cu.empty() || raw.item.empty()) {
      return reject("malformed row", "empty id field");
    }
    int value = 0;
    auto [ptr, ec] = std::from_chars(raw.value.data(), raw.value.data() + raw.value.size(), value);
    if (ec != std::errc{} || ptr != raw.value.data() + raw.value.size()) {
      return reject("malformed row", "value '" + raw.value + "' is not an integer");
    }
    Timestamp ts;
    try {
      ts = parse_timestamp(raw.timestamp);
    } catch (const Error& e) {
      return reject("malformed row", e.what());
    }
    const InstrumentItem* item = instrument_.find(raw.item);
    if (item == nullptr) return reject("unknown item", raw.item);
    const CourseUnit* cu = tree_.find_course_unit(raw.cu);
    if (cu == nullptr) return reject("unknown cu", raw.cu);
    bool is_teacher = cu->teacher_ids.contains(raw.respondent);
    bool is_student = cu->enrolled_student_ids.contains(raw.respondent);
    if (!is_teacher && !is_student) {
      return reject("not a member", raw.respondent + " in " + raw.cu);
    }
    bool matches = instrument_.audience == Audience::teacher ? is_teacher : is_student;
    if (!matches) {
      return reject("audience mismatch",
                    raw.respondent + " answered the " +
                        std::string(to_string(instrument_.audience)) + " instrument");
    }
    if (value < instrument_.scale_min || value > instrument_.scale_max) {
      return reject("scale violation", "value " + raw.value);
    }
    out.store.add({raw.respondent, raw.cu, raw.item, value, ts}, instrument_.audience,
                  item->dimension);
  }

 private:
  const Instrument& instrument_;
  const OrgTree& tree_;
};

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_null()) return {};
  return v.dump();
}

}  // namespace

std::string_view to_string(Audience a) noexcept {
  return a == Audience::teacher ? "teacher" : "student";
}

Audience audience_from_string(std::string_view name) {
  if (name == "teacher") return Audience::teacher;
  if (name == "student") return Audience::student;
  throw Error(Errc::parse, "unknown audience '" + std::string(name) + "'");
}

const InstrumentItem* Instrument::find(std::string_view item_id) const {
  for (const auto& it : items) {
    if (it.id == item_id) return &it;
  }
  return nullptr;
}

void validate_instrument(const Instrument& instrument) {
  if (instrument.scale_min != 1 || instrument.scale_max != 5) {
    throw Error(Errc::validation, "bad scale: expected Likert 1..5, got " +
                                      std::to_string(instrument.scale_min) + ".." +
                                      std::to_string(instrument.scale_max));
  }
  std::set<std::string> ids;
  PerDimension<int> coverage{};
  for (const auto& item : instrument.items) {
    if (item.id.empty()) throw Error(Errc::validation, "empty item id");
    if (!ids.insert(item.id).second) {
      throw Error(Errc::validation, "duplicate item_id: " + item.id);
    }
    ++coverage[index_of(item.dimension)];
  }
  for (auto d : kDimensions) {
    if (coverage[index_of(d)] == 0) {
      throw Error(Errc::validation, "dimension with zero items: " + std::string(to_string(d)));
    }
  }
}

Instrument read_instrument(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, std::string("instrument file: ") + e.what());
  }
  Instrument inst;
  try {
    if (j.at("schema").get<std::string>() != kInstrumentSchema || j.at("version").get<int>() != 1) {
      throw Error(Errc::parse, "instrument file: unsupported schema or version");
    }
    inst.audience = audience_from_string(j.at("audience").get<std::string>());
    inst.title = j.value("title", "");
    if (auto s = j.find("scale"); s != j.end()) {
      inst.scale_min = s->at("min").get<int>();
      inst.scale_max = s->at("max").get<int>();
    }
    for (const auto& item : j.at("items")) {
      auto dim_name = item.at("dimension").get<std::string>();
      auto dim = dimension_from_string(dim_name);
      if (!dim) throw Error(Errc::validation, "unknown dimension '" + dim_name + "'");
      inst.items.push_back({item.at("id").get<std::string>(),
                            item.value("prompt", ""), *dim});
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse, std::string("instrument file: ") + e.what());
  }
  validate_instrument(inst);
  return inst;
}

void write_instrument(std::ostream& out, const Instrument& instrument) {
  ordered_json j;
  j["schema"] = kInstrumentSchema;
  j["version"] = 1;
  j["audience"] = to_string(instrument.audience);
  j["title"] = instrument.title;
  j["scale"] = {{"min", instrument.scale_min}, {"max", instrument.scale_max}};
  ordered_json items = ordered_json::array();
  for (const auto& it : instrument.items) {
    ordered_json o;
    o["id"] = it.id;
    o["dimension"] = to_string(it.dimension);
    o["prompt"] = it.prompt;
    items.push_back(std::move(o));
  }
  j["items"] = std::move(items);
  out << j.dump(2) << '\n';
}

Instrument load_instrument(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open instrument file " + path);
  return read_instrument(in);
}

Instrument default_instrument(Audience audience) {
  const bool teacher = audience == Audience::teacher;
  Instrument inst;
  inst.audience = audience;
  inst.title = teacher ? "Teacher questionnaire (placeholder items)"
                       : "Student questionnaire (placeholder items)";
  const std::string p = teacher ? "t" : "s";
  auto add = [&](Dimension d, const char* tprompt, const char* sprompt, int n) {
    inst.items.push_back({p + "_" + std::string(to_string(d)) + "_" + std::to_string(n),
                          teacher ? tprompt : sprompt, d});
  };
  add(Dimension::dynamics, "I access the CU area in the LCMS several times a week.",
      "I access the CU area in the LCMS several times a week.", 1);
  add(Dimension::dynamics, "My students need the LCMS to follow the CU.",
      "I could not follow the CU without the LCMS.", 2);
  add(Dimension::information, "Notices, programme and calendar of the CU are kept current.",
      "I find the notices, programme and calendar of the CU in the LCMS.", 1);
  add(Dimension::information, "Students get all relevant CU information from the LCMS.",
      "All relevant information about the CU is in the LCMS.", 2);
  add(Dimension::synchronous, "I open forums for discussion of CU topics.",
      "Forums are used for discussion in this CU.", 1);
  add(Dimension::synchronous, "Forum participation matters for knowledge building.",
      "Forum participation helps me learn in this CU.", 2);
  add(Dimension::asynchronous, "I use the LCMS communication tools with my students.",
      "I use the LCMS communication tools in this CU.", 1);
  add(Dimension::asynchronous, "Communication tools are important in this CU.",
      "Communication tools are important in this CU.", 2);
  add(Dimension::content, "I publish rich digital content (video, presentations, games).",
      "The CU offers rich digital content beyond text and images.", 1);
  add(Dimension::content, "Digital content covers most key topics of the CU.",
      "Digital content covers most key topics of the CU.", 2);
  add(Dimension::delivery, "Assignments are delivered through the LCMS.",
      "I deliver my assignments through the LCMS.", 1);
  add(Dimension::delivery, "I use group monitoring or plagiarism detection.",
      "Group work is followed through the LCMS.", 2);
  add(Dimension::evaluation, "I run tests in the LCMS.", "I take tests in the LCMS.", 1);
  add(Dimension::evaluation, "LCMS tests regulate the study of the CU.",
      "LCMS tests help me regulate my study.", 2);
  return inst;
}

void ResponseStore::add(const SurveyResponse& r, Audience audience, Dimension dimension) {
  Key key{r.cu_id, r.respondent_id, r.item_id, audience};
  auto it = entries_.find(key);
  if (it != entries_.end() && it->second.response.timestamp > r.timestamp) return;
  entries_.insert_or_assign(key, Entry{r, audience, dimension});
}

void ResponseStore::merge(const ResponseStore& other) {
  for (const auto& [key, e] : other.entries_) add(e.response, e.audience, e.dimension);
}

std::vector<ResponseStore::Entry> ResponseStore::entries() const {
  std::vector<Entry> out;
  out.reserve(entries_.size());
  for (const auto& [key, e] : entries_) out.push_back(e);
  return out;
}

std::vector<ResponseStore::Entry> ResponseStore::entries_for(std::string_view cu,
                                                             Audience audience) const {
  std::vector<Entry> out;
  auto it = entries_.lower_bound(Key{std::string(cu), "", "", Audience::teacher});
  for (; it != entries_.end() && std::get<0>(it->first) == cu; ++it) {
    if (it->second.audience == audience) out.push_back(it->second);
  }
  return out;
}

std::string ResponseStore::digest() const {
  std::string buf;
  for (const auto& [key, e] : entries_) {
    const auto& r = e.response;
    buf += r.cu_id + ',' + r.respondent_id + ',' + r.item_id + ',' +
           std::to_string(r.value) + ',' + format_timestamp(r.timestamp) + ',' +
           std::string(to_string(e.audience)) + '\n';
  }
  return sha256_hex(buf);
}

ResponseIngestResult ingest_responses(std::istream& in, const Instrument& instrument,
                                      const OrgTree& tree) {
  ResponseIngestResult out;
  ResponseChecker check(instrument, tree);
  std::size_t line_no = 0;
  std::string line;
  if (!detail::next_line(in, line, line_no)) return out;

  if (line.front() == '{') {
    json h = detail::parse_json_line(line, line_no);
    if (!h.is_object() || h.value("schema", "") != kResponseSchema || h.value("version", 0) != 1) {
      throw Error(Errc::parse, "response file: expected header with schema 'tele.responses'");
    }
    while (detail::next_line(in, line, line_no)) {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error&) {
        out.rejects.push_back({line_no, "malformed row", "not a JSON object"});
        continue;
      }
      if (!j.is_object()) {
        out.rejects.push_back({line_no, "malformed row", "not a JSON object"});
        continue;
      }
      RawRow raw{scalar_text(j.value("respondent_id", json())), scalar_text(j.value("cu_id", json())),
                 scalar_text(j.value("item_id", json())), scalar_text(j.value("value", json())),
                 scalar_text(j.value("timestamp", json()))};
      check.row(raw, line_no, out);
    }
    return out;
  }

  auto header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* name : {"respondent_id", "cu_id", "item_id", "value", "timestamp"}) {
    if (!col.contains(name)) {
      throw Error(Errc::parse, std::string("response table: header lacks column '") + name + "'");
    }
  }
  while (detail::next_line(in, line, line_no)) {
    auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      out.rejects.push_back({line_no, "malformed row",
                             "expected " + std::to_string(header.size()) + " columns, got " +
                                 std::to_string(cells.size())});
      continue;
    }
    RawRow raw{cells[col["respondent_id"]], cells[col["cu_id"]], cells[col["item_id"]],
               cells[col["value"]], cells[col["timestamp"]]};
    check.row(raw, line_no, out);
  }
  return out;
}

void write_responses_csv(std::ostream& out, std::span<const SurveyResponse> responses) {
  out << "respondent_id,cu_id,item_id,value,timestamp\n";
  for (const auto& r : responses) {
    out << csv_field(r.respondent_id) << ',' << csv_field(r.cu_id) << ','
        << csv_field(r.item_id) << ',' << r.value << ',' << format_timestamp(r.timestamp)
        << '\n';
  }
}

PerDimension<SurveyScore> survey_scores(const ResponseStore& store, const OrgTree& tree,
                                        std::string_view cu, Audience audience,
                                        std::optional<Window> window) {
  tree.course_unit(cu);
  PerDimension<long long> sums{};
  PerDimension<long long> counts{};
  PerDimension<std::set<std::string>> respondents{};
  for (const auto& e : store.entries_for(cu, audience)) {
    if (window && !window->contains(e.response.timestamp)) continue;
    auto i = index_of(e.dimension);
    sums[i] += e.response.value;
    ++counts[i];
    respondents[i].insert(e.response.respondent_id);
  }
  PerDimension<SurveyScore> out;
  for (auto d : kDimensions) {
    auto i = index_of(d);
    SurveyScore& s = out[i];
    s.cu_id = std::string(cu);
    s.audience = audience;
    s.dimension = d;
    s.window = window;
    s.respondent_count = respondents[i].size();
    if (counts[i] > 0) {
      s.score = static_cast<double>(sums[i]) / static_cast<double>(counts[i]);
    }
  }
  return out;
}

std::vector<SurveyScore> all_survey_scores(const ResponseStore& store, const OrgTree& tree,
                                           std::span<const Window> windows) {
  std::vector<SurveyScore> out;
  for (const auto& [id, cu] : tree.course_units()) {
    for (auto audience : {Audience::teacher, Audience::student}) {
      for (const auto& w : windows) {
        auto scores = survey_scores(store, tree, id, audience, w);
        out.insert(out.end(), scores.begin(), scores.end());
      }
    }
  }
  return out;
}

}  // namespace tele
