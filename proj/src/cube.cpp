#include "tele/cube.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "jsonl.hpp"
#include "tele/error.hpp"

namespace tele {
namespace {

using detail::json;
using detail::ordered_json;

constexpr std::string_view kCubeSchema = "tele.cube";

constexpr std::array<std::string_view, kSourceCount> kSourceNames{
    "automatic_report", "teacher_view", "student_view"};

Source source_of(Audience a) {
  return a == Audience::teacher ? Source::teacher_view : Source::student_view;
}

std::string number_text(double v) { return json(v).dump(); }

}  // namespace

std::string_view to_string(Source s) noexcept { return kSourceNames[index_of(s)]; }

std::optional<Source> source_from_string(std::string_view name) noexcept {
  for (auto s : kSources) {
    if (kSourceNames[index_of(s)] == name) return s;
  }
  return std::nullopt;
}

Cube::Cube(std::shared_ptr<const OrgTree> org, std::vector<Window> periods,
           Provenance provenance)
    : org_(std::move(org)), periods_(std::move(periods)), provenance_(std::move(provenance)) {
  if (!org_) throw Error(Errc::invalid_argument, "cube needs an org tree");
  for (const auto& w : periods_) {
    if (!w.valid()) throw Error(Errc::validation, "inverted period " + format_window(w));
  }
  for (std::size_t i = 0; i < periods_.size(); ++i) {
    for (std::size_t j = i + 1; j < periods_.size(); ++j) {
      if (periods_[i] == periods_[j]) {
        throw Error(Errc::validation, "duplicate period " + format_window(periods_[i]));
      }
    }
  }
  for (const auto& [id, cu] : org_->course_units()) cu_ids_.push_back(id);
  cells_.resize(cu_ids_.size() * kDimensionCount * kSourceCount * periods_.size());
}

std::size_t Cube::period_index(const Window& w) const {
  auto it = std::find(periods_.begin(), periods_.end(), w);
  if (it == periods_.end()) {
    throw Error(Errc::not_found, "unknown period " + format_window(w));
  }
  return static_cast<std::size_t>(it - periods_.begin());
}

void Cube::check_period(std::size_t period) const {
  if (period >= periods_.size()) {
    throw Error(Errc::not_found, "unknown period index " + std::to_string(period));
  }
}

std::size_t Cube::cu_index(std::string_view cu) const {
  auto it = std::lower_bound(cu_ids_.begin(), cu_ids_.end(), cu);
  if (it == cu_ids_.end() || *it != cu) {
    throw Error(Errc::not_found, "unknown cu: " + std::string(cu));
  }
  return static_cast<std::size_t>(it - cu_ids_.begin());
}

std::size_t Cube::slot(std::size_t cu, Dimension d, Source s, std::size_t period) const {
  return ((cu * periods_.size() + period) * kDimensionCount + index_of(d)) * kSourceCount +
         index_of(s);
}

std::optional<double> Cube::base(std::string_view cu, Dimension d, Source s,
                                 std::size_t period) const {
  check_period(period);
  return cells_[slot(cu_index(cu), d, s, period)];
}

void Cube::set_base(std::string_view cu, Dimension d, Source s, std::size_t period,
                    double score) {
  check_period(period);
  if (!(score >= 1.0 && score <= 5.0)) {
    throw Error(Errc::validation, "score out of [1,5] for cu " + std::string(cu));
  }
  auto& cell = cells_[slot(cu_index(cu), d, s, period)];
  if (!cell) ++present_;
  cell = score;
}

CubeCell Cube::aggregate(std::string_view node, Dimension d, Source s,
                         std::size_t period) const {
  check_period(period);
  const auto& cus = org_->descendant_cu_list(node);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& cu : cus) {
    if (const auto& v = cells_[slot(cu_index(cu), d, s, period)]) {
      sum += *v;
      ++n;
    }
  }
  CubeCell cell{std::string(node), d, s, period, std::nullopt, n};
  if (n > 0) cell.score = sum / static_cast<double>(n);
  return cell;
}

Cube build_cube(std::span<const LevelProfile> levels, std::span<const SurveyScore> surveys,
                std::shared_ptr<const OrgTree> org, std::vector<Window> periods,
                Provenance provenance) {
  Cube cube(std::move(org), std::move(periods), std::move(provenance));
  auto period_of = [&](const std::optional<Window>& w, std::string_view what) {
    if (!w) throw Error(Errc::validation, std::string(what) + " without a period");
    auto it = std::find(cube.periods().begin(), cube.periods().end(), *w);
    if (it == cube.periods().end()) {
      throw Error(Errc::validation,
                  "period mismatch: " + std::string(what) + " uses " + format_window(*w));
    }
    return static_cast<std::size_t>(it - cube.periods().begin());
  };
  auto check_cu = [&](const std::string& cu) {
    if (cube.org().find_course_unit(cu) == nullptr) {
      throw Error(Errc::validation, "unknown cu in cube inputs: " + cu);
    }
  };

  for (const auto& lp : levels) {
    check_cu(lp.cu_id);
    auto p = period_of(lp.window, "level profile of " + lp.cu_id);
    if (cube.base(lp.cu_id, Dimension::dynamics, Source::automatic_report, p)) {
      throw Error(Errc::validation,
                  "duplicate level profile for " + lp.cu_id + " in " + format_window(lp.window));
    }
    for (auto d : kDimensions) {
      cube.set_base(lp.cu_id, d, Source::automatic_report, p, value_of(lp[d]));
    }
  }
  for (const auto& s : surveys) {
    check_cu(s.cu_id);
    auto p = period_of(s.window, "survey score of " + s.cu_id);
    if (s.score) cube.set_base(s.cu_id, s.dimension, source_of(s.audience), p, *s.score);
  }
  return cube;
}

void validate_query(const Cube& cube, const CubeQuery& q) {
  const OrgNode& scope = cube.org().node(q.org_scope);
  if (depth_of(q.granularity) < depth_of(scope.kind)) {
    throw Error(Errc::invalid_argument,
                "granularity " + std::string(to_string(q.granularity)) + " is above scope " +
                    q.org_scope + " (" + std::string(to_string(scope.kind)) + ")");
  }
  if (q.periods) {
    for (auto p : *q.periods) {
      if (p >= cube.periods().size()) {
        throw Error(Errc::not_found, "unknown period index " + std::to_string(p));
      }
    }
  }
  if (q.nodes) {
    for (const auto& n : *q.nodes) {
      const OrgNode& node = cube.org().node(n);
      if (node.kind != q.granularity || !cube.org().is_within(n, q.org_scope)) {
        throw Error(Errc::invalid_argument, "node restriction " + n + " outside query");
      }
    }
  }
}

std::vector<std::string> query_nodes(const OrgTree& org, const CubeQuery& q) {
  auto nodes = org.nodes_under(q.org_scope, q.granularity);
  if (q.nodes) {
    std::erase_if(nodes, [&](const std::string& n) {
      return std::find(q.nodes->begin(), q.nodes->end(), n) == q.nodes->end();
    });
  }
  return nodes;
}

std::vector<CubeCell> query(const Cube& cube, const CubeQuery& q) {
  validate_query(cube, q);
  std::vector<Dimension> dims =
      q.dimensions ? *q.dimensions : std::vector<Dimension>(kDimensions.begin(), kDimensions.end());
  std::vector<Source> sources =
      q.sources ? *q.sources : std::vector<Source>(kSources.begin(), kSources.end());
  std::vector<std::size_t> periods;
  if (q.periods) {
    periods = *q.periods;
  } else {
    for (std::size_t i = 0; i < cube.periods().size(); ++i) periods.push_back(i);
  }
  std::vector<CubeCell> out;
  for (const auto& node : query_nodes(cube.org(), q)) {
    for (auto d : dims) {
      for (auto s : sources) {
        for (auto p : periods) out.push_back(cube.aggregate(node, d, s, p));
      }
    }
  }
  return out;
}

CubeCell aggregate_node(const Cube& cube, std::string_view node, Dimension d, Source s,
                        std::size_t period) {
  return cube.aggregate(node, d, s, period);
}

std::vector<CubeCell> drill_down(const Cube& cube, std::string_view node, Dimension d,
                                 Source s, std::size_t period) {
  const OrgNode& n = cube.org().node(node);
  if (n.kind == NodeKind::course_unit) {
    throw Error(Errc::invalid_argument, "leaf node: cannot drill below cu " + n.id);
  }
  std::vector<CubeCell> out;
  for (const auto& child : n.children) out.push_back(cube.aggregate(child, d, s, period));
  return out;
}

void write_cube(std::ostream& out, const Cube& cube) {
  out << detail::header_line(kCubeSchema, 1) << '\n';
  ordered_json meta;
  meta["periods"] = ordered_json::array();
  for (const auto& w : cube.periods()) meta["periods"].push_back(format_window(w));
  meta["provenance"] = {{"org", cube.provenance().org},
                        {"events", cube.provenance().events},
                        {"surveys", cube.provenance().surveys}};
  out << meta.dump() << '\n';
  for (const auto& [cu, unit] : cube.org().course_units()) {
    for (std::size_t p = 0; p < cube.periods().size(); ++p) {
      for (auto d : kDimensions) {
        for (auto s : kSources) {
          auto v = cube.base(cu, d, s, p);
          if (!v) continue;
          ordered_json j;
          j["cu"] = cu;
          j["period"] = p;
          j["dimension"] = to_string(d);
          j["source"] = to_string(s);
          j["score"] = *v;
          out << j.dump() << '\n';
        }
      }
    }
  }
}

Cube read_cube(std::istream& in, std::shared_ptr<const OrgTree> org) {
  std::size_t line_no = 0;
  detail::expect_header(in, kCubeSchema, 1, line_no);
  std::string line;
  if (!detail::next_line(in, line, line_no)) throw Error(Errc::parse, "cube file: missing metadata");
  json meta = detail::parse_json_line(line, line_no);
  std::vector<Window> periods;
  Provenance prov;
  try {
    for (const auto& p : meta.at("periods")) periods.push_back(parse_window(p.get<std::string>()));
    const auto& pv = meta.at("provenance");
    prov = {pv.at("org").get<std::string>(), pv.at("events").get<std::string>(),
            pv.at("surveys").get<std::string>()};
  } catch (const json::exception& e) {
    throw Error(Errc::parse, detail::line_prefix(line_no) + e.what());
  }
  Cube cube(std::move(org), std::move(periods), std::move(prov));
  while (detail::next_line(in, line, line_no)) {
    json j = detail::parse_json_line(line, line_no);
    try {
      auto d = dimension_from_string(j.at("dimension").get<std::string>());
      auto s = source_from_string(j.at("source").get<std::string>());
      if (!d || !s) throw Error(Errc::parse, "unknown dimension or source");
      auto cu = j.at("cu").get<std::string>();
      if (cube.org().find_course_unit(cu) == nullptr) {
        throw Error(Errc::validation, "unknown cu in cube file: " + cu);
      }
      cube.set_base(cu, *d, *s, j.at("period").get<std::size_t>(), j.at("score").get<double>());
    } catch (const json::exception& e) {
      throw Error(Errc::parse, detail::line_prefix(line_no) + e.what());
    }
  }
  return cube;
}

void write_cells_csv(std::ostream& out, const Cube& cube, std::span<const CubeCell> cells) {
  out << "node,kind,dimension,source,period,score,level,cu_count\n";
  for (const auto& c : cells) {
    out << c.node_id << ',' << to_string(cube.org().node(c.node_id).kind) << ','
        << to_string(c.dimension) << ',' << to_string(c.source) << ','
        << format_window(cube.periods()[c.period]) << ',';
    if (c.score) {
      // Presentation-only re-discretization: nearest level.
      int level = static_cast<int>(*c.score + 0.5);
      out << number_text(*c.score) << ',' << to_string(level_from_value(level));
    } else {
      out << "MISSING,";
    }
    out << ',' << c.cu_count << '\n';
  }
}

}  // namespace tele
