#include "tele/radar_report.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "jsonl.hpp"
#include "tele/error.hpp"
#include "tele/maturity.hpp"

namespace tele {
namespace {

using detail::json;
using detail::ordered_json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string escape_xml(std::string_view in) {
  std::string out;
  for (char c : in) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Point {
  double x, y;
};

class Geometry {
 public:
  explicit Geometry(const RadarStyle& style)
      : c_(style.size / 2.0), r_(style.outer_radius) {}

  double center() const { return c_; }

  Point at(std::size_t axis, double radius) const {
    double angle = -std::numbers::pi / 2.0 +
                   2.0 * std::numbers::pi * static_cast<double>(axis) /
                       static_cast<double>(kDimensionCount);
    return {c_ + radius * std::cos(angle), c_ + radius * std::sin(angle)};
  }

  double radius_of(double value) const { return (value - 1.0) / 4.0 * r_; }

 private:
  double c_;
  double r_;
};

std::string points_attr(const std::vector<Point>& pts) {
  std::string out;
  for (const auto& p : pts) {
    if (!out.empty()) out += ' ';
    out += num(p.x) + "," + num(p.y);
  }
  return out;
}

}  // namespace

std::string_view source_label(Source s) noexcept {
  switch (s) {
    case Source::automatic_report: return "Automatic reports";
    case Source::teacher_view: return "Teachers' view";
    case Source::student_view: return "Students' view";
  }
  return "?";
}

void validate_dataset(const RadarDataset& dataset) {
  if (dataset.axes.size() != kDimensionCount ||
      !std::equal(dataset.axes.begin(), dataset.axes.end(), kDimensions.begin())) {
    throw Error(Errc::validation, "radar axes must follow the fixed dimension order");
  }
  if (dataset.series.size() > kSourceCount) {
    throw Error(Errc::validation, "radar dataset has more than three series");
  }
  for (const auto& s : dataset.series) {
    for (const auto& v : s.values) {
      if (v && !(*v >= 1.0 && *v <= 5.0)) {
        throw Error(Errc::validation, "radar value outside [1,5] in series " + s.label);
      }
    }
  }
}

RadarDataset radar_dataset(const Cube& cube, std::string_view node, std::size_t period,
                           const Principal& principal) {
  const OrgNode& n = cube.org().node(node);
  if (period >= cube.periods().size()) {
    throw Error(Errc::not_found, "unknown period index " + std::to_string(period));
  }
  CubeQuery q;
  q.org_scope = n.id;
  q.granularity = n.kind;
  q.periods = std::vector<std::size_t>{period};
  authorize(principal, q, cube.org());

  RadarDataset ds;
  ds.node_id = n.id;
  ds.node_name = n.name;
  ds.period = format_window(cube.periods()[period]);
  for (auto s : kSources) {
    RadarSeries series{s, std::string(source_label(s)), {}};
    for (auto d : kDimensions) {
      series.values[index_of(d)] = cube.aggregate(n.id, d, s, period).score;
    }
    ds.series.push_back(std::move(series));
  }
  return ds;
}

std::string render_svg(const RadarDataset& dataset, const RadarStyle& style) {
  validate_dataset(dataset);
  Geometry g(style);
  const double c = g.center();
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(style.size)
    << "\" height=\"" << num(style.size) << "\" viewBox=\"0 0 " << num(style.size) << ' '
    << num(style.size) << "\" font-family=\"" << escape_xml(style.font_family) << "\">\n";
  o << "<title>" << escape_xml(dataset.node_name.empty() ? dataset.node_id : dataset.node_name)
    << " " << escape_xml(dataset.period) << "</title>\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << num(style.size) << "\" height=\"" << num(style.size)
    << "\" style=\"fill:#ffffff\"/>\n";

  o << "<g class=\"rings\">\n";
  for (int level = 1; level <= 5; ++level) {
    double r = g.radius_of(level);
    o << "<circle class=\"ring\" data-level=\"" << level << "\" cx=\"" << num(c) << "\" cy=\""
      << num(c) << "\" r=\"" << num(r) << "\" style=\"fill:none;stroke:" << style.ring_color
      << ";stroke-width:1\"/>\n";
    o << "<text class=\"ring-label\" x=\"" << num(c + 4.0) << "\" y=\"" << num(c - r - 3.0)
      << "\" style=\"font-size:10px;fill:" << style.axis_color << "\">"
      << to_string(static_cast<Level>(level)) << "</text>\n";
  }
  o << "</g>\n";

  o << "<g class=\"axes\">\n";
  for (std::size_t i = 0; i < kDimensionCount; ++i) {
    Point end = g.at(i, style.outer_radius);
    Point label = g.at(i, style.outer_radius + 24.0);
    o << "<line class=\"axis\" data-axis=\"" << to_string(kDimensions[i]) << "\" x1=\"" << num(c)
      << "\" y1=\"" << num(c) << "\" x2=\"" << num(end.x) << "\" y2=\"" << num(end.y)
      << "\" style=\"stroke:" << style.axis_color << ";stroke-width:1\"/>\n";
    o << "<text class=\"axis-label\" x=\"" << num(label.x) << "\" y=\"" << num(label.y)
      << "\" text-anchor=\"middle\" style=\"font-size:12px;fill:#000000\">"
      << to_string(kDimensions[i]) << "</text>\n";
  }
  o << "</g>\n";

  for (const auto& s : dataset.series) {
    const std::string& color = style.colors[index_of(s.source)];
    o << "<g class=\"series\" data-source=\"" << to_string(s.source) << "\">\n";
    std::array<bool, kDimensionCount> present{};
    std::size_t n_present = 0;
    for (std::size_t i = 0; i < kDimensionCount; ++i) {
      present[i] = s.values[i].has_value();
      n_present += present[i];
    }
    auto vertex = [&](std::size_t i) { return g.at(i, g.radius_of(*s.values[i])); };
    const std::string line_style = "fill:none;stroke:" + color + ";stroke-width:2";
    if (n_present == kDimensionCount) {
      std::vector<Point> pts;
      for (std::size_t i = 0; i < kDimensionCount; ++i) pts.push_back(vertex(i));
      o << "<polygon class=\"series-line\" points=\"" << points_attr(pts) << "\" style=\"fill:"
        << color << ";fill-opacity:0.15;stroke:" << color << ";stroke-width:2\"/>\n";
    } else if (n_present > 0) {
      // Walk runs of present values around the circle; a run starts after a gap.
      for (std::size_t start = 0; start < kDimensionCount; ++start) {
        if (!present[start] || present[(start + kDimensionCount - 1) % kDimensionCount]) continue;
        std::vector<Point> pts;
        for (std::size_t k = 0; k < kDimensionCount; ++k) {
          std::size_t i = (start + k) % kDimensionCount;
          if (!present[i]) break;
          pts.push_back(vertex(i));
        }
        o << "<polyline class=\"series-line\" points=\"" << points_attr(pts) << "\" style=\""
          << line_style << "\"/>\n";
      }
    }
    for (std::size_t i = 0; i < kDimensionCount; ++i) {
      if (!present[i]) continue;
      Point p = vertex(i);
      o << "<circle class=\"vertex\" data-axis=\"" << to_string(kDimensions[i])
        << "\" data-value=\"" << num(*s.values[i]) << "\" cx=\"" << num(p.x) << "\" cy=\""
        << num(p.y) << "\" r=\"3.000000\" style=\"fill:" << color << "\"/>\n";
    }
    o << "</g>\n";
  }

  o << "<g class=\"legend\">\n";
  double y = 20.0;
  for (const auto& s : dataset.series) {
    o << "<rect x=\"12.000000\" y=\"" << num(y - 9.0) << "\" width=\"10.000000\" height=\"10.000000\" style=\"fill:"
      << style.colors[index_of(s.source)] << "\"/>\n";
    o << "<text x=\"28.000000\" y=\"" << num(y) << "\" style=\"font-size:12px;fill:#000000\">"
      << escape_xml(s.label) << "</text>\n";
    y += 16.0;
  }
  o << "</g>\n";
  o << "</svg>\n";
  return o.str();
}

std::string dataset_to_json(const RadarDataset& dataset) {
  ordered_json j;
  j["schema"] = "tele.radar";
  j["version"] = 1;
  j["node"] = dataset.node_id;
  j["name"] = dataset.node_name;
  j["period"] = dataset.period;
  j["axes"] = ordered_json::array();
  for (auto d : dataset.axes) j["axes"].push_back(to_string(d));
  j["levels"] = ordered_json::array();
  for (int l = 1; l <= 5; ++l) j["levels"].push_back(to_string(static_cast<Level>(l)));
  j["series"] = ordered_json::array();
  for (const auto& s : dataset.series) {
    ordered_json sj;
    sj["source"] = to_string(s.source);
    sj["label"] = s.label;
    sj["values"] = ordered_json::array();
    for (const auto& v : s.values) {
      if (v) sj["values"].push_back(*v);
      else sj["values"].push_back(nullptr);
    }
    j["series"].push_back(std::move(sj));
  }
  return j.dump(2);
}

RadarDataset dataset_from_json(std::string_view text) {
  RadarDataset ds;
  try {
    json j = json::parse(text);
    if (j.at("schema").get<std::string>() != "tele.radar") {
      throw Error(Errc::parse, "not a radar dataset");
    }
    ds.node_id = j.at("node").get<std::string>();
    ds.node_name = j.value("name", "");
    ds.period = j.at("period").get<std::string>();
    ds.axes.clear();
    for (const auto& a : j.at("axes")) {
      auto d = dimension_from_string(a.get<std::string>());
      if (!d) throw Error(Errc::parse, "unknown axis " + a.get<std::string>());
      ds.axes.push_back(*d);
    }
    for (const auto& sj : j.at("series")) {
      auto src = source_from_string(sj.at("source").get<std::string>());
      if (!src) throw Error(Errc::parse, "unknown source");
      RadarSeries s{*src, sj.value("label", std::string(source_label(*src))), {}};
      const auto& vals = sj.at("values");
      if (vals.size() != kDimensionCount) throw Error(Errc::parse, "series needs 7 values");
      for (std::size_t i = 0; i < kDimensionCount; ++i) {
        if (!vals[i].is_null()) s.values[i] = vals[i].get<double>();
      }
      ds.series.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse, std::string("radar dataset: ") + e.what());
  }
  validate_dataset(ds);
  return ds;
}

}  // namespace tele
