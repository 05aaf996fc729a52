#include "tele/api_service.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <httplib.h>

#include "jsonl.hpp"
#include "tele/error.hpp"
#include "tele/radar_report.hpp"

namespace tele {
namespace {

using detail::json;
using detail::ordered_json;

int status_of(Errc code) {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::parse:
    case Errc::validation: return 422;
    case Errc::not_found: return 404;
    case Errc::denied: return 403;
    case Errc::io:
    case Errc::internal: return 500;
  }
  return 500;
}

Response json_response(int status, std::uint64_t snapshot, ordered_json body) {
  Response r;
  r.status = status;
  r.snapshot = snapshot;
  body["snapshot"] = snapshot;
  r.body = body.dump(2);
  return r;
}

Response error_response(int status, std::uint64_t snapshot, std::string_view reason,
                        std::string_view message, std::string_view scope = {}) {
  ordered_json err;
  err["status"] = status;
  err["reason"] = reason;
  err["message"] = message;
  if (!scope.empty()) err["scope"] = scope;
  ordered_json body;
  body["error"] = std::move(err);
  return json_response(status, snapshot, std::move(body));
}

Response from_error(const Error& e, std::uint64_t snapshot) {
  if (const auto* denied = dynamic_cast<const AccessDenied*>(&e)) {
    return error_response(403, snapshot, denied->denial().reason, e.what(),
                          denied->denial().scope);
  }
  int status = status_of(e.code());
  std::string_view reason = status == 404 ? "not found" : status == 422 ? "malformed request"
                                                                        : "internal error";
  return error_response(status, snapshot, reason, e.what());
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    auto item = text.substr(pos, comma - pos);
    if (!item.empty()) out.emplace_back(item);
    pos = comma + 1;
  }
  return out;
}

std::optional<std::string> param(const Request& r, const std::string& name) {
  auto it = r.params.find(name);
  if (it == r.params.end()) return std::nullopt;
  return it->second;
}

// A period is either its index or its window label ("A..B").
std::size_t resolve_period(const Cube& cube, std::string_view text) {
  std::size_t index = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), index);
  if (ec == std::errc{} && end == text.data() + text.size()) {
    if (index >= cube.periods().size()) {
      throw Error(Errc::not_found, "unknown period index " + std::string(text));
    }
    return index;
  }
  return cube.period_index(parse_window(text));
}

CubeQuery parse_cube_query(const Cube& cube, const Request& r) {
  CubeQuery q;
  q.org_scope = param(r, "scope").value_or(cube.org().root_id());
  if (auto g = param(r, "granularity")) {
    try {
      q.granularity = node_kind_from_string(*g);
    } catch (const Error& e) {
      throw Error(Errc::invalid_argument, e.what());
    }
  } else if (const OrgNode* scope = cube.org().find(q.org_scope)) {
    q.granularity = scope->kind;
  }
  if (auto dims = param(r, "dimensions")) {
    std::vector<Dimension> ds;
    for (const auto& name : split_list(*dims)) {
      auto d = dimension_from_string(name);
      if (!d) throw Error(Errc::invalid_argument, "unknown dimension '" + name + "'");
      ds.push_back(*d);
    }
    q.dimensions = std::move(ds);
  }
  if (auto srcs = param(r, "sources")) {
    std::vector<Source> ss;
    for (const auto& name : split_list(*srcs)) {
      auto s = source_from_string(name);
      if (!s) throw Error(Errc::invalid_argument, "unknown source '" + name + "'");
      ss.push_back(*s);
    }
    q.sources = std::move(ss);
  }
  auto periods = param(r, "periods");
  if (!periods) periods = param(r, "period");
  if (periods) {
    std::vector<std::size_t> ps;
    for (const auto& p : split_list(*periods)) ps.push_back(resolve_period(cube, p));
    q.periods = std::move(ps);
  }
  return q;
}

ordered_json cell_json(const Cube& cube, const CubeCell& c) {
  const OrgNode& n = cube.org().node(c.node_id);
  ordered_json j;
  j["node"] = c.node_id;
  j["kind"] = to_string(n.kind);
  j["name"] = n.name;
  j["dimension"] = to_string(c.dimension);
  j["source"] = to_string(c.source);
  j["period"] = format_window(cube.periods()[c.period]);
  if (c.score) j["score"] = *c.score;
  else j["score"] = nullptr;
  j["cu_count"] = c.cu_count;
  return j;
}

ordered_json periods_json(const Cube& cube) {
  ordered_json a = ordered_json::array();
  for (const auto& w : cube.periods()) a.push_back(format_window(w));
  return a;
}

bool aggregate_allowed(const Principal& p, const OrgTree& tree, const OrgNode& n) {
  CubeQuery q;
  q.org_scope = n.id;
  q.granularity = n.kind;
  try {
    authorize(p, q, tree);
    return true;
  } catch (const AccessDenied&) {
    return false;
  }
}

Response get_org(const Snapshot& s, const Principal& p) {
  const OrgTree& tree = s.org();
  auto visible = visible_cus(p, tree);
  std::set<std::string> shown;
  ordered_json nodes = ordered_json::array();
  for (const auto& id : tree.preorder()) {
    const OrgNode& n = tree.node(id);
    const auto& cus = tree.descendant_cu_list(id);
    bool touches = std::any_of(cus.begin(), cus.end(),
                               [&](const std::string& cu) { return visible.contains(cu); });
    bool allowed = aggregate_allowed(p, tree, n);
    if (!touches && !allowed) continue;
    shown.insert(id);
    ordered_json j;
    j["id"] = n.id;
    j["kind"] = to_string(n.kind);
    j["name"] = n.name;
    if (n.parent_id.empty()) j["parent"] = nullptr;
    else j["parent"] = n.parent_id;
    j["cu_count"] = cus.size();
    j["aggregate_allowed"] = allowed;
    nodes.push_back(std::move(j));
  }
  // Children lists only name nodes the caller can see.
  for (auto& j : nodes) {
    ordered_json kids = ordered_json::array();
    for (const auto& c : tree.node(j["id"].get<std::string>()).children) {
      if (shown.contains(c)) kids.push_back(c);
    }
    j["children"] = std::move(kids);
  }
  ordered_json body;
  body["principal"] = p.id;
  body["role"] = to_string(p.role.kind);
  body["root"] = tree.root_id();
  body["nodes"] = std::move(nodes);
  return json_response(200, s.id, std::move(body));
}

Response get_cube(const Snapshot& s, const Principal& p, const Request& r) {
  const Cube& cube = s.cube();
  CubeQuery q = parse_cube_query(cube, r);
  validate_query(cube, q);
  CubeQuery allowed = authorize(p, q, s.org());
  auto cells = query(cube, allowed);
  ordered_json body;
  ordered_json qj;
  qj["scope"] = q.org_scope;
  qj["granularity"] = to_string(q.granularity);
  if (allowed.nodes) qj["restricted_to"] = *allowed.nodes;
  body["query"] = std::move(qj);
  body["periods"] = periods_json(cube);
  ordered_json cj = ordered_json::array();
  for (const auto& c : cells) cj.push_back(cell_json(cube, c));
  body["cells"] = std::move(cj);
  return json_response(200, s.id, std::move(body));
}

Response get_radar(const Snapshot& s, const Principal& p, std::string_view node,
                   const Request& r) {
  const Cube& cube = s.cube();
  std::size_t period = 0;
  if (auto text = param(r, "period")) period = resolve_period(cube, *text);
  else if (cube.periods().empty()) throw Error(Errc::not_found, "no periods");
  else period = cube.periods().size() - 1;
  auto ds = radar_dataset(cube, node, period, p);
  auto format = param(r, "format").value_or("json");
  if (format == "svg") {
    Response out;
    out.snapshot = s.id;
    out.content_type = "image/svg+xml";
    out.body = render_svg(ds);
    return out;
  }
  if (format != "json") throw Error(Errc::invalid_argument, "unknown format '" + format + "'");
  auto body = ordered_json::parse(dataset_to_json(ds));
  return json_response(200, s.id, std::move(body));
}

Response get_snapshot(const Snapshot& s) {
  ordered_json body;
  const auto& prov = s.cube().provenance();
  body["provenance"] = {{"org", prov.org}, {"events", prov.events}, {"surveys", prov.surveys}};
  body["periods"] = periods_json(s.cube());
  body["thresholds"] = s.inputs.thresholds.label;
  body["cus"] = s.org().course_units().size();
  body["events"] = s.inputs.events.size();
  body["responses"] = s.inputs.responses.size();
  body["event_rejects"] = s.event_rejects.size();
  body["survey_rejects"] = s.survey_rejects.size();
  return json_response(200, s.id, std::move(body));
}

ordered_json rejects_json(std::span<const Reject> rejects) {
  ordered_json a = ordered_json::array();
  for (const auto& r : rejects) {
    a.push_back({{"line", r.line}, {"reason", r.reason}, {"detail", r.detail}});
  }
  return a;
}

const Principal* authenticate(const Snapshot& s, const Request& r) {
  constexpr std::string_view kBearer = "Bearer ";
  std::string_view h = r.authorization;
  if (h.substr(0, kBearer.size()) != kBearer) return nullptr;
  return s.principals.authenticate(h.substr(kBearer.size()));
}

std::vector<std::string> body_lines(const std::string& body) {
  std::vector<std::string> lines;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

ServiceConfig read_service_config(std::istream& in, const std::filesystem::path& base_dir) {
  ServiceConfig c;
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw Error(Errc::parse, "service config must be a JSON object");
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    if (j.contains("data_dir")) {
      std::filesystem::path d = j["data_dir"].get<std::string>();
      c.data_dir = d.is_relative() && !base_dir.empty() ? base_dir / d : d;
    }
    if (j.contains("periods")) {
      for (const auto& p : j["periods"]) c.periods.push_back(parse_window(p.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse, std::string("service config: ") + e.what());
  }
  return c;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open service config " + path.string());
  return read_service_config(in, path.parent_path());
}

void apply_env_overrides(ServiceConfig& config) {
  if (const char* port = std::getenv("TELE_PORT"); port != nullptr && *port != '\0') {
    std::string_view text(port);
    int value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
      throw Error(Errc::validation, "TELE_PORT is not a number: " + std::string(text));
    }
    config.port = value;
  }
  if (const char* dir = std::getenv("TELE_DATA_DIR"); dir != nullptr && *dir != '\0') {
    config.data_dir = dir;
  }
}

std::vector<std::string> check_service_config(const ServiceConfig& config) {
  std::vector<std::string> problems;
  if (config.port < 0 || config.port > 65535) {
    problems.push_back("port out of range: " + std::to_string(config.port));
  }
  DataLayout layout{config.data_dir};
  if (!std::filesystem::is_directory(config.data_dir)) {
    problems.push_back("data_dir is not a directory: " + config.data_dir.string());
  } else {
    for (const auto& required : {layout.org(), layout.events()}) {
      if (!std::filesystem::exists(required)) problems.push_back("missing " + required.string());
    }
    if (!std::filesystem::exists(layout.principals())) {
      problems.push_back("missing " + layout.principals().string() + " (every request would get 401)");
    }
  }
  for (const auto& w : config.periods) {
    if (!w.valid()) problems.push_back("inverted period " + format_window(w));
  }
  return problems;
}

Service::Service(ServiceConfig config) : config_(std::move(config)), has_data_dir_(true) {
  install(build_snapshot(DataLayout{config_.data_dir}, config_.periods, 1));
}

Service::Service(Snapshot snapshot) {
  if (snapshot.id == 0) snapshot.id = 1;
  install(std::move(snapshot));
}

void Service::install(Snapshot snapshot) {
  auto next = std::make_shared<const Snapshot>(std::move(snapshot));
  std::lock_guard lock(current_mu_);
  current_ = std::move(next);
}

std::shared_ptr<const Snapshot> Service::current() const {
  std::lock_guard lock(current_mu_);
  return current_;
}

std::uint64_t Service::rebuild() {
  if (!has_data_dir_) throw Error(Errc::validation, "service has no data directory");
  std::lock_guard lock(rebuild_mu_);
  auto id = current()->id + 1;
  install(build_snapshot(DataLayout{config_.data_dir}, config_.periods, id));
  return id;
}

Response Service::handle(const Request& r) const {
  auto snap = current();
  const Snapshot& s = *snap;
  const Principal* p = authenticate(s, r);
  if (p == nullptr) return error_response(401, s.id, "unknown credential", "unknown credential");
  if (r.method != "GET") {
    return error_response(404, s.id, "not found", r.method + " " + r.path);
  }
  try {
    if (r.path == "/org") return get_org(s, *p);
    if (r.path == "/cube") return get_cube(s, *p, r);
    if (r.path == "/snapshots/current") return get_snapshot(s);
    constexpr std::string_view kRadar = "/radar/";
    if (r.path.starts_with(kRadar) && r.path.size() > kRadar.size()) {
      return get_radar(s, *p, std::string_view(r.path).substr(kRadar.size()), r);
    }
    return error_response(404, s.id, "not found", "no route " + r.path);
  } catch (const Error& e) {
    return from_error(e, s.id);
  } catch (const std::exception& e) {
    return error_response(500, s.id, "internal error", e.what());
  }
}

Response Service::handle_admin(const Request& r) {
  auto snap = current();
  const Principal* p = authenticate(*snap, r);
  if (p == nullptr) return error_response(401, snap->id, "unknown credential", "unknown credential");
  if (!p->admin) {
    return error_response(403, snap->id, "administrative credential required", r.path);
  }
  if (r.method != "POST") return error_response(404, snap->id, "not found", r.method + " " + r.path);

  try {
    if (r.path == "/admin/rebuild") {
      auto previous = snap->id;
      try {
        rebuild();
      } catch (const Error& e) {
        ordered_json body;
        body["error"] = {{"status", 422}, {"reason", "rebuild failed"}, {"message", e.what()}};
        return json_response(422, current()->id, std::move(body));
      }
      auto now = current();
      ordered_json body;
      body["previous"] = previous;
      body["event_rejects"] = rejects_json(now->event_rejects);
      body["survey_rejects"] = rejects_json(now->survey_rejects);
      return json_response(200, now->id, std::move(body));
    }

    if (r.path == "/admin/ingest/events" || r.path == "/admin/ingest/surveys") {
      std::lock_guard lock(rebuild_mu_);
      auto base = current();
      PipelineInputs inputs = base->inputs;
      std::vector<Reject> rejects;
      std::size_t accepted = 0;
      std::string persisted;

      if (r.path == "/admin/ingest/events") {
        auto lines = body_lines(r.body);
        if (!lines.empty() && lines.front().find("\"schema\"") != std::string::npos) {
          lines.erase(lines.begin());
        }
        auto result = ingest_event_lines(lines, *inputs.org);
        rejects = std::move(result.rejects);
        auto fresh = result.store.all();
        accepted = fresh.size();
        if (accepted > 0) {
          auto merged = inputs.events.all();
          merged.insert(merged.end(), fresh.begin(), fresh.end());
          inputs.events = EventStore::from_events(std::move(merged));
          std::ostringstream out;
          for (const auto& e : fresh) out << serialize_event(e) << '\n';
          persisted = out.str();
        }
        if (accepted > 0 && has_data_dir_) {
          auto path = DataLayout{config_.data_dir}.events();
          std::ofstream f(path, std::ios::app | std::ios::binary);
          if (!(f << persisted)) throw Error(Errc::io, "cannot append to " + path.string());
        }
      } else {
        auto audience_text = param(r, "audience");
        if (!audience_text) throw Error(Errc::invalid_argument, "missing audience parameter");
        Audience audience = audience_from_string(*audience_text);
        if (!has_data_dir_) throw Error(Errc::validation, "service has no data directory");
        DataLayout layout{config_.data_dir};
        auto instrument = load_instrument(layout.instrument(audience).string());
        std::istringstream in(r.body);
        auto result = ingest_responses(in, instrument, *inputs.org);
        rejects = std::move(result.rejects);
        accepted = result.store.size();
        if (accepted > 0) {
          inputs.responses.merge(result.store);
          std::vector<SurveyResponse> rows;
          for (const auto& e : result.store.entries()) rows.push_back(e.response);
          auto path = layout.responses(audience);
          bool fresh_file = !std::filesystem::exists(path);
          std::ostringstream out;
          if (path.extension() == ".jsonl") {
            for (const auto& row : rows) {
              ordered_json j;
              j["respondent_id"] = row.respondent_id;
              j["cu_id"] = row.cu_id;
              j["item_id"] = row.item_id;
              j["value"] = row.value;
              j["timestamp"] = format_timestamp(row.timestamp);
              out << j.dump() << '\n';
            }
          } else {
            std::ostringstream table;
            write_responses_csv(table, rows);
            std::string text = table.str();
            out << (fresh_file ? text : text.substr(text.find('\n') + 1));
          }
          std::filesystem::create_directories(path.parent_path());
          std::ofstream f(path, std::ios::app | std::ios::binary);
          if (!(f << out.str())) throw Error(Errc::io, "cannot append to " + path.string());
        }
      }

      std::uint64_t id = base->id;
      if (accepted > 0) {
        Snapshot next = build_snapshot(std::move(inputs), base->principals, base->id + 1);
        next.event_rejects = base->event_rejects;
        next.survey_rejects = base->survey_rejects;
        id = next.id;
        install(std::move(next));
      }
      ordered_json body;
      body["previous"] = base->id;
      body["accepted"] = accepted;
      body["rejects"] = rejects_json(rejects);
      return json_response(200, id, std::move(body));
    }
    return error_response(404, snap->id, "not found", "no route " + r.path);
  } catch (const Error& e) {
    return from_error(e, current()->id);
  } catch (const std::exception& e) {
    return error_response(500, current()->id, "internal error", e.what());
  }
}

Response Service::dispatch(const Request& r) {
  if (r.path.starts_with("/admin/")) return handle_admin(r);
  return handle(r);
}

void serve_http(Service& service) {
  httplib::Server server;
  auto adapt = [&service](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    r.authorization = req.get_header_value("Authorization");
    for (const auto& [k, v] : req.params) r.params[k] = v;
    r.body = req.body;
    Response out = service.dispatch(r);
    res.status = out.status;
    res.set_header("X-Tele-Snapshot", std::to_string(out.snapshot));
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(out.body, out.content_type);
  };
  server.Get(".*", adapt);
  server.Post(".*", adapt);
  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
  const auto& c = service.config();
  std::cerr << "tele: serving snapshot " << service.current()->id << " on " << c.host << ':'
            << c.port << '\n';
  if (!server.listen(c.host, c.port)) {
    throw Error(Errc::io, "cannot listen on " + c.host + ":" + std::to_string(c.port));
  }
}

}  // namespace tele
