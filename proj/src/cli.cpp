#include "tele/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>

#include "jsonl.hpp"
#include "tele/api_service.hpp"
#include "tele/cube.hpp"
#include "tele/error.hpp"
#include "tele/maturity.hpp"
#include "tele/metrics.hpp"
#include "tele/pipeline.hpp"
#include "tele/radar_report.hpp"
#include "tele/survey.hpp"
#include "tele/synthgen.hpp"

namespace tele {
namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  return in;
}

// Writes to `path`, or to `fallback` when path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::string& text) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!(out << text)) throw Error(Errc::io, "cannot write " + path);
}

std::shared_ptr<const OrgTree> load_org(const std::string& path) {
  return std::make_shared<const OrgTree>(load_org_tree(path));
}

EventStore load_events(const std::string& path, const OrgTree& tree, std::ostream& err) {
  auto in = open_in(path);
  auto result = ingest_events(in, tree);
  if (!result.complete) throw Error(Errc::io, path + ": " + result.failure);
  if (!result.rejects.empty()) {
    err << "warning: " << result.rejects.size() << " event records rejected in " << path << '\n';
  }
  return std::move(result.store);
}

ResponseStore load_responses(const OrgTree& tree, const std::string& responses,
                             const std::string& instrument_path, Audience audience,
                             std::ostream& err) {
  Instrument instrument =
      instrument_path.empty() ? default_instrument(audience) : load_instrument(instrument_path);
  if (instrument.audience != audience) {
    throw Error(Errc::validation, "instrument audience is " +
                                      std::string(to_string(instrument.audience)) + ", expected " +
                                      std::string(to_string(audience)));
  }
  auto in = open_in(responses);
  auto result = ingest_responses(in, instrument, tree);
  if (!result.rejects.empty()) {
    err << "warning: " << result.rejects.size() << " responses rejected in " << responses << '\n';
  }
  return std::move(result.store);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t resolve_period(const Cube& cube, const std::string& text) {
  if (!text.empty() && std::all_of(text.begin(), text.end(), ::isdigit)) {
    auto i = std::stoul(text);
    if (i >= cube.periods().size()) throw Error(Errc::not_found, "unknown period index " + text);
    return i;
  }
  return cube.period_index(parse_window(text));
}

// The acting principal: a registry entry when --as is given, otherwise an
// institution-wide operator.
Principal acting_principal(const std::string& registry, const std::string& who,
                           const OrgTree& tree) {
  if (who.empty()) return Principal{"operator", Role{RoleKind::direction, ""}, "", false};
  if (registry.empty()) throw Error(Errc::invalid_argument, "--as needs --principals");
  auto reg = load_principals(registry);
  const Principal* p = reg.find(who);
  if (p == nullptr) throw Error(Errc::not_found, "unknown principal " + who);
  validate_principal(*p, tree);
  return *p;
}

int exit_code_of(Errc code) {
  switch (code) {
    case Errc::validation:
    case Errc::denied:
    case Errc::invalid_argument: return exit_rejected;
    case Errc::parse:
    case Errc::not_found:
    case Errc::io: return exit_input;
    case Errc::internal: return exit_internal;
  }
  return exit_internal;
}

struct Options {
  // shared
  std::string org, events, out, rejects, thresholds, principals, as, cube_file;
  // synth
  std::string params, summary;
  std::optional<std::uint64_t> seed;
  // survey
  std::string instrument, responses;
  std::string teacher_responses, student_responses, teacher_instrument, student_instrument;
  // compute / query / radar
  std::vector<std::string> windows;
  std::string profiles, levels;
  std::string scope, granularity, dimensions, sources, periods, format = "csv";
  std::string node, period, json_out;
  // validate-config / serve
  std::string service;
};

int cmd_synth(const Options& o, std::ostream& out) {
  GenParams params;
  if (!o.params.empty()) {
    auto in = open_in(o.params);
    params = read_gen_params(in);
  }
  if (o.seed) params.seed = *o.seed;
  auto data = generate(params);
  std::filesystem::path dir = o.out;
  write_generated(dir, data);
  auto tree = build_org_tree(data.org);
  {
    std::ofstream f(dir / "principals.jsonl", std::ios::binary);
    write_principals(f, demo_principals(tree));
  }
  {
    std::ofstream f(dir / "thresholds.json", std::ios::binary);
    write_thresholds(f, default_thresholds());
  }
  {
    std::ofstream f(dir / "params.json", std::ios::binary);
    write_gen_params(f, params);
  }
  if (!o.summary.empty()) {
    auto store = EventStore::from_events(data.events);
    std::ostringstream s;
    write_summary(s, summarize(store, params.window()));
    emit(o.summary, out, s.str());
  }
  out << "wrote " << data.events.size() << " events, " << tree.course_units().size()
      << " CUs, " << data.teacher_responses.size() + data.student_responses.size()
      << " survey responses to " << dir.string() << '\n';
  return exit_ok;
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  auto tree = load_org(o.org);
  auto in = open_in(o.events);
  auto result = ingest_events(in, *tree);
  std::ostringstream log;
  auto events = result.store.all();
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) {
                     return std::tie(a.timestamp, a.cu_id) < std::tie(b.timestamp, b.cu_id);
                   });
  write_event_log(log, events);
  emit(o.out, out, log.str());
  if (!o.rejects.empty()) {
    std::ostringstream r;
    write_rejects(r, result.rejects);
    emit(o.rejects, out, r.str());
  }
  err << "accepted " << result.store.size() << ", rejected " << result.rejects.size() << '\n';
  if (!result.complete) throw Error(Errc::io, o.events + ": " + result.failure);
  return exit_ok;
}

int cmd_survey_import(const Options& o, std::ostream& out, std::ostream& err) {
  auto tree = load_org(o.org);
  auto instrument = load_instrument(o.instrument);
  auto in = open_in(o.responses);
  auto result = ingest_responses(in, instrument, *tree);
  std::vector<SurveyResponse> rows;
  for (const auto& e : result.store.entries()) rows.push_back(e.response);
  std::ostringstream table;
  write_responses_csv(table, rows);
  emit(o.out, out, table.str());
  if (!o.rejects.empty()) {
    std::ostringstream r;
    write_rejects(r, result.rejects);
    emit(o.rejects, out, r.str());
  }
  err << "accepted " << rows.size() << ", rejected " << result.rejects.size() << '\n';
  return exit_ok;
}

int cmd_compute(const Options& o, std::ostream& out, std::ostream& err) {
  auto tree = load_org(o.org);
  auto store = load_events(o.events, *tree, err);
  std::vector<Window> windows;
  for (const auto& w : o.windows) windows.push_back(parse_window(w));
  auto profiles = compute_profiles(store, *tree, windows);
  std::ostringstream s;
  write_profiles(s, profiles);
  emit(o.out, out, s.str());
  return exit_ok;
}

int cmd_classify(const Options& o, std::ostream& out) {
  ThresholdConfig config = o.thresholds.empty() ? default_thresholds() : load_thresholds(o.thresholds);
  auto in = open_in(o.profiles);
  auto profiles = read_profiles(in);
  std::vector<LevelProfile> levels;
  levels.reserve(profiles.size());
  for (const auto& p : profiles) levels.push_back(profile_levels(p, config));
  std::ostringstream s;
  write_level_profiles(s, levels);
  emit(o.out, out, s.str());
  return exit_ok;
}

int cmd_cube(const Options& o, std::ostream& out, std::ostream& err) {
  auto tree = load_org(o.org);
  auto in = open_in(o.levels);
  auto levels = read_level_profiles(in);
  std::vector<Window> periods;
  for (const auto& lp : levels) {
    if (std::find(periods.begin(), periods.end(), lp.window) == periods.end()) {
      periods.push_back(lp.window);
    }
  }
  ResponseStore responses;
  if (!o.teacher_responses.empty()) {
    responses.merge(load_responses(*tree, o.teacher_responses, o.teacher_instrument,
                                   Audience::teacher, err));
  }
  if (!o.student_responses.empty()) {
    responses.merge(load_responses(*tree, o.student_responses, o.student_instrument,
                                   Audience::student, err));
  }
  auto surveys = all_survey_scores(responses, *tree, periods);
  Provenance prov{org_digest(*tree), "", responses.digest()};
  if (!o.events.empty()) prov.events = load_events(o.events, *tree, err).digest();
  auto cube = build_cube(levels, surveys, tree, periods, prov);
  std::ostringstream s;
  write_cube(s, cube);
  emit(o.out, out, s.str());
  return exit_ok;
}

Cube load_cube_file(const std::string& path, std::shared_ptr<const OrgTree> tree) {
  auto in = open_in(path);
  return read_cube(in, std::move(tree));
}

int cmd_query(const Options& o, std::ostream& out) {
  auto tree = load_org(o.org);
  Cube cube = load_cube_file(o.cube_file, tree);
  CubeQuery q;
  q.org_scope = o.scope.empty() ? tree->root_id() : o.scope;
  if (!o.granularity.empty()) q.granularity = node_kind_from_string(o.granularity);
  else q.granularity = tree->node(q.org_scope).kind;
  if (!o.dimensions.empty()) {
    std::vector<Dimension> ds;
    for (const auto& name : split_list(o.dimensions)) {
      auto d = dimension_from_string(name);
      if (!d) throw Error(Errc::invalid_argument, "unknown dimension '" + name + "'");
      ds.push_back(*d);
    }
    q.dimensions = ds;
  }
  if (!o.sources.empty()) {
    std::vector<Source> ss;
    for (const auto& name : split_list(o.sources)) {
      auto s = source_from_string(name);
      if (!s) throw Error(Errc::invalid_argument, "unknown source '" + name + "'");
      ss.push_back(*s);
    }
    q.sources = ss;
  }
  if (!o.periods.empty()) {
    std::vector<std::size_t> ps;
    for (const auto& p : split_list(o.periods)) ps.push_back(resolve_period(cube, p));
    q.periods = ps;
  }
  validate_query(cube, q);
  Principal who = acting_principal(o.principals, o.as, *tree);
  auto cells = query(cube, authorize(who, q, *tree));
  std::ostringstream s;
  if (o.format == "csv") {
    write_cells_csv(s, cube, cells);
  } else if (o.format == "json") {
    detail::ordered_json a = detail::ordered_json::array();
    for (const auto& c : cells) {
      detail::ordered_json j;
      j["node"] = c.node_id;
      j["dimension"] = to_string(c.dimension);
      j["source"] = to_string(c.source);
      j["period"] = format_window(cube.periods()[c.period]);
      if (c.score) j["score"] = *c.score;
      else j["score"] = nullptr;
      j["cu_count"] = c.cu_count;
      a.push_back(std::move(j));
    }
    s << a.dump(2) << '\n';
  } else {
    throw Error(Errc::invalid_argument, "unknown format '" + o.format + "'");
  }
  emit(o.out, out, s.str());
  return exit_ok;
}

int cmd_radar(const Options& o, std::ostream& out) {
  auto tree = load_org(o.org);
  Cube cube = load_cube_file(o.cube_file, tree);
  if (cube.periods().empty()) throw Error(Errc::not_found, "cube has no periods");
  std::size_t period = o.period.empty() ? cube.periods().size() - 1 : resolve_period(cube, o.period);
  Principal who = acting_principal(o.principals, o.as, *tree);
  auto ds = radar_dataset(cube, o.node, period, who);
  emit(o.out, out, render_svg(ds));
  if (!o.json_out.empty()) emit(o.json_out, out, dataset_to_json(ds) + "\n");
  return exit_ok;
}

int cmd_validate_config(const Options& o, std::ostream& out, std::ostream& err) {
  int checked = 0;
  bool bad = false;
  auto report = [&](const std::string& what, const std::vector<std::string>& problems) {
    ++checked;
    if (problems.empty()) {
      out << "ok: " << what << '\n';
      return;
    }
    bad = true;
    for (const auto& p : problems) err << what << ": " << p << '\n';
  };
  auto collect = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == Errc::validation || e.code() == Errc::not_found) {
        return std::vector<std::string>{e.what()};
      }
      throw;
    }
    return std::vector<std::string>{};
  };
  if (!o.thresholds.empty()) {
    auto in = open_in(o.thresholds);
    report(o.thresholds, validate_thresholds(read_threshold_spec(in)));
  }
  if (!o.instrument.empty()) {
    report(o.instrument, collect([&] { load_instrument(o.instrument); }));
  }
  if (!o.params.empty()) {
    report(o.params, collect([&] {
             auto in = open_in(o.params);
             validate_params(read_gen_params(in));
           }));
  }
  std::shared_ptr<const OrgTree> tree;
  if (!o.org.empty()) {
    report(o.org, collect([&] { tree = load_org(o.org); }));
  }
  if (!o.principals.empty()) {
    if (!tree) throw Error(Errc::invalid_argument, "--principals needs a valid --org");
    report(o.principals, collect([&] { load_principals(o.principals).validate(*tree); }));
  }
  if (!o.service.empty()) {
    auto config = load_service_config(o.service);
    apply_env_overrides(config);
    report(o.service, check_service_config(config));
  }
  if (checked == 0) throw Error(Errc::invalid_argument, "nothing to validate");
  return bad ? exit_rejected : exit_ok;
}

int cmd_serve(const Options& o) {
  auto config = load_service_config(o.service);
  apply_env_overrides(config);
  auto problems = check_service_config(config);
  if (!problems.empty()) {
    std::string msg = "service config:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw Error(Errc::validation, msg);
  }
  Service service(config);
  serve_http(service);
  return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"TELE maturity analytics: ingest LMS logs and questionnaires, classify "
               "integration levels, query the org cube and draw radar reports."};
  app.name("tele");
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic campus data directory");
  synth->add_option("--params", o.params, "Generator parameter file (JSON); defaults if omitted")
      ->check(CLI::ExistingFile);
  synth->add_option("--out", o.out, "Output data directory")->required();
  synth->add_option("--seed", o.seed, "Override the parameter file seed");
  synth->add_option("--summary", o.summary, "Write the usage summary (JSON) here");

  auto* ingest = app.add_subcommand("ingest", "Validate an event log against the org tree");
  ingest->add_option("--org", o.org, "Org file")->required();
  ingest->add_option("--events", o.events, "Raw event log")->required();
  ingest->add_option("--out", o.out, "Accepted events, canonical log (stdout if omitted)");
  ingest->add_option("--rejects", o.rejects, "Reject report");

  auto* survey = app.add_subcommand("survey-import", "Validate questionnaire responses");
  survey->add_option("--org", o.org, "Org file")->required();
  survey->add_option("--instrument", o.instrument, "Instrument file")->required();
  survey->add_option("--responses", o.responses, "Response table or record file")->required();
  survey->add_option("--out", o.out, "Accepted responses as a table (stdout if omitted)");
  survey->add_option("--rejects", o.rejects, "Reject report");

  auto* compute = app.add_subcommand("compute", "Compute per-CU indicator profiles");
  compute->add_option("--org", o.org, "Org file")->required();
  compute->add_option("--events", o.events, "Event log")->required();
  compute->add_option("--window", o.windows, "Half-open window YYYY-MM-DD..YYYY-MM-DD (repeatable)")
      ->required();
  compute->add_option("--out", o.out, "Profile file (stdout if omitted)");

  auto* classify = app.add_subcommand("classify", "Classify profiles into integration levels");
  classify->add_option("--profiles", o.profiles, "Profile file")->required();
  classify->add_option("--thresholds", o.thresholds, "Threshold file; shipped defaults if omitted");
  classify->add_option("--out", o.out, "Level file (stdout if omitted)");

  auto* cube = app.add_subcommand("cube", "Build the org cube from levels and survey responses");
  cube->add_option("--org", o.org, "Org file")->required();
  cube->add_option("--levels", o.levels, "Level file")->required();
  cube->add_option("--events", o.events, "Event log, recorded as provenance");
  cube->add_option("--teacher-responses", o.teacher_responses, "Teacher responses");
  cube->add_option("--teacher-instrument", o.teacher_instrument,
                   "Teacher instrument; built-in placeholder if omitted");
  cube->add_option("--student-responses", o.student_responses, "Student responses");
  cube->add_option("--student-instrument", o.student_instrument,
                   "Student instrument; built-in placeholder if omitted");
  cube->add_option("--out", o.out, "Cube file (stdout if omitted)");

  auto* query_cmd = app.add_subcommand("query", "Slice the cube");
  query_cmd->add_option("--org", o.org, "Org file")->required();
  query_cmd->add_option("--cube", o.cube_file, "Cube file")->required();
  query_cmd->add_option("--scope", o.scope, "Org node to query under (default: root)");
  query_cmd->add_option("--granularity", o.granularity,
                        "university|school|department|cu (default: the scope's kind)");
  query_cmd->add_option("--dimensions", o.dimensions, "Comma-separated dimensions (default: all)");
  query_cmd->add_option("--sources", o.sources, "Comma-separated sources (default: all)");
  query_cmd->add_option("--periods", o.periods, "Comma-separated period indices or windows");
  query_cmd->add_option("--principals", o.principals, "Principal registry");
  query_cmd->add_option("--as", o.as, "Answer as this principal id");
  query_cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  query_cmd->add_option("--out", o.out, "Result file (stdout if omitted)");

  auto* radar = app.add_subcommand("radar", "Render a radar report for one org node");
  radar->add_option("--org", o.org, "Org file")->required();
  radar->add_option("--cube", o.cube_file, "Cube file")->required();
  radar->add_option("--node", o.node, "Org node id")->required();
  radar->add_option("--period", o.period, "Period index or window (default: last)");
  radar->add_option("--principals", o.principals, "Principal registry");
  radar->add_option("--as", o.as, "Render as this principal id");
  radar->add_option("--out", o.out, "SVG file (stdout if omitted)");
  radar->add_option("--json", o.json_out, "Also write the radar dataset file");

  auto* validate = app.add_subcommand("validate-config", "Check configuration files");
  validate->add_option("--thresholds", o.thresholds, "Threshold file");
  validate->add_option("--instrument", o.instrument, "Instrument file");
  validate->add_option("--params", o.params, "Generator parameter file");
  validate->add_option("--org", o.org, "Org file");
  validate->add_option("--principals", o.principals, "Principal registry (needs --org)");
  validate->add_option("--service", o.service, "Service config file");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--config", o.service, "Service config file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    if (*synth) return cmd_synth(o, out);
    if (*ingest) return cmd_ingest(o, out, err);
    if (*survey) return cmd_survey_import(o, out, err);
    if (*compute) return cmd_compute(o, out, err);
    if (*classify) return cmd_classify(o, out);
    if (*cube) return cmd_cube(o, out, err);
    if (*query_cmd) return cmd_query(o, out);
    if (*radar) return cmd_radar(o, out);
    if (*validate) return cmd_validate_config(o, out, err);
    if (*serve) return cmd_serve(o);
  } catch (const AccessDenied& e) {
    err << "denied: " << e.denial().reason << " (" << e.denial().scope << ")\n";
    return exit_rejected;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_of(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_internal;
  }
  return exit_internal;
}

}  // namespace tele
