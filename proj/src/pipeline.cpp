#include "tele/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "tele/digest.hpp"
#include "tele/error.hpp"

namespace tele {
namespace {

std::ifstream open_input(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, std::string("cannot open ") + what + " " + path.string());
  return in;
}

}  // namespace

std::filesystem::path DataLayout::instrument(Audience a) const {
  return root / "instruments" / (std::string(to_string(a)) + ".json");
}

std::filesystem::path DataLayout::responses(Audience a) const {
  auto base = root / "responses" / std::string(to_string(a));
  auto csv = std::filesystem::path(base).concat(".csv");
  auto jsonl = std::filesystem::path(base).concat(".jsonl");
  if (!std::filesystem::exists(csv) && std::filesystem::exists(jsonl)) return jsonl;
  return csv;
}

std::string org_digest(const OrgTree& tree) {
  std::ostringstream out;
  auto records = tree.to_records();
  write_org_records(out, records);
  return sha256_hex(out.str());
}

Window covering_window(const EventStore& store) {
  if (store.empty()) throw Error(Errc::validation, "no events to derive a window from");
  std::optional<Timestamp> lo, hi;
  for (const auto& [cu, events] : store.partitions()) {
    if (events.empty()) continue;
    if (!lo || events.front().timestamp < *lo) lo = events.front().timestamp;
    if (!hi || events.back().timestamp > *hi) hi = events.back().timestamp;
  }
  auto start = std::chrono::floor<std::chrono::days>(*lo);
  auto end = std::chrono::floor<std::chrono::days>(*hi) + std::chrono::days{1};
  return {start, end};
}

PipelineOutputs run_pipeline(const PipelineInputs& inputs) {
  if (!inputs.org) throw Error(Errc::invalid_argument, "pipeline needs an org tree");
  PipelineOutputs out;
  out.periods = inputs.periods.empty() ? std::vector<Window>{covering_window(inputs.events)}
                                       : inputs.periods;
  for (const auto& w : out.periods) {
    if (!w.valid()) throw Error(Errc::validation, "inverted window " + format_window(w));
  }
  out.profiles = compute_profiles(inputs.events, *inputs.org, out.periods);
  out.levels.reserve(out.profiles.size());
  for (const auto& p : out.profiles) out.levels.push_back(profile_levels(p, inputs.thresholds));
  out.surveys = all_survey_scores(inputs.responses, *inputs.org, out.periods);
  Provenance prov{org_digest(*inputs.org), inputs.events.digest(), inputs.responses.digest()};
  out.cube = std::make_shared<const Cube>(
      build_cube(out.levels, out.surveys, inputs.org, out.periods, std::move(prov)));
  return out;
}

PipelineInputs load_inputs(const DataLayout& layout, std::vector<Window> periods,
                           std::vector<Reject>* event_rejects,
                           std::vector<Reject>* survey_rejects) {
  PipelineInputs in;
  in.periods = std::move(periods);
  in.org = std::make_shared<const OrgTree>(load_org_tree(layout.org().string()));

  {
    auto f = open_input(layout.events(), "event log");
    auto result = ingest_events(f, *in.org);
    if (!result.complete) throw Error(Errc::io, "event log: " + result.failure);
    in.events = std::move(result.store);
    if (event_rejects) *event_rejects = std::move(result.rejects);
  }

  for (auto audience : {Audience::teacher, Audience::student}) {
    auto path = layout.responses(audience);
    if (!std::filesystem::exists(path)) continue;
    auto instrument = load_instrument(layout.instrument(audience).string());
    if (instrument.audience != audience) {
      throw Error(Errc::validation, layout.instrument(audience).string() + " is not a " +
                                        std::string(to_string(audience)) + " instrument");
    }
    auto f = open_input(path, "responses");
    auto result = ingest_responses(f, instrument, *in.org);
    in.responses.merge(result.store);
    if (survey_rejects) {
      survey_rejects->insert(survey_rejects->end(), result.rejects.begin(), result.rejects.end());
    }
  }

  if (std::filesystem::exists(layout.thresholds())) {
    in.thresholds = load_thresholds(layout.thresholds().string());
  }
  return in;
}

Snapshot build_snapshot(const DataLayout& layout, std::vector<Window> periods, std::uint64_t id) {
  std::vector<Reject> event_rejects, survey_rejects;
  auto inputs = load_inputs(layout, std::move(periods), &event_rejects, &survey_rejects);
  PrincipalRegistry principals;
  if (std::filesystem::exists(layout.principals())) {
    principals = load_principals(layout.principals().string());
  }
  Snapshot s = build_snapshot(std::move(inputs), std::move(principals), id);
  s.event_rejects = std::move(event_rejects);
  s.survey_rejects = std::move(survey_rejects);
  return s;
}

Snapshot build_snapshot(PipelineInputs inputs, PrincipalRegistry principals, std::uint64_t id) {
  principals.validate(*inputs.org);
  Snapshot s;
  s.id = id;
  s.outputs = run_pipeline(inputs);
  s.inputs = std::move(inputs);
  s.principals = std::move(principals);
  return s;
}

}  // namespace tele
