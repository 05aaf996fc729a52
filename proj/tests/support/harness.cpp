#include "harness.hpp"

#include <sstream>

namespace tele::testing {

ThresholdConfig thresholds_of(const Instance& instance) {
  ThresholdSpec spec;
  spec.version = 1;
  spec.label = "random";
  for (auto d : kDimensions) {
    const auto& c = instance.cuts[index_of(d)];
    spec.dimensions[std::string(to_string(d))] = {c.begin(), c.end()};
  }
  return make_thresholds(spec);
}

Production run_production(const Instance& instance) {
  Production out;
  std::stringstream org_text;
  write_org_records(org_text, instance.org);
  out.inputs.org = std::make_shared<const OrgTree>(build_org_tree(read_org_records(org_text)));

  std::stringstream log;
  write_event_log(log, instance.events);
  auto ingested = ingest_events(log, *out.inputs.org);
  out.inputs.events = std::move(ingested.store);
  out.event_rejects = ingested.rejects.size();

  for (auto audience : {Audience::teacher, Audience::student}) {
    const Instrument& form =
        audience == Audience::teacher ? instance.teacher_instrument : instance.student_instrument;
    std::vector<SurveyResponse> rows;
    for (const auto& r : instance.responses) {
      if (r.instrument == audience) rows.push_back(r.response);
    }
    std::stringstream table;
    write_responses_csv(table, rows);
    auto result = ingest_responses(table, form, *out.inputs.org);
    out.inputs.responses.merge(result.store);
    out.survey_rejects += result.rejects.size();
  }
  out.inputs.thresholds = thresholds_of(instance);
  out.inputs.periods = instance.periods;
  out.outputs = run_pipeline(out.inputs);
  return out;
}

}  // namespace tele::testing
