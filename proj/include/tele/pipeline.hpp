#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tele/access_control.hpp"
#include "tele/cube.hpp"
#include "tele/event_ingest.hpp"
#include "tele/maturity.hpp"
#include "tele/metrics.hpp"
#include "tele/org_model.hpp"
#include "tele/survey.hpp"

namespace tele {

/// File layout of a data directory:
///   org.jsonl, events.jsonl, principals.jsonl (optional),
///   thresholds.json (optional, defaults otherwise),
///   instruments/{teacher,student}.json,
///   responses/{teacher,student}.csv or .jsonl (optional).
struct DataLayout {
  std::filesystem::path root;

  std::filesystem::path org() const { return root / "org.jsonl"; }
  std::filesystem::path events() const { return root / "events.jsonl"; }
  std::filesystem::path principals() const { return root / "principals.jsonl"; }
  std::filesystem::path thresholds() const { return root / "thresholds.json"; }
  std::filesystem::path instrument(Audience a) const;
  /// The .csv file if present, else the .jsonl one, else the .csv path.
  std::filesystem::path responses(Audience a) const;
};

/// Digest of the org records in canonical order.
std::string org_digest(const OrgTree& tree);

/// The smallest whole-day window covering every event; throws
/// Error(validation) for an empty store.
Window covering_window(const EventStore& store);

/// Everything a cube is computed from.
struct PipelineInputs {
  std::shared_ptr<const OrgTree> org;
  EventStore events;
  ResponseStore responses;
  ThresholdConfig thresholds = default_thresholds();
  std::vector<Window> periods;  // empty = one covering window
};

struct PipelineOutputs {
  std::vector<Window> periods;
  std::vector<DimensionProfile> profiles;
  std::vector<LevelProfile> levels;
  std::vector<SurveyScore> surveys;
  std::shared_ptr<const Cube> cube;
};

/// compute -> classify -> survey scores -> cube, in process.
PipelineOutputs run_pipeline(const PipelineInputs& inputs);

/// An immutable, consistently built view answering all reads.
struct Snapshot {
  std::uint64_t id = 0;
  PipelineInputs inputs;
  PipelineOutputs outputs;
  PrincipalRegistry principals;
  std::vector<Reject> event_rejects;
  std::vector<Reject> survey_rejects;

  const OrgTree& org() const { return *inputs.org; }
  const Cube& cube() const { return *outputs.cube; }
};

/// Loads inputs from a data directory. Missing optional files fall back to
/// defaults; a truncated or corrupt event or response file throws.
PipelineInputs load_inputs(const DataLayout& layout, std::vector<Window> periods,
                           std::vector<Reject>* event_rejects = nullptr,
                           std::vector<Reject>* survey_rejects = nullptr);

/// Loads and computes a snapshot with the given id.
Snapshot build_snapshot(const DataLayout& layout, std::vector<Window> periods,
                        std::uint64_t id);

/// Computes a snapshot from in-memory inputs.
Snapshot build_snapshot(PipelineInputs inputs, PrincipalRegistry principals, std::uint64_t id);

}  // namespace tele
