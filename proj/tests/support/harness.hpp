#pragma once

// Runs an oracle instance through the production path: serialized files,
// ingestion, then the in-process pipeline.

#include <memory>

#include "oracle.hpp"
#include "tele/pipeline.hpp"

namespace tele::testing {

struct Production {
  PipelineInputs inputs;
  PipelineOutputs outputs;
  std::size_t event_rejects = 0;
  std::size_t survey_rejects = 0;
};

Production run_production(const Instance& instance);

ThresholdConfig thresholds_of(const Instance& instance);

}  // namespace tele::testing
