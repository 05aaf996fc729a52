#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "tele/dimension.hpp"
#include "tele/event_ingest.hpp"
#include "tele/org_model.hpp"
#include "tele/time.hpp"

namespace tele {

enum class Audience { teacher, student };

std::string_view to_string(Audience a) noexcept;
Audience audience_from_string(std::string_view name);

struct InstrumentItem {
  std::string id;
  std::string prompt;
  Dimension dimension;

  bool operator==(const InstrumentItem&) const = default;
};

/// A questionnaire: items tagged by dimension, answered on a 1..5 scale.
struct Instrument {
  Audience audience = Audience::student;
  std::string title;
  std::vector<InstrumentItem> items;  // file order
  int scale_min = 1;
  int scale_max = 5;

  const InstrumentItem* find(std::string_view item_id) const;
  bool operator==(const Instrument&) const = default;
};

/// Validates coverage (every dimension has an item), unique ids and the
/// 1..5 scale. Throws Error(validation).
void validate_instrument(const Instrument& instrument);

Instrument read_instrument(std::istream& in);
void write_instrument(std::ostream& out, const Instrument& instrument);
Instrument load_instrument(const std::string& path);

/// Placeholder instruments, two items per dimension. The item wording is
/// authored for this project and meant to be replaced by the institution.
Instrument default_instrument(Audience audience);

struct SurveyResponse {
  std::string respondent_id;
  std::string cu_id;
  std::string item_id;
  int value = 0;
  Timestamp timestamp{};

  bool operator==(const SurveyResponse&) const = default;
};

/// Accepted responses, deduplicated per (cu, respondent, item): the later
/// timestamp wins, ties go to the later line.
class ResponseStore {
 public:
  struct Entry {
    SurveyResponse response;
    Audience audience;
    Dimension dimension;
  };

  void add(const SurveyResponse& r, Audience audience, Dimension dimension);
  void merge(const ResponseStore& other);

  std::size_t size() const noexcept { return entries_.size(); }
  std::vector<Entry> entries() const;
  std::vector<Entry> entries_for(std::string_view cu, Audience audience) const;

  std::string digest() const;

 private:
  using Key = std::tuple<std::string, std::string, std::string, Audience>;
  std::map<Key, Entry> entries_;
};

struct ResponseIngestResult {
  ResponseStore store;
  std::vector<Reject> rejects;
};

/// Reads responses for one instrument. Accepts a comma-separated table with
/// header row "respondent_id,cu_id,item_id,value,timestamp" or the
/// line-delimited record format. Bad rows are rejected with a reason
/// ("unknown cu", "unknown item", "audience mismatch", "not a member",
/// "scale violation", "malformed row"); an unreadable stream throws.
ResponseIngestResult ingest_responses(std::istream& in, const Instrument& instrument,
                                      const OrgTree& tree);

void write_responses_csv(std::ostream& out, std::span<const SurveyResponse> responses);

struct SurveyScore {
  std::string cu_id;
  Audience audience = Audience::student;
  Dimension dimension = Dimension::dynamics;
  std::optional<Window> window;  // nullopt = all responses
  std::optional<double> score;   // nullopt = MISSING
  std::size_t respondent_count = 0;

  bool operator==(const SurveyScore&) const = default;
};

/// Pooled mean over all responses to items of each dimension. Throws
/// Error(not_found) for a CU absent from the tree.
PerDimension<SurveyScore> survey_scores(const ResponseStore& store,
                                        const OrgTree& tree, std::string_view cu,
                                        Audience audience,
                                        std::optional<Window> window = std::nullopt);

/// Scores for every CU, both audiences and every window.
std::vector<SurveyScore> all_survey_scores(const ResponseStore& store,
                                           const OrgTree& tree,
                                           std::span<const Window> windows);

}  // namespace tele
