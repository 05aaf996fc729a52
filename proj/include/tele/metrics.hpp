#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tele/dimension.hpp"
#include "tele/event_ingest.hpp"
#include "tele/org_model.hpp"
#include "tele/time.hpp"

namespace tele {

/// The seven indicator values of one CU over one window.
struct DimensionProfile {
  std::string cu_id;
  Window window;
  std::int64_t active_user_count = 0;
  double access_dynamics = 0.0;           // hits / week / active user
  int information_presence = 0;           // 0..4 channels
  std::int64_t sync_forums_open = 0;
  double sync_posts_per_active_user = 0.0;
  double async_user_pct = 0.0;            // 0..100
  std::int64_t rich_content_count = 0;
  int work_delivery_features = 0;         // 0..4 feature classes
  std::int64_t evaluation_test_count = 0;
  bool no_activity = true;

  /// The scalar the maturity classifier reads for a dimension. For the
  /// synchronous dimension that is posts per active user.
  double scalar(Dimension d) const noexcept;

  bool operator==(const DimensionProfile&) const = default;
};

// Indicator operations. Each takes the events already sliced to one CU
// and one window.

/// Distinct users with at least one ACCESS event.
std::int64_t active_users(std::span<const Event> events);

/// ACCESS count / window weeks / active users; 0 when nobody accessed.
/// Throws Error(validation) on an empty or inverted window.
double access_dynamics(std::span<const Event> events, const Window& window);

/// Distinct channels used among ANNOUNCEMENT, MESSAGE, PROGRAMME_POST and
/// CALENDAR_ENTRY.
int information_presence(std::span<const Event> events);

struct SyncComm {
  std::int64_t forums_open = 0;
  double posts_per_active_user = 0.0;
  bool operator==(const SyncComm&) const = default;
};
SyncComm sync_comm(std::span<const Event> events);

/// Percentage of the CU population (teachers + enrolled students) with at
/// least one ASYNC_TOOL_USE event.
double async_comm(std::span<const Event> events, const CourseUnit& cu);

std::int64_t rich_content(std::span<const Event> events);

/// Distinct feature classes used among individual submission, group
/// submission, group progress view and plagiarism check.
int work_delivery(std::span<const Event> events);

std::int64_t evaluation_tests(std::span<const Event> events);

/// All indicators over one consistent slice.
DimensionProfile dimension_profile(const EventStore& store, const OrgTree& tree,
                                   std::string_view cu, const Window& window);

/// One profile per CU (in CU id order) and window (in the given order).
std::vector<DimensionProfile> compute_profiles(const EventStore& store,
                                               const OrgTree& tree,
                                               std::span<const Window> windows);

void write_profiles(std::ostream& out, std::span<const DimensionProfile> profiles);
std::vector<DimensionProfile> read_profiles(std::istream& in);

}  // namespace tele
