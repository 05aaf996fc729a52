#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tele/dimension.hpp"
#include "tele/maturity.hpp"
#include "tele/org_model.hpp"
#include "tele/survey.hpp"
#include "tele/time.hpp"

namespace tele {

/// Where a score came from.
enum class Source : std::size_t { automatic_report, teacher_view, student_view };

inline constexpr std::size_t kSourceCount = 3;
inline constexpr std::array<Source, kSourceCount> kSources{
    Source::automatic_report, Source::teacher_view, Source::student_view};

std::string_view to_string(Source s) noexcept;
std::optional<Source> source_from_string(std::string_view name) noexcept;
constexpr std::size_t index_of(Source s) noexcept { return static_cast<std::size_t>(s); }

/// Identifies the inputs a cube was built from.
struct Provenance {
  std::string org;
  std::string events;
  std::string surveys;

  bool operator==(const Provenance&) const = default;
};

struct CubeCell {
  std::string node_id;
  Dimension dimension;
  Source source;
  std::size_t period;
  std::optional<double> score;  // nullopt = MISSING
  std::size_t cu_count = 0;     // CUs with a present value

  bool operator==(const CubeCell&) const = default;
};

struct CubeQuery {
  std::string org_scope;
  NodeKind granularity = NodeKind::course_unit;
  std::optional<std::vector<Dimension>> dimensions;  // nullopt = all
  std::optional<std::vector<Source>> sources;        // nullopt = all
  std::optional<std::vector<std::size_t>> periods;   // nullopt = all
  /// Restriction to specific nodes at `granularity`; set by authorization.
  std::optional<std::vector<std::string>> nodes;

  bool operator==(const CubeQuery&) const = default;
};

/// Immutable (org node x dimension x source x period) store. Base cells
/// are kept per CU; every higher node is computed on demand as the
/// unweighted mean over its descendant CUs' present values.
class Cube {
 public:
  Cube(std::shared_ptr<const OrgTree> org, std::vector<Window> periods,
       Provenance provenance = {});

  const OrgTree& org() const noexcept { return *org_; }
  std::shared_ptr<const OrgTree> org_ptr() const noexcept { return org_; }
  const std::vector<Window>& periods() const noexcept { return periods_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  /// Throws Error(not_found) when the window is not one of the periods.
  std::size_t period_index(const Window& w) const;

  std::optional<double> base(std::string_view cu, Dimension d, Source s,
                             std::size_t period) const;
  /// Number of present base cells.
  std::size_t base_cell_count() const noexcept { return present_; }

  void set_base(std::string_view cu, Dimension d, Source s, std::size_t period,
                double score);

  /// Mean over present descendant base cells; cu_count = contributors.
  CubeCell aggregate(std::string_view node, Dimension d, Source s,
                     std::size_t period) const;

 private:
  std::size_t slot(std::size_t cu_index, Dimension d, Source s, std::size_t period) const;
  std::size_t cu_index(std::string_view cu) const;
  void check_period(std::size_t period) const;

  std::shared_ptr<const OrgTree> org_;
  std::vector<Window> periods_;
  Provenance provenance_;
  std::vector<std::string> cu_ids_;  // sorted
  std::vector<std::optional<double>> cells_;
  std::size_t present_ = 0;
};

/// Populates base cells: AutomaticReport from each level profile's
/// classified levels, TeacherView / StudentView from survey scores. Throws
/// Error(validation) when an input refers to a period not in `periods` or
/// a CU not in the tree.
Cube build_cube(std::span<const LevelProfile> levels,
                std::span<const SurveyScore> surveys,
                std::shared_ptr<const OrgTree> org, std::vector<Window> periods,
                Provenance provenance = {});

/// Validates q against the org (scope exists, granularity not above the
/// scope, indices in range). Throws Error(not_found) / Error(invalid_argument).
void validate_query(const Cube& cube, const CubeQuery& q);

/// The nodes q ranges over, honoring an authorization restriction.
std::vector<std::string> query_nodes(const OrgTree& org, const CubeQuery& q);

/// One cell per (node, dimension, source, period), in that nesting order.
std::vector<CubeCell> query(const Cube& cube, const CubeQuery& q);

CubeCell aggregate_node(const Cube& cube, std::string_view node, Dimension d,
                        Source s, std::size_t period);

/// One cell per child of `node`. Throws Error(invalid_argument) "leaf node"
/// for a CU.
std::vector<CubeCell> drill_down(const Cube& cube, std::string_view node,
                                 Dimension d, Source s, std::size_t period);

/// Cube file: periods, provenance and every present base cell.
void write_cube(std::ostream& out, const Cube& cube);
Cube read_cube(std::istream& in, std::shared_ptr<const OrgTree> org);

/// Query results as a comma-separated table with a header row.
void write_cells_csv(std::ostream& out, const Cube& cube, std::span<const CubeCell> cells);

}  // namespace tele
