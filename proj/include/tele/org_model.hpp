#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tele {

enum class NodeKind { university, school, department, course_unit };

std::string_view to_string(NodeKind kind) noexcept;
/// Accepts "university", "school", "department", "cu".
NodeKind node_kind_from_string(std::string_view name);

/// Depth along the drill path: university 0 ... course unit 3.
constexpr int depth_of(NodeKind kind) noexcept { return static_cast<int>(kind); }

enum class MemberRole { teacher, student };

// Import records. One line of the org file becomes one of these.
struct NodeRecord {
  NodeKind kind;
  std::string id;
  std::string name;
  std::string parent_id;  // empty for the university
};

struct TeacherRecord {
  std::string id;
  std::string name;
  std::vector<std::string> school_ids;
};

struct MembershipRecord {
  std::string cu_id;
  std::string person_id;
  MemberRole role;
};

using OrgRecord = std::variant<NodeRecord, TeacherRecord, MembershipRecord>;

struct OrgNode {
  std::string id;
  std::string name;
  NodeKind kind;
  std::string parent_id;
  std::vector<std::string> children;  // in record order

  bool operator==(const OrgNode&) const = default;
};

struct CourseUnit {
  std::string id;
  std::string name;
  std::string department_id;
  std::set<std::string> teacher_ids;
  std::set<std::string> enrolled_student_ids;

  bool no_enrollment() const noexcept { return enrolled_student_ids.empty(); }
  bool has_member(std::string_view person) const;
  std::size_t population() const noexcept {
    return teacher_ids.size() + enrolled_student_ids.size();
  }

  bool operator==(const CourseUnit&) const = default;
};

struct Teacher {
  std::string id;
  std::string name;
  std::set<std::string> school_ids;

  bool operator==(const Teacher&) const = default;
};

/// Validated University -> School -> Department -> CU hierarchy.
/// Immutable once built.
class OrgTree {
 public:
  const std::string& root_id() const noexcept { return root_; }

  bool contains(std::string_view id) const;
  /// Throws Error(not_found).
  const OrgNode& node(std::string_view id) const;
  const OrgNode* find(std::string_view id) const;

  const CourseUnit& course_unit(std::string_view id) const;
  const CourseUnit* find_course_unit(std::string_view id) const;
  const std::map<std::string, CourseUnit, std::less<>>& course_units() const {
    return cus_;
  }
  const std::map<std::string, Teacher, std::less<>>& teachers() const {
    return teachers_;
  }

  /// Pre-order traversal from the root, children in record order.
  const std::vector<std::string>& preorder() const noexcept { return order_; }
  std::vector<std::string> nodes_of_kind(NodeKind kind) const;
  /// Nodes of `kind` inside the subtree rooted at `scope` (pre-order).
  std::vector<std::string> nodes_under(std::string_view scope,
                                       NodeKind kind) const;

  /// All CU ids beneath `id` (the singleton for a CU). Throws on unknown id.
  std::set<std::string> descendant_cus(std::string_view id) const;
  /// Same set as a sorted vector, precomputed at build time.
  const std::vector<std::string>& descendant_cu_list(std::string_view id) const;

  /// True when `id` equals `ancestor` or lies below it.
  bool is_within(std::string_view id, std::string_view ancestor) const;

  std::set<std::string> cus_taught_by(std::string_view teacher_id) const;

  std::size_t node_count() const noexcept { return nodes_.size(); }
  int height() const;

  /// Records that rebuild an identical tree (deterministic order).
  std::vector<OrgRecord> to_records() const;

  bool operator==(const OrgTree&) const = default;

 private:
  friend OrgTree build_org_tree(std::span<const OrgRecord> records);

  std::string root_;
  std::map<std::string, OrgNode, std::less<>> nodes_;
  std::map<std::string, CourseUnit, std::less<>> cus_;
  std::map<std::string, Teacher, std::less<>> teachers_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<std::string>, std::less<>> descendants_;
};

/// Validates and assembles the hierarchy. Errors (duplicate id, dangling
/// parent, cycle, wrong parent kind, CU without department, ...) throw
/// Error(validation) naming the offending id.
OrgTree build_org_tree(std::span<const OrgRecord> records);

/// Line-delimited org file (see docs/formats.md). Throws Error(parse) with
/// the line number on malformed input.
std::vector<OrgRecord> read_org_records(std::istream& in);
void write_org_records(std::ostream& out, std::span<const OrgRecord> records);

OrgTree load_org_tree(const std::string& path);

}  // namespace tele
