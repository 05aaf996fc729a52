#include "tele/org_model.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>

#include "jsonl.hpp"
#include "tele/error.hpp"

namespace tele {
namespace {

using detail::json;
using detail::ordered_json;

constexpr std::string_view kOrgSchema = "tele.org";
constexpr int kOrgVersion = 1;

[[noreturn]] void invalid(const std::string& what, std::string_view id) {
  throw Error(Errc::validation, what + ": " + std::string(id));
}

}  // namespace

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
    case NodeKind::university: return "university";
    case NodeKind::school: return "school";
    case NodeKind::department: return "department";
    case NodeKind::course_unit: return "cu";
  }
  return "?";
}

NodeKind node_kind_from_string(std::string_view name) {
  if (name == "university") return NodeKind::university;
  if (name == "school") return NodeKind::school;
  if (name == "department") return NodeKind::department;
  if (name == "cu") return NodeKind::course_unit;
  throw Error(Errc::parse, "unknown node kind '" + std::string(name) + "'");
}

bool CourseUnit::has_member(std::string_view person) const {
  std::string p(person);
  return teacher_ids.contains(p) || enrolled_student_ids.contains(p);
}

bool OrgTree::contains(std::string_view id) const { return nodes_.contains(id); }

const OrgNode* OrgTree::find(std::string_view id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const OrgNode& OrgTree::node(std::string_view id) const {
  if (const auto* n = find(id)) return *n;
  throw Error(Errc::not_found, "unknown node: " + std::string(id));
}

const CourseUnit* OrgTree::find_course_unit(std::string_view id) const {
  auto it = cus_.find(id);
  return it == cus_.end() ? nullptr : &it->second;
}

const CourseUnit& OrgTree::course_unit(std::string_view id) const {
  if (const auto* cu = find_course_unit(id)) return *cu;
  throw Error(Errc::not_found, "unknown cu: " + std::string(id));
}

std::vector<std::string> OrgTree::nodes_of_kind(NodeKind kind) const {
  return nodes_under(root_, kind);
}

std::vector<std::string> OrgTree::nodes_under(std::string_view scope,
                                              NodeKind kind) const {
  std::vector<std::string> out;
  std::function<void(const OrgNode&)> walk = [&](const OrgNode& n) {
    if (n.kind == kind) {
      out.push_back(n.id);
      return;
    }
    if (depth_of(n.kind) > depth_of(kind)) return;
    for (const auto& c : n.children) walk(nodes_.find(c)->second);
  };
  walk(node(scope));
  return out;
}

const std::vector<std::string>& OrgTree::descendant_cu_list(
    std::string_view id) const {
  auto it = descendants_.find(id);
  if (it == descendants_.end()) {
    throw Error(Errc::not_found, "unknown node: " + std::string(id));
  }
  return it->second;
}

std::set<std::string> OrgTree::descendant_cus(std::string_view id) const {
  const auto& list = descendant_cu_list(id);
  return {list.begin(), list.end()};
}

bool OrgTree::is_within(std::string_view id, std::string_view ancestor) const {
  const OrgNode* n = find(id);
  while (n != nullptr) {
    if (n->id == ancestor) return true;
    if (n->parent_id.empty()) return false;
    n = find(n->parent_id);
  }
  return false;
}

std::set<std::string> OrgTree::cus_taught_by(std::string_view teacher_id) const {
  std::set<std::string> out;
  std::string t(teacher_id);
  for (const auto& [id, cu] : cus_) {
    if (cu.teacher_ids.contains(t)) out.insert(id);
  }
  return out;
}

int OrgTree::height() const {
  int h = 0;
  for (const auto& [id, n] : nodes_) h = std::max(h, depth_of(n.kind) + 1);
  return h;
}

std::vector<OrgRecord> OrgTree::to_records() const {
  std::vector<OrgRecord> out;
  for (const auto& id : order_) {
    const auto& n = nodes_.find(id)->second;
    out.push_back(NodeRecord{n.kind, n.id, n.name, n.parent_id});
  }
  for (const auto& [id, t] : teachers_) {
    out.push_back(TeacherRecord{t.id, t.name, {t.school_ids.begin(), t.school_ids.end()}});
  }
  for (const auto& [id, cu] : cus_) {
    for (const auto& t : cu.teacher_ids) {
      out.push_back(MembershipRecord{id, t, MemberRole::teacher});
    }
    for (const auto& s : cu.enrolled_student_ids) {
      out.push_back(MembershipRecord{id, s, MemberRole::student});
    }
  }
  return out;
}

OrgTree build_org_tree(std::span<const OrgRecord> records) {
  OrgTree tree;
  std::vector<const NodeRecord*> node_records;

  for (const auto& r : records) {
    if (const auto* n = std::get_if<NodeRecord>(&r)) {
      if (n->id.empty()) invalid("empty node id", n->name);
      if (tree.nodes_.contains(n->id)) invalid("duplicate id", n->id);
      tree.nodes_.emplace(n->id, OrgNode{n->id, n->name, n->kind, n->parent_id, {}});
      node_records.push_back(n);
    }
  }

  for (const auto* n : node_records) {
    if (n->kind == NodeKind::university) {
      if (!n->parent_id.empty()) invalid("university with parent", n->id);
      if (!tree.root_.empty()) invalid("second university", n->id);
      tree.root_ = n->id;
      continue;
    }
    if (n->parent_id.empty()) {
      if (n->kind == NodeKind::course_unit) invalid("CU without department", n->id);
      invalid("missing parent_id", n->id);
    }
    if (!tree.nodes_.contains(n->parent_id)) {
      invalid("dangling parent_id '" + n->parent_id + "'", n->id);
    }
  }
  if (tree.root_.empty()) {
    throw Error(Errc::validation, "no university node");
  }

  // Every node walks up to the root; anything longer than the node count
  // is a cycle.
  for (const auto* n : node_records) {
    std::string cur = n->id;
    std::size_t steps = 0;
    while (cur != tree.root_) {
      const auto& node = tree.nodes_.find(cur)->second;
      if (node.parent_id.empty() || ++steps > tree.nodes_.size()) {
        invalid("cycle detected", n->id);
      }
      cur = node.parent_id;
    }
  }

  for (const auto* n : node_records) {
    if (n->kind == NodeKind::university) continue;
    const auto& parent = tree.nodes_.find(n->parent_id)->second;
    if (depth_of(parent.kind) != depth_of(n->kind) - 1) {
      invalid("wrong parent kind (" + std::string(to_string(parent.kind)) +
                  " cannot hold " + std::string(to_string(n->kind)) + ")",
              n->id);
    }
    tree.nodes_.find(n->parent_id)->second.children.push_back(n->id);
    if (n->kind == NodeKind::course_unit) {
      tree.cus_.emplace(n->id, CourseUnit{n->id, n->name, n->parent_id, {}, {}});
    }
  }

  for (const auto& r : records) {
    if (const auto* t = std::get_if<TeacherRecord>(&r)) {
      if (tree.teachers_.contains(t->id)) invalid("duplicate teacher", t->id);
      Teacher teacher{t->id, t->name, {}};
      for (const auto& s : t->school_ids) {
        const OrgNode* school = tree.find(s);
        if (school == nullptr || school->kind != NodeKind::school) {
          invalid("teacher references unknown school '" + s + "'", t->id);
        }
        teacher.school_ids.insert(s);
      }
      tree.teachers_.emplace(t->id, std::move(teacher));
    }
  }

  for (const auto& r : records) {
    const auto* m = std::get_if<MembershipRecord>(&r);
    if (m == nullptr) continue;
    auto cu_it = tree.cus_.find(m->cu_id);
    if (cu_it == tree.cus_.end()) {
      invalid("membership references unknown cu '" + m->cu_id + "'", m->person_id);
    }
    auto& cu = cu_it->second;
    if (m->person_id.empty()) invalid("empty person id in membership", m->cu_id);
    if (m->role == MemberRole::teacher) {
      if (cu.enrolled_student_ids.contains(m->person_id)) {
        invalid("person is both teacher and student of cu '" + m->cu_id + "'",
                m->person_id);
      }
      cu.teacher_ids.insert(m->person_id);
      auto [it, inserted] =
          tree.teachers_.try_emplace(m->person_id, Teacher{m->person_id, m->person_id, {}});
      (void)inserted;
      const auto& dept = tree.nodes_.find(cu.department_id)->second;
      it->second.school_ids.insert(dept.parent_id);
    } else {
      if (cu.teacher_ids.contains(m->person_id)) {
        invalid("person is both teacher and student of cu '" + m->cu_id + "'",
                m->person_id);
      }
      cu.enrolled_student_ids.insert(m->person_id);
    }
  }

  for (const auto& [id, t] : tree.teachers_) {
    if (t.school_ids.empty()) invalid("teacher without school", id);
  }

  std::function<void(const std::string&)> walk = [&](const std::string& id) {
    tree.order_.push_back(id);
    const auto& n = tree.nodes_.find(id)->second;
    std::vector<std::string> below;
    if (n.kind == NodeKind::course_unit) below.push_back(id);
    for (const auto& c : n.children) {
      walk(c);
      const auto& sub = tree.descendants_.find(c)->second;
      below.insert(below.end(), sub.begin(), sub.end());
    }
    std::sort(below.begin(), below.end());
    tree.descendants_.emplace(id, std::move(below));
  };
  walk(tree.root_);
  return tree;
}

std::vector<OrgRecord> read_org_records(std::istream& in) {
  std::vector<OrgRecord> out;
  std::size_t line_no = 0;
  detail::expect_header(in, kOrgSchema, kOrgVersion, line_no);
  std::string line;
  while (detail::next_line(in, line, line_no)) {
    json j = detail::parse_json_line(line, line_no);
    if (!j.is_object()) {
      throw Error(Errc::parse, detail::line_prefix(line_no) + "record is not an object");
    }
    std::string kind = detail::require_string(j, "kind", line_no);
    if (kind == "membership") {
      std::string role = detail::require_string(j, "role", line_no);
      if (role != "teacher" && role != "student") {
        throw Error(Errc::parse, detail::line_prefix(line_no) + "unknown role '" + role + "'");
      }
      out.push_back(MembershipRecord{detail::require_string(j, "cu_id", line_no),
                                     detail::require_string(j, "person_id", line_no),
                                     role == "teacher" ? MemberRole::teacher
                                                       : MemberRole::student});
    } else if (kind == "teacher") {
      TeacherRecord t{detail::require_string(j, "id", line_no),
                      detail::optional_string(j, "name", line_no).value_or(""), {}};
      if (auto it = j.find("school_ids"); it != j.end()) {
        if (!it->is_array()) {
          throw Error(Errc::parse, detail::line_prefix(line_no) + "school_ids must be a list");
        }
        for (const auto& s : *it) {
          if (!s.is_string()) {
            throw Error(Errc::parse, detail::line_prefix(line_no) + "school id not a string");
          }
          t.school_ids.push_back(s.get<std::string>());
        }
      }
      out.push_back(std::move(t));
    } else {
      NodeKind k;
      try {
        k = node_kind_from_string(kind);
      } catch (const Error& e) {
        throw Error(Errc::parse, detail::line_prefix(line_no) + e.what());
      }
      out.push_back(NodeRecord{k, detail::require_string(j, "id", line_no),
                               detail::optional_string(j, "name", line_no).value_or(""),
                               detail::optional_string(j, "parent_id", line_no).value_or("")});
    }
  }
  return out;
}

void write_org_records(std::ostream& out, std::span<const OrgRecord> records) {
  out << detail::header_line(kOrgSchema, kOrgVersion) << '\n';
  for (const auto& r : records) {
    ordered_json j;
    if (const auto* n = std::get_if<NodeRecord>(&r)) {
      j["kind"] = to_string(n->kind);
      j["id"] = n->id;
      j["name"] = n->name;
      if (!n->parent_id.empty()) j["parent_id"] = n->parent_id;
    } else if (const auto* t = std::get_if<TeacherRecord>(&r)) {
      j["kind"] = "teacher";
      j["id"] = t->id;
      j["name"] = t->name;
      j["school_ids"] = t->school_ids;
    } else {
      const auto& m = std::get<MembershipRecord>(r);
      j["kind"] = "membership";
      j["cu_id"] = m.cu_id;
      j["person_id"] = m.person_id;
      j["role"] = m.role == MemberRole::teacher ? "teacher" : "student";
    }
    out << j.dump() << '\n';
  }
}

OrgTree load_org_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open org file " + path);
  auto records = read_org_records(in);
  return build_org_tree(records);
}

}  // namespace tele
