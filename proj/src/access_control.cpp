#include "tele/access_control.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "jsonl.hpp"
#include "tele/digest.hpp"

namespace tele {
namespace {

using detail::json;
using detail::ordered_json;

constexpr std::string_view kPrincipalSchema = "tele.principals";

// Root of the subtree a role manages, if any.
std::string owned_root(const Principal& p, const OrgTree& tree) {
  switch (p.role.kind) {
    case RoleKind::dept_coordinator:
    case RoleKind::school_director: return p.role.ref;
    case RoleKind::quality_service:
    case RoleKind::direction: return tree.root_id();
    case RoleKind::teacher: return {};
  }
  return {};
}

}  // namespace

std::string_view to_string(RoleKind kind) noexcept {
  switch (kind) {
    case RoleKind::teacher: return "teacher";
    case RoleKind::dept_coordinator: return "dept_coordinator";
    case RoleKind::school_director: return "school_director";
    case RoleKind::quality_service: return "quality_service";
    case RoleKind::direction: return "direction";
  }
  return "?";
}

RoleKind role_kind_from_string(std::string_view name) {
  for (auto k : {RoleKind::teacher, RoleKind::dept_coordinator, RoleKind::school_director,
                 RoleKind::quality_service, RoleKind::direction}) {
    if (to_string(k) == name) return k;
  }
  throw Error(Errc::parse, "unknown role kind '" + std::string(name) + "'");
}

void validate_principal(const Principal& p, const OrgTree& tree) {
  auto expect_node = [&](NodeKind kind) {
    const OrgNode* n = tree.find(p.role.ref);
    if (n == nullptr || n->kind != kind) {
      throw Error(Errc::not_found, "principal " + p.id + ": no " +
                                       std::string(to_string(kind)) + " '" + p.role.ref + "'");
    }
  };
  switch (p.role.kind) {
    case RoleKind::teacher:
      if (!tree.teachers().contains(p.role.ref)) {
        throw Error(Errc::not_found, "principal " + p.id + ": no teacher '" + p.role.ref + "'");
      }
      break;
    case RoleKind::dept_coordinator: expect_node(NodeKind::department); break;
    case RoleKind::school_director: expect_node(NodeKind::school); break;
    case RoleKind::quality_service:
    case RoleKind::direction: break;
  }
}

std::set<std::string> visible_cus(const Principal& p, const OrgTree& tree) {
  validate_principal(p, tree);
  if (p.role.kind == RoleKind::teacher) return tree.cus_taught_by(p.role.ref);
  return tree.descendant_cus(owned_root(p, tree));
}

CubeQuery authorize(const Principal& p, const CubeQuery& q, const OrgTree& tree) {
  const OrgNode& scope = tree.node(q.org_scope);
  if (depth_of(q.granularity) < depth_of(scope.kind)) {
    throw Error(Errc::invalid_argument, "granularity " + std::string(to_string(q.granularity)) +
                                            " is above scope " + q.org_scope);
  }
  auto visible = visible_cus(p, tree);
  std::string owned = owned_root(p, tree);

  CubeQuery out = q;
  std::vector<std::string> allowed;
  auto candidates = query_nodes(tree, q);
  for (const auto& node : candidates) {
    const auto& contributors = tree.descendant_cu_list(node);
    bool covered = std::all_of(contributors.begin(), contributors.end(),
                               [&](const std::string& cu) { return visible.contains(cu); });
    // An empty unit is only shown to someone who manages it.
    bool vacuous_ok = !contributors.empty() || (!owned.empty() && tree.is_within(node, owned));
    if (covered && vacuous_ok) allowed.push_back(node);
  }
  if (allowed.empty()) throw AccessDenied({"insufficient scope", q.org_scope});
  if (allowed.size() != candidates.size()) out.nodes = std::move(allowed);
  return out;
}

void PrincipalRegistry::add(Principal p) {
  if (find(p.id) != nullptr) throw Error(Errc::validation, "duplicate principal " + p.id);
  if (!p.token_hash.empty()) {
    if (by_hash_.contains(p.token_hash)) {
      throw Error(Errc::validation, "duplicate token hash for principal " + p.id);
    }
    by_hash_.emplace(p.token_hash, principals_.size());
  }
  principals_.push_back(std::move(p));
}

const Principal* PrincipalRegistry::authenticate(std::string_view token) const {
  if (token.empty()) return nullptr;
  auto it = by_hash_.find(sha256_hex(token));
  return it == by_hash_.end() ? nullptr : &principals_[it->second];
}

const Principal* PrincipalRegistry::find(std::string_view id) const {
  for (const auto& p : principals_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

void PrincipalRegistry::validate(const OrgTree& tree) const {
  for (const auto& p : principals_) validate_principal(p, tree);
}

PrincipalRegistry read_principals(std::istream& in) {
  std::size_t line_no = 0;
  detail::expect_header(in, kPrincipalSchema, 1, line_no);
  PrincipalRegistry reg;
  std::string line;
  while (detail::next_line(in, line, line_no)) {
    json j = detail::parse_json_line(line, line_no);
    Principal p;
    p.id = detail::require_string(j, "id", line_no);
    try {
      p.role.kind = role_kind_from_string(detail::require_string(j, "role", line_no));
    } catch (const Error& e) {
      throw Error(Errc::parse, detail::line_prefix(line_no) + e.what());
    }
    p.role.ref = detail::optional_string(j, "ref", line_no).value_or("");
    p.token_hash = detail::require_string(j, "token_sha256", line_no);
    p.admin = j.value("admin", false);
    reg.add(std::move(p));
  }
  return reg;
}

PrincipalRegistry load_principals(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open principal registry " + path);
  return read_principals(in);
}

void write_principals(std::ostream& out, const PrincipalRegistry& registry) {
  out << detail::header_line(kPrincipalSchema, 1) << '\n';
  for (const auto& p : registry.principals()) {
    ordered_json j;
    j["id"] = p.id;
    j["role"] = to_string(p.role.kind);
    if (!p.role.ref.empty()) j["ref"] = p.role.ref;
    j["token_sha256"] = p.token_hash;
    if (p.admin) j["admin"] = true;
    out << j.dump() << '\n';
  }
}

}  // namespace tele
