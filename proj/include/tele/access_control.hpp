#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tele/cube.hpp"
#include "tele/error.hpp"
#include "tele/org_model.hpp"

namespace tele {

enum class RoleKind { teacher, dept_coordinator, school_director, quality_service, direction };

std::string_view to_string(RoleKind kind) noexcept;
RoleKind role_kind_from_string(std::string_view name);

struct Role {
  RoleKind kind = RoleKind::direction;
  /// Teacher id, department id or school id; empty for the
  /// institution-wide roles.
  std::string ref;

  bool operator==(const Role&) const = default;
};

struct Principal {
  std::string id;
  Role role;
  std::string token_hash;  // hex SHA-256 of the bearer token
  bool admin = false;      // may trigger ingestion and rebuilds
};

/// Throws Error(not_found) when the role's reference is not in the tree at
/// the matching kind.
void validate_principal(const Principal& p, const OrgTree& tree);

/// CUs the principal may see.
std::set<std::string> visible_cus(const Principal& p, const OrgTree& tree);

struct Denial {
  std::string reason;  // e.g. "insufficient scope"
  std::string scope;   // the offending org node
};

class AccessDenied : public Error {
 public:
  explicit AccessDenied(Denial d)
      : Error(Errc::denied, d.reason + " for " + d.scope), denial_(std::move(d)) {}
  const Denial& denial() const noexcept { return denial_; }

 private:
  Denial denial_;
};

/// Restricts q to the nodes whose contributing CUs all lie inside the
/// principal's visible set. Aggregates that would mix visible and hidden
/// CUs are dropped, never partially computed; if nothing is left the call
/// throws AccessDenied. Malformed queries throw Error(invalid_argument /
/// not_found) before any access decision.
CubeQuery authorize(const Principal& p, const CubeQuery& q, const OrgTree& tree);

/// Token -> principal lookup backed by the registry file.
class PrincipalRegistry {
 public:
  void add(Principal p);
  /// Hashes `token` and looks up the matching principal; nullptr if none.
  const Principal* authenticate(std::string_view token) const;
  const Principal* find(std::string_view id) const;
  const std::vector<Principal>& principals() const noexcept { return principals_; }
  void validate(const OrgTree& tree) const;

 private:
  std::vector<Principal> principals_;
  std::map<std::string, std::size_t, std::less<>> by_hash_;
};

/// Line-delimited registry: {"id","role","ref","token_sha256","admin"}.
PrincipalRegistry read_principals(std::istream& in);
PrincipalRegistry load_principals(const std::string& path);
void write_principals(std::ostream& out, const PrincipalRegistry& registry);

}  // namespace tele
