#pragma once

#include <stdexcept>
#include <string>

namespace tele {

/// Broad failure classes. The CLI and the HTTP service map these onto
/// exit codes and status codes respectively.
enum class Errc {
  invalid_argument,  // caller supplied something structurally wrong
  not_found,         // unknown node, CU, period, principal ...
  parse,             // input text does not follow the documented grammar
  validation,        // input parses but violates an invariant
  denied,            // access control refused the request
  io,                // unreadable stream or file
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tele
