#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tele/pipeline.hpp"

namespace tele {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "data";
  std::vector<Window> periods;  // empty = one window covering the events
};

/// Reads the JSON config {"host","port","data_dir","periods":["A..B",...]}.
/// A relative data_dir is resolved against `base_dir`.
ServiceConfig read_service_config(std::istream& in, const std::filesystem::path& base_dir = {});
ServiceConfig load_service_config(const std::filesystem::path& path);

/// TELE_PORT and TELE_DATA_DIR override the file values.
void apply_env_overrides(ServiceConfig& config);

/// Every problem found, one message each; empty means usable.
std::vector<std::string> check_service_config(const ServiceConfig& config);

struct Request {
  std::string method = "GET";
  std::string path;
  std::string authorization;  // raw header value, "Bearer <token>"
  std::map<std::string, std::string> params;
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::uint64_t snapshot = 0;  // also sent as X-Tele-Snapshot
};

/// Routes:
///   GET  /org                    navigable org tree for the caller
///   GET  /cube                   scope, granularity, dimensions, sources, periods
///   GET  /radar/{node}           period, format=json|svg
///   GET  /snapshots/current      snapshot metadata
///   POST /admin/rebuild          reload the data directory
///   POST /admin/ingest/events    body: event records, appended then rebuilt
///   POST /admin/ingest/surveys   audience=teacher|student, body: responses
/// Statuses: 401 unknown credential, 403 scope denial or non-admin on
/// /admin, 404 unknown route/node/period, 422 malformed query or failed
/// ingest, 500 internal.
class Service {
 public:
  /// Builds snapshot 1 from the data directory; throws on failure.
  explicit Service(ServiceConfig config);
  /// Serves a prebuilt snapshot; admin routes that read files need a
  /// data directory and answer 422 without one.
  explicit Service(Snapshot snapshot);

  Response handle(const Request& request) const;
  Response handle_admin(const Request& request);

  /// Dispatches to handle() or handle_admin().
  Response dispatch(const Request& request);

  std::shared_ptr<const Snapshot> current() const;

  /// Builds a new snapshot from the data directory and swaps it in. On
  /// failure the current snapshot stays and the error propagates.
  std::uint64_t rebuild();

  const ServiceConfig& config() const noexcept { return config_; }

 private:
  void install(Snapshot snapshot);

  ServiceConfig config_;
  bool has_data_dir_ = false;
  mutable std::mutex current_mu_;
  std::shared_ptr<const Snapshot> current_;
  std::mutex rebuild_mu_;  // one rebuild or ingest in flight
};

/// Blocks serving `service` over HTTP until the process is stopped.
void serve_http(Service& service);

}  // namespace tele
