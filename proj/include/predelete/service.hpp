#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "predelete/cascade.hpp"

namespace httplib {
class Server;
}

namespace predelete {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path manifest;
  std::size_t max_body_bytes = 16384;
  std::filesystem::path request_log;  // empty disables logging
  std::vector<std::string> cors_origins;  // "*" allows any origin

  // Throws UsageError on an invalid port or a body limit below 1024.
  void validate() const;
};

// Parses "host:port" (or ":port", or a bare port).
void parse_bind(std::string_view bind, ServiceConfig& config);

// PREDELETE_BIND and PREDELETE_MANIFEST fill in values the caller did not set.
void apply_env_defaults(ServiceConfig& config, bool bind_given, bool manifest_given);

// The /v1/check handler without HTTP: status code plus JSON body.
struct ServiceResponse {
  int status = 200;
  nlohmann::ordered_json body;
};

class CheckService {
 public:
  explicit CheckService(ServiceConfig config);
  ~CheckService();
  CheckService(const CheckService&) = delete;
  CheckService& operator=(const CheckService&) = delete;

  // Loads the manifest from the config. Throws on failure; the previously
  // loaded cascade stays in place.
  void reload();
  // Atomic swap; in-flight requests finish on the cascade they started with.
  void install(std::shared_ptr<const CascadeBundle> cascade);
  std::shared_ptr<const CascadeBundle> cascade() const;

  ServiceResponse handle_check(std::string_view body);
  ServiceResponse handle_health() const;
  ServiceResponse handle_model() const;

  // Binds and returns the bound port.
  int bind();
  // Serves until stop(); bind() must have been called.
  void serve();
  void stop();

 private:
  void log_request(std::string_view text, const CheckResult& result);

  ServiceConfig config_;
  mutable std::mutex cascade_mutex_;
  std::shared_ptr<const CascadeBundle> cascade_;
  std::mutex log_mutex_;
  std::vector<unsigned char> log_key_;
  std::unique_ptr<httplib::Server> server_;
};

nlohmann::ordered_json error_body(std::string_view code, std::string_view message);

}  // namespace predelete
