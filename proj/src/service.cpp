#include "predelete/service.hpp"

#include <sodium.h>

#include <chrono>
#include <cstdlib>
#include <fstream>

#include <httplib.h>

#include "predelete/error.hpp"

namespace predelete {

namespace {

nlohmann::ordered_json stage_json(const ModelBundle& b) {
  nlohmann::ordered_json j;
  j["fingerprint"] = b.fingerprint;
  j["model"] = model_kind(b.model);
  j["labels"] = b.labels.names();
  j["vocabulary_size"] = b.vocabulary.size();
  j["corpus_fingerprint"] = b.metadata.corpus_fingerprint;
  j["seed"] = b.metadata.seed;
  j["timestamp"] = b.metadata.timestamp;
  return j;
}

std::string json_text(const nlohmann::ordered_json& j) {
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

}  // namespace

nlohmann::ordered_json error_body(std::string_view code, std::string_view message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw UsageError("port " + std::to_string(port) + " is out of range");
  if (max_body_bytes < 1024) throw UsageError("body limit must be at least 1024 bytes");
  if (host.empty()) throw UsageError("bind host is empty");
}

void parse_bind(std::string_view bind, ServiceConfig& config) {
  const auto colon = bind.rfind(':');
  std::string_view port = bind;
  if (colon != std::string_view::npos) {
    if (colon > 0) config.host = std::string(bind.substr(0, colon));
    port = bind.substr(colon + 1);
  }
  if (port.empty() || port.size() > 5 || port.find_first_not_of("0123456789") != std::string_view::npos)
    throw UsageError("invalid bind address '" + std::string(bind) + "'");
  config.port = std::stoi(std::string(port));
  config.validate();
}

void apply_env_defaults(ServiceConfig& config, bool bind_given, bool manifest_given) {
  if (!bind_given)
    if (const char* v = std::getenv("PREDELETE_BIND"); v && *v) parse_bind(v, config);
  if (!manifest_given)
    if (const char* v = std::getenv("PREDELETE_MANIFEST"); v && *v) config.manifest = v;
}

CheckService::CheckService(ServiceConfig config) : config_(std::move(config)) {
  config_.validate();
  if (sodium_init() < 0) throw Error(ErrorKind::Internal, "libsodium failed to initialize");
  // Per-process key: hashes in the log are comparable within one run only.
  log_key_.resize(crypto_generichash_KEYBYTES);
  randombytes_buf(log_key_.data(), log_key_.size());
}

CheckService::~CheckService() { stop(); }

void CheckService::reload() {
  if (config_.manifest.empty()) throw UsageError("no cascade manifest configured");
  install(std::make_shared<const CascadeBundle>(load_cascade(config_.manifest)));
}

void CheckService::install(std::shared_ptr<const CascadeBundle> cascade) {
  std::lock_guard lock(cascade_mutex_);
  cascade_ = std::move(cascade);
}

std::shared_ptr<const CascadeBundle> CheckService::cascade() const {
  std::lock_guard lock(cascade_mutex_);
  return cascade_;
}

ServiceResponse CheckService::handle_check(std::string_view body) {
  const auto cascade = this->cascade();
  if (!cascade) return {503, error_body("MODEL_NOT_LOADED", "no cascade is loaded")};
  if (body.size() > config_.max_body_bytes)
    return {413, error_body("PAYLOAD_TOO_LARGE", "request body exceeds " + std::to_string(config_.max_body_bytes) +
                                                     " bytes")};
  nlohmann::json request;
  try {
    request = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    return {400, error_body("MALFORMED_JSON", "request body is not valid JSON")};
  }
  if (!request.is_object() || !request.contains("text") || !request["text"].is_string())
    return {400, error_body("MISSING_TEXT", "request must be an object with a string field 'text'")};
  const auto& text = request["text"].get_ref<const std::string&>();
  if (is_blank(text)) return {400, error_body("EMPTY_TEXT", "text is empty")};

  const auto result = check(text, *cascade);
  log_request(text, result);
  auto j = to_json(result);
  j["model_fingerprint"] = cascade->fingerprint();
  return {200, std::move(j)};
}

ServiceResponse CheckService::handle_health() const {
  const auto cascade = this->cascade();
  if (!cascade) return {503, {{"status", "unavailable"}, {"bundles", nullptr}}};
  nlohmann::ordered_json j;
  j["status"] = "ok";
  j["model_fingerprint"] = cascade->fingerprint();
  j["bundles"] = {{"deletion", cascade->deletion().fingerprint},
                  {"disinfo", cascade->disinfo().fingerprint},
                  {"reason", cascade->reason().fingerprint}};
  return {200, std::move(j)};
}

ServiceResponse CheckService::handle_model() const {
  const auto cascade = this->cascade();
  if (!cascade) return {503, error_body("MODEL_NOT_LOADED", "no cascade is loaded")};
  nlohmann::ordered_json j;
  j["model_fingerprint"] = cascade->fingerprint();
  j["thresholds"] = {{"deletion", cascade->thresholds().deletion}, {"disinfo", cascade->thresholds().disinfo}};
  j["deletion"] = stage_json(cascade->deletion());
  j["disinfo"] = stage_json(cascade->disinfo());
  j["reason"] = stage_json(cascade->reason());
  return {200, std::move(j)};
}

void CheckService::log_request(std::string_view text, const CheckResult& result) {
  if (config_.request_log.empty()) return;
  unsigned char digest[crypto_generichash_BYTES];
  crypto_generichash(digest, sizeof digest, reinterpret_cast<const unsigned char*>(text.data()), text.size(),
                     log_key_.data(), log_key_.size());
  char hex[sizeof digest * 2 + 1];
  sodium_bin2hex(hex, sizeof hex, digest, sizeof digest);

  nlohmann::ordered_json line;
  line["time"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::system_clock::now().time_since_epoch())
                     .count();
  line["text_hash"] = hex;
  line["deletion"] = result.deletion.label;
  line["disinfo"] = result.disinfo.label;
  line["reason"] = result.reason ? nlohmann::ordered_json(result.reason->label) : nlohmann::ordered_json(nullptr);
  std::lock_guard lock(log_mutex_);
  std::ofstream out(config_.request_log, std::ios::app | std::ios::binary);
  out << line.dump() << '\n';
}

int CheckService::bind() {
  server_ = std::make_unique<httplib::Server>();
  auto& srv = *server_;
  srv.set_payload_max_length(config_.max_body_bytes);

  const auto origins = config_.cors_origins;
  auto cors = [origins](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_header("Origin")) return;
    const auto origin = req.get_header_value("Origin");
    for (const auto& o : origins) {
      if (o == "*" || o == origin) {
        res.set_header("Access-Control-Allow-Origin", o == "*" ? "*" : origin);
        res.set_header("Vary", "Origin");
        return;
      }
    }
  };
  auto reply = [cors](const httplib::Request& req, httplib::Response& res, const ServiceResponse& r) {
    cors(req, res);
    res.status = r.status;
    res.set_content(json_text(r.body), "application/json");
  };

  srv.Post("/v1/check", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(req, res, handle_check(req.body));
  });
  srv.Get("/v1/health", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(req, res, handle_health());
  });
  srv.Get("/v1/model", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(req, res, handle_model());
  });
  srv.Options(R"(/v1/.*)", [cors](const httplib::Request& req, httplib::Response& res) {
    cors(req, res);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Max-Age", "600");
    res.status = 204;
  });
  srv.set_error_handler([cors, limit = config_.max_body_bytes](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    cors(req, res);
    nlohmann::ordered_json body;
    if (res.status == 413)
      body = error_body("PAYLOAD_TOO_LARGE", "request body exceeds " + std::to_string(limit) + " bytes");
    else if (res.status == 404)
      body = error_body("NOT_FOUND", "no such endpoint");
    else
      body = error_body("HTTP_" + std::to_string(res.status), "request failed");
    res.set_content(json_text(body), "application/json");
  });
  srv.set_exception_handler([cors](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    cors(req, res);
    res.status = 500;
    res.set_content(json_text(error_body("INTERNAL", message)), "application/json");
  });

  int port = config_.port;
  if (port == 0) {
    port = srv.bind_to_any_port(config_.host);
    if (port < 0) throw Error(ErrorKind::Internal, "cannot bind " + config_.host);
  } else if (!srv.bind_to_port(config_.host, port)) {
    throw Error(ErrorKind::Internal, "cannot bind " + config_.host + ":" + std::to_string(port));
  }
  return port;
}

void CheckService::serve() {
  if (!server_) throw Error(ErrorKind::Internal, "serve() called before bind()");
  server_->listen_after_bind();
}

void CheckService::stop() {
  if (server_) server_->stop();
}

}  // namespace predelete
