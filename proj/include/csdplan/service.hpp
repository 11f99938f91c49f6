#pragma once

// JSON-over-HTTP API. ApiHandler is a pure function of (method, path, body) and
// the calibration snapshot, so it is tested without sockets; Server binds it
// to cpp-httplib.

#include <algorithm>
#include <iterator>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>

#include <httplib.h>

#include "csdplan/planner.hpp"

namespace csdplan {

inline constexpr std::size_t kMaxSweepCells = 250'000;

// Holds the loaded calibration. Readers take a shared_ptr snapshot, so a reload
// never changes the data a request already started with.
class Session {
 public:
  explicit Session(CalibrationSet cal, std::string source_path = "")
      : cal_(std::make_shared<const CalibrationSet>(std::move(cal))), path_(std::move(source_path)) {}

  std::shared_ptr<const CalibrationSet> snapshot() const {
    std::lock_guard lock(mu_);
    return cal_;
  }

  std::string source_path() const {
    std::lock_guard lock(mu_);
    return path_;
  }

  void replace(CalibrationSet cal, std::string source_path) {
    auto next = std::make_shared<const CalibrationSet>(std::move(cal));
    std::lock_guard lock(mu_);
    cal_ = std::move(next);
    path_ = std::move(source_path);
  }

  // Loads and validates before swapping; on failure the current set stays.
  void reload(const std::string& path) { replace(load_calibration_file(path), path); }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const CalibrationSet> cal_;
  std::string path_;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class ApiHandler {
 public:
  explicit ApiHandler(Session& session) : session_(session) {}

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body) const {
    try {
      return route(method, path, body);
    } catch (const ValidationError& e) {
      return error(422, e.what(), json{{"issues", e.issues()}});
    } catch (const ParseError& e) {
      return error(400, e.what(), json{{"field", e.locus()}});
    } catch (const LookupError& e) {
      return error(404, e.what());
    } catch (const DomainError& e) {
      return error(422, e.what());
    } catch (const TooLargeError& e) {
      return error(413, e.what());
    } catch (const std::exception& e) {
      return error(500, e.what());
    }
  }

 private:
  static ApiResponse ok(const json& j) { return {200, j.dump(), "application/json"}; }

  static ApiResponse error(int status, const std::string& message, json extra = json::object()) {
    extra["error"] = message;
    return {status, extra.dump(), "application/json"};
  }

  ApiResponse route(std::string_view method, std::string_view path, std::string_view body) const {
    const bool get = method == "GET";
    const bool post = method == "POST";
    if (path == "/" || path == "/index.html") {
      if (!get) return error(405, "method not allowed");
      return {200, stub_page(), "text/html; charset=utf-8"};
    }
    if (path == "/api/v1/calibration") {
      if (!get) return error(405, "method not allowed");
      return ok(calibration_summary(*session_.snapshot()));
    }
    if (path == "/api/v1/calibration/reload") {
      if (!post) return error(405, "method not allowed");
      return reload(body);
    }
    if (path.rfind("/api/v1/", 0) != 0) return error(404, "no route for " + std::string(path));
    const std::string_view route_name = path.substr(8);
    static constexpr std::string_view kPostRoutes[] = {"solve", "curves", "sweep", "iso", "diff", "tco"};
    if (std::find(std::begin(kPostRoutes), std::end(kPostRoutes), route_name) == std::end(kPostRoutes))
      return error(404, "no route for " + std::string(path));
    if (!post) return error(405, "method not allowed");

    const auto cal = session_.snapshot();
    if (route_name == "solve") {
      const SolveOutcome o = solve_scenario(*cal, parse_solve_request(parse_body(body)));
      if (!o.consistent) return error(500, "closed form and oracle disagree", to_json(o));
      return ok(to_json(o));
    }
    if (route_name == "curves") return ok(to_json(run_curves(*cal, parse_curves_request(parse_body(body)))));
    if (route_name == "sweep")
      return ok(to_json(run_sweep(*cal, parse_sweep_request(parse_body(body)), kMaxSweepCells)));
    if (route_name == "iso") {
      const IsoRequest req = parse_iso_request(parse_body(body));
      const BepSurface s = run_sweep(*cal, req.sweep, kMaxSweepCells);
      return ok(contour_to_json(s, req.c, iso_bep_contour(s, req.c)));
    }
    if (route_name == "diff") return ok(to_json(run_diff(*cal, parse_diff_request(parse_body(body)))));
    return ok(to_json(run_tco(parse_tco_request(parse_body(body)))));
  }

  static json parse_body(std::string_view body) {
    if (body.empty()) throw ParseError("<body>", "empty request body");
    return json_detail::parse_text(body);
  }

  // Body is empty (re-read the current file) or {"path": "..."}.
  ApiResponse reload(std::string_view body) const {
    std::string path = session_.source_path();
    if (!body.empty()) {
      const json j = json_detail::parse_text(body);
      json_detail::ObjectReader r(j, "");
      if (auto p = r.optional_string("path")) path = *p;
      r.done();
    }
    if (path.empty()) throw ParseError("path", "no calibration path to reload from");
    session_.reload(path);
    return ok({{"reloaded", path}, {"workloads", session_.snapshot()->workloads.size()}});
  }

  // Served when no static root is mounted; a mounted root takes precedence for GET /.
  static std::string stub_page() {
    return "<!doctype html><html><head><meta charset=\"utf-8\"><title>csdplan</title></head>"
           "<body><h1>csdplan</h1><p>No UI bundle is installed. The API is served under "
           "<code>/api/v1</code>.</p></body></html>\n";
  }

  Session& session_;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string static_root;
};

class Server {
 public:
  Server(Session& session, ServerConfig config) : config_(std::move(config)), handler_(session) {
    if (!config_.static_root.empty() && !svr_.set_mount_point("/", config_.static_root))
      throw LookupError("static root '" + config_.static_root + "' is not a directory");
    const auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
      const ApiResponse r = handler_.handle(req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    svr_.Get(".*", dispatch);
    svr_.Post(".*", dispatch);
  }

  // Returns the bound port.
  int bind() {
    if (config_.port == 0) {
      port_ = svr_.bind_to_any_port(config_.host);
    } else {
      port_ = svr_.bind_to_port(config_.host, config_.port) ? config_.port : -1;
    }
    if (port_ < 0) throw std::runtime_error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
    return port_;
  }

  bool listen() { return svr_.listen_after_bind(); }
  void stop() { svr_.stop(); }
  void wait_until_ready() const { svr_.wait_until_ready(); }
  int port() const { return port_; }

 private:
  ServerConfig config_;
  ApiHandler handler_;
  httplib::Server svr_;
  int port_ = -1;
};

}  // namespace csdplan
