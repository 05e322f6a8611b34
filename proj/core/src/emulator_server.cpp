#include "cppless/emulator/server.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>
#include <thread>

#include "cppless/error.hpp"

namespace cppless::emulator {

namespace {

using nlohmann::json;

json to_json(const FunctionConfig& cfg) {
  return json{{"memory", cfg.memory_mb},
              {"timeout", cfg.timeout_s},
              {"ephemeral_storage", cfg.ephemeral_storage_mb}};
}

FunctionConfig config_from_json(const json& j) {
  FunctionConfig cfg;
  if (j.is_null()) return cfg;
  if (!j.is_object()) throw PlatformError("\"config\" must be an object", 400);
  for (const auto& [key, value] : j.items()) {
    if (key == "memory") {
      cfg.memory_mb = value.get<int>();
    } else if (key == "timeout") {
      cfg.timeout_s = value.get<int>();
    } else if (key == "ephemeral_storage") {
      cfg.ephemeral_storage_mb = value.get<int>();
    } else {
      throw PlatformError("unknown config key \"" + key + "\"", 400);
    }
  }
  return cfg;
}

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, status, json{{"error", message}});
}

std::string format_ms(double ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", ms);
  return buf;
}

}  // namespace

struct EmulatorServer::Impl {
  Emulator& emu;
  httplib::Server svr;
  std::thread runner;
  std::string host = "127.0.0.1";
  int bound_port = 0;

  explicit Impl(Emulator& e) : emu(e) {
    svr.new_task_queue = [] { return new httplib::ThreadPool(256); };
    // Dispatcher connections are long-lived and multiplex many invocations;
    // don't let the default per-connection request cap (5) sever them.
    svr.set_keep_alive_max_count(1 << 20);
    svr.set_tcp_nodelay(true);

    svr.Post("/functions", [this](const httplib::Request& req, httplib::Response& res) {
      std::string name, entry, package;
      FunctionConfig cfg;
      try {
        json body = json::parse(req.body);
        if (!body.is_object()) throw PlatformError("request body must be a JSON object", 400);
        for (const auto& [key, value] : body.items()) {
          if (key == "name") {
            name = value.get<std::string>();
          } else if (key == "entry") {
            entry = value.get<std::string>();
          } else if (key == "package") {
            package = value.get<std::string>();
          } else if (key == "config") {
            cfg = config_from_json(value);
          } else {
            throw PlatformError("unknown key \"" + key + "\"", 400);
          }
        }
        if (name.empty()) throw PlatformError("missing key \"name\"", 400);
        if (entry.empty()) throw PlatformError("missing key \"entry\"", 400);
        if (package.empty()) throw PlatformError("missing key \"package\"", 400);
      } catch (const PlatformError& e) {
        reply_error(res, e.status(), e.what());
        return;
      } catch (const std::exception& e) {
        reply_error(res, 400, std::string("malformed request: ") + e.what());
        return;
      }

      try {
        UpsertOutcome outcome = emu.create_function(name, cfg, package, entry);
        switch (outcome) {
          case UpsertOutcome::created:
            reply_json(res, 201, json{{"result", "created"}});
            break;
          case UpsertOutcome::updated:
            reply_json(res, 200, json{{"result", "updated"}});
            break;
          case UpsertOutcome::unchanged:
            reply_json(res, 200, json{{"result", "unchanged"}});
            break;
        }
      } catch (const PlatformError& e) {
        reply_error(res, e.status(), e.what());
      } catch (const std::exception& e) {
        reply_error(res, 400, e.what());
      }
    });

    svr.Get("/functions", [this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& info : emu.list_functions()) {
        out.push_back(json{{"name", info.name},
                           {"entry", info.entry_name},
                           {"package", info.package_path},
                           {"config", to_json(info.config)},
                           {"warm_instances", info.warm_instances},
                           {"instances_spawned", info.instances_spawned}});
      }
      reply_json(res, 200, out);
    });

    svr.Delete(R"(/functions/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 if (emu.remove_function(req.matches[1])) {
                   reply_json(res, 200, json{{"result", "deleted"}});
                 } else {
                   reply_error(res, 404, "unknown function: " + std::string(req.matches[1]));
                 }
               });

    svr.Post(R"(/2015-03-31/functions/([^/]+)/invocations)",
             [this](const httplib::Request& req, httplib::Response& res) {
               InvokeResult r = emu.invoke(req.matches[1], req.body);
               res.status = r.status;
               res.set_header("X-Cpls-Request-Id", r.request_id);
               if (r.status == 200) {
                 res.set_header("X-Cpls-Cold", r.cold ? "1" : "0");
                 res.set_header("X-Cpls-Duration-Ms", format_ms(r.duration_ms));
                 res.set_header("X-Cpls-Init-Ms", format_ms(r.init_ms));
                 res.set_content(r.body, "application/json");
               } else {
                 res.set_content(r.body, "text/plain");
               }
             });

    svr.Get("/billing", [this](const httplib::Request&, httplib::Response& res) {
      json out = json::array();
      for (const auto& s : emu.billing()) {
        out.push_back(json{{"cloud_name", s.cloud_name},
                           {"request_id", s.request_id},
                           {"duration_ms", s.duration_ms},
                           {"init_ms", s.init_ms},
                           {"billed_ms", s.billed_ms},
                           {"memory_mb", s.memory_mb},
                           {"cold", s.cold},
                           {"cost_usd", s.cost_usd},
                           {"request_fee_usd", s.request_fee_usd}});
      }
      reply_json(res, 200, out);
    });

    svr.Get("/stats", [this](const httplib::Request&, httplib::Response& res) {
      PlatformStats s = emu.stats();
      reply_json(res, 200,
                 json{{"in_flight", s.in_flight},
                      {"peak_in_flight", s.peak_in_flight},
                      {"throttled", s.throttled},
                      {"spawned_instances", s.spawned_instances},
                      {"completed", s.completed}});
    });
  }
};

EmulatorServer::EmulatorServer(Emulator& emulator) : impl_(std::make_unique<Impl>(emulator)) {}

EmulatorServer::~EmulatorServer() { stop(); }

int EmulatorServer::start(const std::string& host, int port) {
  Impl& im = *impl_;
  im.host = host;
  if (port == 0) {
    im.bound_port = im.svr.bind_to_any_port(host);
    if (im.bound_port <= 0) throw PlatformError("could not bind " + host, 500);
  } else {
    if (!im.svr.bind_to_port(host, port)) {
      throw PlatformError("could not bind " + host + ":" + std::to_string(port), 500);
    }
    im.bound_port = port;
  }
  im.runner = std::thread([&im] { im.svr.listen_after_bind(); });
  im.svr.wait_until_ready();
  return im.bound_port;
}

void EmulatorServer::stop() {
  Impl& im = *impl_;
  if (im.runner.joinable()) {
    im.svr.stop();
    im.runner.join();
  }
}

int EmulatorServer::port() const { return impl_->bound_port; }

std::string EmulatorServer::endpoint() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->bound_port);
}

}  // namespace cppless::emulator
