#include "cppless/runtime/entry.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "cppless/wire/binary.hpp"
#include "cppless/wire/envelope.hpp"

namespace cppless::runtime {

namespace {

constexpr int kMaxConsecutiveFailures = 5;
constexpr auto kRetryDelay = std::chrono::milliseconds(200);
// must exceed the platform's long-poll window (60 s) with margin
constexpr time_t kPollReadTimeoutS = 75;

std::string normalize_endpoint(std::string endpoint) {
  if (endpoint.find("://") == std::string::npos) endpoint = "http://" + endpoint;
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  return endpoint;
}

HandledEvent error_event(const std::string& message) {
  auto body = wire::encode(message);
  return HandledEvent{false, wire::encode_envelope(wire::EnvelopeKind::response_err, body)};
}

}  // namespace

HandledEvent handle_invocation(const tasks::RegisteredEntry& entry,
                               std::string_view carrier_text) {
  wire::Envelope request;
  try {
    auto envelope_bytes = wire::unwrap_base64_json(carrier_text);
    request = wire::decode_envelope(envelope_bytes);
    if (request.kind != wire::EnvelopeKind::request) {
      return error_event("expected a request envelope, got kind " +
                         std::to_string(static_cast<int>(request.kind)));
    }
  } catch (const std::exception& e) {
    return error_event(std::string("payload rejected before execution: ") + e.what());
  }

  try {
    auto result = entry.run_serialized(request.body);
    return HandledEvent{true, wire::encode_envelope(wire::EnvelopeKind::response_ok, result)};
  } catch (const std::exception& e) {
    return error_event(e.what());
  }
}

int run_entry_loop(const tasks::EntryRegistry& registry, const std::string& runtime_endpoint,
                   const std::string& entry_name) {
  const auto* entry = registry.find(entry_name);
  if (entry == nullptr) {
    std::cerr << "cppless worker: no task registered under entry \"" << entry_name
              << "\"; this binary provides:" << std::endl;
    for (const auto* e : registry.entries()) {
      std::cerr << "  " << e->id.cloud_name << "  (" << e->original_function_name << ")"
                << std::endl;
    }
    return 64;
  }

  httplib::Client cli(normalize_endpoint(runtime_endpoint));
  cli.set_keep_alive(true);
  cli.set_tcp_nodelay(true);  // poll/response hops are latency-critical
  cli.set_connection_timeout(5, 0);
  cli.set_read_timeout(kPollReadTimeoutS, 0);
  cli.set_write_timeout(kPollReadTimeoutS, 0);

  std::uint64_t handled_count = 0;
  int consecutive_failures = 0;

  for (;;) {
    auto res = cli.Get("/runtime/invocation/next");
    if (!res) {
      if (++consecutive_failures >= kMaxConsecutiveFailures) {
        std::cerr << "cppless worker: runtime endpoint unreachable ("
                  << httplib::to_string(res.error()) << "), giving up after "
                  << consecutive_failures << " attempts" << std::endl;
        return 1;
      }
      std::this_thread::sleep_for(kRetryDelay);
      continue;
    }
    if (res->status == 204) {  // no event inside the poll window
      consecutive_failures = 0;
      continue;
    }
    if (res->status == 410) {  // platform retired this instance
      return 0;
    }
    if (res->status != 200) {
      if (++consecutive_failures >= kMaxConsecutiveFailures) {
        std::cerr << "cppless worker: poll failed with HTTP " << res->status << " repeatedly"
                  << std::endl;
        return 1;
      }
      std::this_thread::sleep_for(kRetryDelay);
      continue;
    }
    consecutive_failures = 0;

    std::string request_id = res->get_header_value("X-Cpls-Request-Id");
    if (request_id.empty()) {
      std::cerr << "cppless worker: event without X-Cpls-Request-Id, dropping" << std::endl;
      continue;
    }

    const bool cold = handled_count == 0;
    HandledEvent handled = handle_invocation(*entry, res->body);

    const std::string path = "/runtime/invocation/" + request_id +
                             (handled.ok ? "/response" : "/error");
    const std::string body = wire::wrap_base64_json(handled.envelope);
    httplib::Headers headers{{"X-Cpls-Cold", cold ? "1" : "0"}};

    auto posted = cli.Post(path, headers, body, "application/json");
    for (int tries = 1; !posted && tries < kMaxConsecutiveFailures; ++tries) {
      std::this_thread::sleep_for(kRetryDelay);
      posted = cli.Post(path, headers, body, "application/json");
    }
    if (!posted) {
      std::cerr << "cppless worker: could not deliver result for " << request_id << std::endl;
      return 1;
    }
    ++handled_count;
  }
}

int run_entry_loop_from_env(const tasks::EntryRegistry& registry) {
  const char* entry = std::getenv("CPLS_ENTRY");
  const char* api = std::getenv("CPLS_RUNTIME_API");
  if (entry == nullptr || *entry == '\0') {
    std::cerr << "cppless worker: CPLS_ENTRY is not set" << std::endl;
    return 64;
  }
  if (api == nullptr || *api == '\0') {
    std::cerr << "cppless worker: CPLS_RUNTIME_API is not set" << std::endl;
    return 64;
  }
  return run_entry_loop(registry, api, entry);
}

}  // namespace cppless::runtime
