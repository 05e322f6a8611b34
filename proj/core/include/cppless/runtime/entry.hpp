#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cppless/tasks/registry.hpp"

namespace cppless::runtime {

// Outcome of handling one event: the encoded response envelope plus which
// runtime endpoint (response vs error) it belongs on.
struct HandledEvent {
  bool ok = false;  // true → POST .../response, false → POST .../error
  std::vector<std::uint8_t> envelope;
};

// Unwraps the carrier, validates the request envelope, runs the task body,
// and encodes the outcome. Never throws: any failure — malformed carrier,
// wrong magic (checked before the body runs), capture decode error, or a
// throwing body — becomes a kind=2 envelope whose body is the encoded
// message string. Deterministic for a pure body: same payload, same bytes.
HandledEvent handle_invocation(const tasks::RegisteredEntry& entry, std::string_view carrier_text);

// Worker-side event loop. Resolves entry_name in the registry, then polls
// GET {runtime_endpoint}/runtime/invocation/next and answers every event
// with exactly one POST to .../response or .../error, reporting this
// instance's cold status (first event only) in the X-Cpls-Cold header.
//
// Returns a process exit code: 0 when the platform retires the instance
// (410 on the poll), nonzero for an unknown entry name or an endpoint that
// stays unreachable past a bounded number of consecutive retries.
int run_entry_loop(const tasks::EntryRegistry& registry, const std::string& runtime_endpoint,
                   const std::string& entry_name);

// Reads CPLS_ENTRY and CPLS_RUNTIME_API and runs the loop; missing or
// unknown values exit nonzero with a diagnostic on stderr.
int run_entry_loop_from_env(const tasks::EntryRegistry& registry);

}  // namespace cppless::runtime
