#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cppless/tasks/config.hpp"
#include "cppless/tasks/task.hpp"
#include "cppless/wire/envelope.hpp"

namespace cppless {

enum class ConnectionStrategy {
  pooled,      // pool_size persistent keep-alive connections (default)
  per_request  // fresh connection per invocation, for comparison runs
};

struct DispatcherConfig {
  std::string backend_endpoint;  // e.g. "http://127.0.0.1:9000"
  std::size_t pool_size = 16;
  std::size_t max_retries_throttle = 5;
  FunctionConfig default_function_config{};
  ConnectionStrategy strategy = ConnectionStrategy::pooled;
};

enum class InvocationStatus { pending, ok, remote_error, transport_error };

// "pending" | "ok" | "remote-error" | "transport-error"
std::string_view to_string(InvocationStatus status);

struct InvocationRecord {
  std::uint64_t local_id = 0;  // dense, 0-based, in dispatch order
  std::string request_id;      // backend-assigned
  bool cold = false;
  double duration_ms = 0.0;
  double init_ms = 0.0;
  InvocationStatus status = InvocationStatus::pending;
  std::string error;  // diagnostic when status is one of the error states
};

// The connection a given dispatch sequence number rides on: seq mod pool_size.
std::size_t select_connection(std::uint64_t sequence_number, std::size_t pool_size);

// Fork-join invocation multiplexer. Requests fan out over a fixed pool of
// connection workers in round-robin order; completions surface through
// wait/wait_any in completion order. Shareable: all members may be called
// concurrently. Result slots are written before their record is released to
// a waiter, which is the happens-before edge for reading them.
class Dispatcher {
 public:
  // Throws ConfigError on pool_size == 0 or an empty endpoint. Connections
  // open lazily; an unreachable backend surfaces on dispatch, not here.
  explicit Dispatcher(DispatcherConfig config);
  ~Dispatcher();
  Dispatcher(const Dispatcher&) = delete;
  Dispatcher& operator=(const Dispatcher&) = delete;

  // Submits a bound task asynchronously and returns its local_id at once.
  // The decoded return value lands in result_slot when the invocation
  // completes with status ok; the slot must outlive the wait that collects
  // this invocation.
  template <typename R>
  std::uint64_t dispatch(const BoundTask<R>& task, const FunctionConfig& cfg, R& result_slot) {
    auto decode = task.decode_result;
    R* slot = &result_slot;
    return dispatch_raw(
        task.cloud_name, cfg,
        wire::encode_envelope(wire::EnvelopeKind::request, task.capture_body),
        [decode, slot](std::span<const std::uint8_t> body) { *slot = decode(body); });
  }

  // Same, with the function config the task was defined with.
  template <typename R>
  std::uint64_t dispatch(const BoundTask<R>& task, R& result_slot) {
    return dispatch(task, task.config, result_slot);
  }

  // Type-erased core: submits a request envelope for cloud_name. On a kind=1
  // response, write_result receives the decoded envelope body; a throw from
  // it marks the record transport-error instead of propagating.
  std::uint64_t dispatch_raw(const std::string& cloud_name, const FunctionConfig& cfg,
                             std::vector<std::uint8_t> request_envelope,
                             std::function<void(std::span<const std::uint8_t>)> write_result);

  // Blocks until n further invocations are terminal and returns their records
  // in completion order. wait(0) returns empty immediately.
  std::vector<InvocationRecord> wait(std::size_t n);

  // Blocks for the single next completion. Throws UsageError when nothing is
  // outstanding.
  InvocationRecord wait_any();

  // Invocations dispatched but not yet collected by wait/wait_any.
  std::size_t outstanding() const;

  // Requests carried so far by each pool connection, indexed by slot;
  // size == pool_size. Counts at assignment time (select_connection).
  std::vector<std::uint64_t> connection_loads() const;

  const DispatcherConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cppless
