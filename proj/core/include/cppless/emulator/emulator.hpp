#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cppless/emulator/delay.hpp"
#include "cppless/tasks/config.hpp"

namespace cppless::emulator {

struct PlatformConfig {
  std::size_t max_concurrency = 2000;
  double cold_init_ms = 11.0;
  double gb_second_rate = 1.6667e-5;  // $/GB·s
  double request_fee = 2.0e-7;        // $ per invocation
  std::uint64_t delay_seed = 0;       // seeds uniform delay schedules
  std::size_t max_payload_bytes = 6 * 1024 * 1024;
  std::map<std::string, DelaySchedule> exec_delays;  // function name or "*"
};

struct BillingSample {
  std::string cloud_name;
  std::string request_id;
  double duration_ms = 0.0;
  double init_ms = 0.0;
  double billed_ms = 0.0;  // ceil(duration + init·cold) to whole ms
  int memory_mb = 0;
  bool cold = false;
  double cost_usd = 0.0;         // compute + request fee
  double request_fee_usd = 0.0;  // the fee portion, for cost splits
};

struct BillingTotals {
  double total_usd = 0.0;
  double compute_usd = 0.0;
  double fees_usd = 0.0;
  std::size_t samples = 0;
};

struct InvokeResult {
  int status = 0;  // 200 | 404 | 413 | 429 | 500
  std::string request_id;
  bool cold = false;
  double duration_ms = 0.0;
  double init_ms = 0.0;
  std::string body;  // response carrier on 200, diagnostic text otherwise
};

struct FunctionInfo {
  std::string name;
  std::string entry_name;
  std::string package_path;
  FunctionConfig config;
  std::size_t warm_instances = 0;
  std::uint64_t instances_spawned = 0;
};

struct PlatformStats {
  std::size_t in_flight = 0;
  std::size_t peak_in_flight = 0;
  std::uint64_t throttled = 0;
  std::uint64_t spawned_instances = 0;
  std::uint64_t completed = 0;
};

// (memory/1024 GB) · (billed/1000 s) · rate + fee. Pure.
double compute_cost(double memory_mb, double billed_ms, double gb_second_rate,
                    double request_fee);

enum class UpsertOutcome { created, updated, unchanged };

// Local FaaS control and data plane. Functions map to worker binaries;
// invocations acquire a warm instance or spawn a fresh one (billed with
// cold_init_ms), run under a global concurrency cap with immediate-reject
// throttling, and append deterministic billing samples.
//
// Each instance is a spawned worker process holding a dedicated loopback
// runtime endpoint (CPLS_RUNTIME_API) and serving one invocation at a time.
// Warm instances live until their function is updated or removed, or the
// emulator shuts down.
class Emulator {
 public:
  // Throws ConfigError on negative rates or max_concurrency == 0.
  explicit Emulator(PlatformConfig config = {});
  ~Emulator();
  Emulator(const Emulator&) = delete;
  Emulator& operator=(const Emulator&) = delete;

  // Idempotent upsert. A config/package/entry change drains the warm pool so
  // the next invocation starts cold. Throws PlatformError(400) when the
  // package is missing or not executable, ConfigError on invalid config.
  UpsertOutcome create_function(const std::string& name, const FunctionConfig& config,
                                const std::string& package_path, const std::string& entry_name);

  // false when the name is unknown.
  bool remove_function(const std::string& name);

  std::vector<FunctionInfo> list_functions() const;

  // The data plane. carrier_body is passed to the worker untouched.
  InvokeResult invoke(const std::string& name, const std::string& carrier_body);

  std::vector<BillingSample> billing() const;  // completion order
  BillingTotals billing_totals() const;
  PlatformStats stats() const;

  const PlatformConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cppless::emulator
