#include "cppless/emulator/emulator.hpp"

#include <httplib.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <csignal>
#include <cstring>
#include <functional>
#include <mutex>
#include <random>
#include <thread>

#include "cppless/error.hpp"

extern char** environ;

namespace cppless::emulator {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// ---------------------------------------------------------------------------
// The runtime endpoint one instance polls: a single-slot mailbox behind the
// custom-runtime HTTP shape. One worker process means strictly sequential
// requests, so a single handler thread suffices.

class InstanceEndpoint {
 public:
  enum class RunState { delivered, crashed, timed_out };
  struct RunOutcome {
    RunState state = RunState::timed_out;
    bool error_path = false;  // worker chose .../error
    std::string body;
  };

  InstanceEndpoint() {
    svr_.new_task_queue = [] { return new httplib::ThreadPool(1); };
    svr_.set_tcp_nodelay(true);  // event handoff latency dominates warm invokes
    svr_.Get("/runtime/invocation/next",
             [this](const httplib::Request&, httplib::Response& res) {
               std::unique_lock<std::mutex> lock(mu_);
               cv_.wait_for(lock, kPollWindow, [&] { return draining_ || has_event_; });
               if (has_event_) {
                 has_event_ = false;
                 res.set_header("X-Cpls-Request-Id", request_id_);
                 res.set_content(carrier_, "application/json");
                 return;
               }
               res.status = draining_ ? 410 : 204;
             });
    svr_.Post(R"(/runtime/invocation/([^/]+)/(response|error))",
              [this](const httplib::Request& req, httplib::Response& res) {
                {
                  std::lock_guard<std::mutex> lock(mu_);
                  if (req.matches[1] == request_id_ && !outcome_ready_) {
                    outcome_body_ = req.body;
                    outcome_error_path_ = (req.matches[2] == "error");
                    outcome_ready_ = true;
                  }
                }
                cv_.notify_all();
                res.status = 202;
              });
    port_ = svr_.bind_to_any_port("127.0.0.1");
    runner_ = std::thread([this] { svr_.listen_after_bind(); });
    svr_.wait_until_ready();
  }

  ~InstanceEndpoint() {
    drain();
    svr_.stop();
    if (runner_.joinable()) runner_.join();
  }

  int port() const { return port_; }

  // Deposits one event and blocks for its outcome; instance_dead breaks the
  // wait early when the worker process is gone.
  RunOutcome run_event(const std::string& request_id, const std::string& carrier,
                       std::chrono::milliseconds timeout,
                       const std::function<bool()>& instance_dead) {
    std::unique_lock<std::mutex> lock(mu_);
    request_id_ = request_id;
    carrier_ = carrier;
    has_event_ = true;
    outcome_ready_ = false;
    cv_.notify_all();

    const auto deadline = Clock::now() + timeout;
    while (!outcome_ready_) {
      cv_.wait_for(lock, std::chrono::milliseconds(50), [&] { return outcome_ready_; });
      if (outcome_ready_) break;
      if (instance_dead && instance_dead()) {
        has_event_ = false;
        return {RunState::crashed, false, {}};
      }
      if (Clock::now() >= deadline) {
        has_event_ = false;
        return {RunState::timed_out, false, {}};
      }
    }
    return {RunState::delivered, outcome_error_path_, std::move(outcome_body_)};
  }

  // The next poll answers 410 and the worker retires itself.
  void drain() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      draining_ = true;
    }
    cv_.notify_all();
  }

 private:
  static constexpr std::chrono::seconds kPollWindow{55};

  httplib::Server svr_;
  int port_ = 0;
  std::thread runner_;

  std::mutex mu_;
  std::condition_variable cv_;
  bool has_event_ = false;
  bool draining_ = false;
  std::string request_id_;
  std::string carrier_;
  bool outcome_ready_ = false;
  bool outcome_error_path_ = false;
  std::string outcome_body_;
};

// ---------------------------------------------------------------------------
// One worker process plus its runtime endpoint.

class Instance {
 public:
  Instance(const std::string& package_path, const std::string& entry_name,
           std::uint64_t generation)
      : generation_(generation) {
    std::vector<std::string> env_store;
    for (char** e = environ; *e != nullptr; ++e) {
      std::string_view entry(*e);
      if (entry.rfind("CPLS_ENTRY=", 0) == 0 || entry.rfind("CPLS_RUNTIME_API=", 0) == 0) {
        continue;
      }
      env_store.emplace_back(entry);
    }
    env_store.push_back("CPLS_ENTRY=" + entry_name);
    env_store.push_back("CPLS_RUNTIME_API=127.0.0.1:" + std::to_string(endpoint_.port()));

    std::vector<char*> envp;
    envp.reserve(env_store.size() + 1);
    for (auto& s : env_store) envp.push_back(s.data());
    envp.push_back(nullptr);
    std::vector<char*> argv{const_cast<char*>(package_path.c_str()), nullptr};

    int rc = ::posix_spawn(&pid_, package_path.c_str(), nullptr, nullptr, argv.data(),
                           envp.data());
    if (rc != 0) {
      throw PlatformError("could not spawn instance from " + package_path + ": " +
                              std::strerror(rc),
                          500);
    }
  }

  ~Instance() {
    endpoint_.drain();
    for (int i = 0; i < 400 && !exited(); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (!reaped_) {
      ::kill(pid_, SIGKILL);
      int status = 0;
      ::waitpid(pid_, &status, 0);
      reaped_ = true;
    }
  }

  InstanceEndpoint::RunOutcome run(const std::string& request_id, const std::string& carrier,
                                   std::chrono::milliseconds timeout) {
    return endpoint_.run_event(request_id, carrier, timeout, [this] { return exited(); });
  }

  std::uint64_t generation() const { return generation_; }

 private:
  bool exited() {
    if (reaped_) return true;
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == pid_) {
      reaped_ = true;
      return true;
    }
    return false;
  }

  InstanceEndpoint endpoint_;
  pid_t pid_ = -1;
  bool reaped_ = false;
  std::uint64_t generation_ = 0;
};

struct FunctionState {
  std::string name;
  std::string entry_name;
  std::string package_path;
  FunctionConfig config;
  std::optional<DelaySchedule> delay;
  std::vector<std::unique_ptr<Instance>> idle;
  std::size_t in_flight = 0;
  std::uint64_t arrival_index = 0;
  std::uint64_t generation = 0;
  std::uint64_t spawned = 0;
};

}  // namespace

double compute_cost(double memory_mb, double billed_ms, double gb_second_rate,
                    double request_fee) {
  return (memory_mb / 1024.0) * (billed_ms / 1000.0) * gb_second_rate + request_fee;
}

struct Emulator::Impl {
  PlatformConfig cfg;

  mutable std::mutex mu;
  std::map<std::string, FunctionState> functions;
  std::vector<BillingSample> billing;
  std::size_t in_flight = 0;
  std::size_t peak_in_flight = 0;
  std::uint64_t throttled = 0;
  std::uint64_t spawned = 0;
  std::uint64_t completed = 0;
  std::mt19937_64 delay_rng;
  std::mt19937_64 rid_rng;

  explicit Impl(PlatformConfig c)
      : cfg(std::move(c)), delay_rng(cfg.delay_seed), rid_rng(std::random_device{}()) {}

  std::optional<DelaySchedule> delay_for(const std::string& name) const {
    auto it = cfg.exec_delays.find(name);
    if (it != cfg.exec_delays.end()) return it->second;
    it = cfg.exec_delays.find("*");
    if (it != cfg.exec_delays.end()) return it->second;
    return std::nullopt;
  }

  // uuid-shaped, uniqueness only
  std::string fresh_request_id_locked() {
    auto hex = [this](int digits) {
      static const char* k = "0123456789abcdef";
      std::string s;
      for (int i = 0; i < digits; ++i) s += k[rid_rng() & 0xF];
      return s;
    };
    return hex(8) + "-" + hex(4) + "-4" + hex(3) + "-" + hex(4) + "-" + hex(12);
  }
};

Emulator::Emulator(PlatformConfig config) {
  if (config.max_concurrency == 0) {
    throw ConfigError("max_concurrency must be at least 1");
  }
  if (config.gb_second_rate < 0.0 || config.request_fee < 0.0 || config.cold_init_ms < 0.0) {
    throw ConfigError("billing rates and cold_init_ms must be non-negative");
  }
  impl_ = std::make_unique<Impl>(std::move(config));
}

Emulator::~Emulator() {
  // take the pools out from under the lock, then let the instances retire
  std::vector<std::unique_ptr<Instance>> drained;
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    for (auto& [name, fn] : impl_->functions) {
      for (auto& inst : fn.idle) drained.push_back(std::move(inst));
      fn.idle.clear();
    }
  }
  drained.clear();
}

UpsertOutcome Emulator::create_function(const std::string& name, const FunctionConfig& config,
                                        const std::string& package_path,
                                        const std::string& entry_name) {
  validate(config);
  if (name.empty()) throw PlatformError("function name must be non-empty", 400);
  if (entry_name.empty()) throw PlatformError("entry name must be non-empty", 400);
  if (::access(package_path.c_str(), X_OK) != 0) {
    throw PlatformError("package " + package_path + " is missing or not executable", 400);
  }

  std::vector<std::unique_ptr<Instance>> drained;
  UpsertOutcome outcome;
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    auto it = impl_->functions.find(name);
    if (it == impl_->functions.end()) {
      FunctionState fn;
      fn.name = name;
      fn.entry_name = entry_name;
      fn.package_path = package_path;
      fn.config = config;
      fn.delay = impl_->delay_for(name);
      impl_->functions.emplace(name, std::move(fn));
      outcome = UpsertOutcome::created;
    } else {
      FunctionState& fn = it->second;
      if (fn.config == config && fn.package_path == package_path &&
          fn.entry_name == entry_name) {
        outcome = UpsertOutcome::unchanged;
      } else {
        fn.config = config;
        fn.package_path = package_path;
        fn.entry_name = entry_name;
        ++fn.generation;
        drained.swap(fn.idle);  // config change retires the warm pool
        outcome = UpsertOutcome::updated;
      }
    }
  }
  return outcome;
}

bool Emulator::remove_function(const std::string& name) {
  std::vector<std::unique_ptr<Instance>> drained;
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    auto it = impl_->functions.find(name);
    if (it == impl_->functions.end()) return false;
    drained.swap(it->second.idle);
    impl_->functions.erase(it);
  }
  return true;
}

std::vector<FunctionInfo> Emulator::list_functions() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  std::vector<FunctionInfo> out;
  out.reserve(impl_->functions.size());
  for (const auto& [name, fn] : impl_->functions) {
    FunctionInfo info;
    info.name = name;
    info.entry_name = fn.entry_name;
    info.package_path = fn.package_path;
    info.config = fn.config;
    info.warm_instances = fn.idle.size();
    info.instances_spawned = fn.spawned;
    out.push_back(std::move(info));
  }
  return out;
}

InvokeResult Emulator::invoke(const std::string& name, const std::string& carrier_body) {
  Impl& im = *impl_;
  InvokeResult result;
  std::unique_ptr<Instance> inst;
  bool cold = false;
  double injected = -1.0;
  std::string package_path, entry_name;
  FunctionConfig fn_config;
  std::uint64_t generation = 0;

  {
    std::lock_guard<std::mutex> lock(im.mu);
    result.request_id = im.fresh_request_id_locked();
    auto it = im.functions.find(name);
    if (it == im.functions.end()) {
      result.status = 404;
      result.body = "unknown function: " + name;
      return result;
    }
    if (carrier_body.size() > im.cfg.max_payload_bytes) {
      result.status = 413;
      result.body = "payload of " + std::to_string(carrier_body.size()) +
                    " bytes exceeds the limit of " + std::to_string(im.cfg.max_payload_bytes);
      return result;
    }
    if (im.in_flight >= im.cfg.max_concurrency) {
      ++im.throttled;
      result.status = 429;
      result.body = "concurrency limit reached";
      return result;
    }
    ++im.in_flight;
    im.peak_in_flight = std::max(im.peak_in_flight, im.in_flight);

    FunctionState& fn = it->second;
    ++fn.in_flight;
    if (fn.delay) injected = fn.delay->next(fn.arrival_index, im.delay_rng);
    ++fn.arrival_index;
    if (!fn.idle.empty()) {
      inst = std::move(fn.idle.back());
      fn.idle.pop_back();
    }
    package_path = fn.package_path;
    entry_name = fn.entry_name;
    fn_config = fn.config;
    generation = fn.generation;
  }

  auto settle = [&](bool pool_instance) {
    std::lock_guard<std::mutex> lock(im.mu);
    --im.in_flight;
    auto it = im.functions.find(name);
    if (it != im.functions.end()) {
      --it->second.in_flight;
      if (pool_instance && inst && inst->generation() == it->second.generation) {
        it->second.idle.push_back(std::move(inst));
      }
    }
  };

  if (!inst) {
    try {
      inst = std::make_unique<Instance>(package_path, entry_name, generation);
    } catch (const std::exception& e) {
      settle(false);
      result.status = 500;
      result.body = e.what();
      return result;
    }
    cold = true;
    std::lock_guard<std::mutex> lock(im.mu);
    ++im.spawned;
    auto it = im.functions.find(name);
    if (it != im.functions.end()) ++it->second.spawned;
  }

  if (injected >= 0.0) {
    std::this_thread::sleep_for(
        std::chrono::duration<double, std::milli>(injected));
  }

  const auto timeout =
      std::chrono::milliseconds(static_cast<std::int64_t>(fn_config.timeout_s) * 1000 + 1000);
  const auto started = Clock::now();
  auto outcome = inst->run(result.request_id, carrier_body, timeout);
  const double measured = elapsed_ms(started);

  result.cold = cold;
  result.duration_ms = injected >= 0.0 ? injected : measured;
  result.init_ms = cold ? im.cfg.cold_init_ms : 0.0;

  if (outcome.state != InstanceEndpoint::RunState::delivered) {
    settle(false);  // a failed instance never returns to the pool
    result.status = 500;
    result.body = outcome.state == InstanceEndpoint::RunState::crashed
                      ? "instance exited before responding"
                      : "function timed out after " + std::to_string(fn_config.timeout_s) + " s";
    return result;
  }

  result.status = 200;
  result.body = std::move(outcome.body);

  const double billed = std::ceil(result.duration_ms + result.init_ms);
  BillingSample sample;
  sample.cloud_name = name;
  sample.request_id = result.request_id;
  sample.duration_ms = result.duration_ms;
  sample.init_ms = result.init_ms;
  sample.billed_ms = billed;
  sample.memory_mb = fn_config.memory_mb;
  sample.cold = cold;
  sample.request_fee_usd = im.cfg.request_fee;
  sample.cost_usd = compute_cost(static_cast<double>(fn_config.memory_mb), billed,
                                 im.cfg.gb_second_rate, im.cfg.request_fee);

  {
    std::lock_guard<std::mutex> lock(im.mu);
    im.billing.push_back(std::move(sample));
    ++im.completed;
  }
  settle(true);
  return result;
}

std::vector<BillingSample> Emulator::billing() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->billing;
}

BillingTotals Emulator::billing_totals() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  BillingTotals totals;
  for (const auto& s : impl_->billing) {
    totals.total_usd += s.cost_usd;
    totals.compute_usd += s.cost_usd - s.request_fee_usd;
    totals.fees_usd += s.request_fee_usd;
  }
  totals.samples = impl_->billing.size();
  return totals;
}

PlatformStats Emulator::stats() const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  PlatformStats s;
  s.in_flight = impl_->in_flight;
  s.peak_in_flight = impl_->peak_in_flight;
  s.throttled = impl_->throttled;
  s.spawned_instances = impl_->spawned;
  s.completed = impl_->completed;
  return s;
}

const PlatformConfig& Emulator::config() const { return impl_->cfg; }

}  // namespace cppless::emulator
