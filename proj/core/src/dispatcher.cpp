#include "cppless/dispatch/dispatcher.hpp"

#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <random>
#include <thread>

#include "cppless/error.hpp"
#include "cppless/wire/binary.hpp"

namespace cppless {

namespace {

constexpr double kThrottleBackoffBaseMs = 10.0;
constexpr int kConnectTimeoutS = 10;
constexpr int kTimeoutSlackS = 10;

std::string normalize_endpoint(std::string endpoint) {
  if (endpoint.find("://") == std::string::npos) endpoint = "http://" + endpoint;
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  return endpoint;
}

double parse_ms_header(const httplib::Result& res, const char* name) {
  std::string v = res->get_header_value(name);
  if (v.empty()) return 0.0;
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    return 0.0;
  }
}

std::string truncate_for_diagnostic(const std::string& body) {
  constexpr std::size_t kMax = 200;
  if (body.size() <= kMax) return body;
  return body.substr(0, kMax) + "...";
}

struct PendingItem {
  std::uint64_t local_id = 0;
  std::string cloud_name;
  FunctionConfig cfg;
  std::string carrier_body;
  std::function<void(std::span<const std::uint8_t>)> write_result;
};

struct WorkQueue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<PendingItem> items;
  bool stop = false;

  void push(PendingItem item) {
    {
      std::lock_guard<std::mutex> lock(mu);
      items.push_back(std::move(item));
    }
    cv.notify_one();
  }

  // false → shutdown requested and queue drained
  bool pop(PendingItem& out) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return stop || !items.empty(); });
    if (items.empty()) return false;
    out = std::move(items.front());
    items.pop_front();
    return true;
  }

  void shutdown() {
    {
      std::lock_guard<std::mutex> lock(mu);
      stop = true;
    }
    cv.notify_all();
  }
};

}  // namespace

std::string_view to_string(InvocationStatus status) {
  switch (status) {
    case InvocationStatus::pending: return "pending";
    case InvocationStatus::ok: return "ok";
    case InvocationStatus::remote_error: return "remote-error";
    case InvocationStatus::transport_error: return "transport-error";
  }
  return "pending";
}

std::size_t select_connection(std::uint64_t sequence_number, std::size_t pool_size) {
  return static_cast<std::size_t>(sequence_number % pool_size);
}

struct Dispatcher::Impl {
  DispatcherConfig cfg;

  std::mutex state_mu;
  std::condition_variable completion_cv;
  std::deque<InvocationRecord> completed;
  std::uint64_t next_local_id = 0;
  std::size_t outstanding = 0;  // dispatched, not yet collected by a waiter
  std::vector<std::uint64_t> loads;  // requests carried per connection slot

  std::vector<std::unique_ptr<WorkQueue>> queues;
  std::vector<std::thread> workers;

  explicit Impl(DispatcherConfig c) : cfg(std::move(c)), loads(cfg.pool_size, 0) {
    queues.reserve(cfg.pool_size);
    workers.reserve(cfg.pool_size);
    for (std::size_t i = 0; i < cfg.pool_size; ++i) {
      queues.push_back(std::make_unique<WorkQueue>());
    }
    for (std::size_t i = 0; i < cfg.pool_size; ++i) {
      workers.emplace_back([this, i] { run_worker(*queues[i]); });
    }
  }

  ~Impl() {
    for (auto& q : queues) q->shutdown();
    for (auto& t : workers) t.join();
  }

  void complete(InvocationRecord rec) {
    {
      std::lock_guard<std::mutex> lock(state_mu);
      completed.push_back(std::move(rec));
    }
    completion_cv.notify_all();
  }

  // One connection worker: owns one persistent client (pooled strategy) and
  // executes its queue sequentially, so a throttled request retries on the
  // connection it was assigned to.
  void run_worker(WorkQueue& queue) {
    std::unique_ptr<httplib::Client> persistent;
    std::mt19937_64 rng(std::random_device{}());
    PendingItem item;
    while (queue.pop(item)) {
      httplib::Client* cli = nullptr;
      std::unique_ptr<httplib::Client> fresh;
      if (cfg.strategy == ConnectionStrategy::pooled) {
        if (!persistent) {
          persistent = std::make_unique<httplib::Client>(cfg.backend_endpoint);
          persistent->set_keep_alive(true);
          persistent->set_tcp_nodelay(true);
        }
        cli = persistent.get();
      } else {
        fresh = std::make_unique<httplib::Client>(cfg.backend_endpoint);
        fresh->set_keep_alive(false);
        fresh->set_tcp_nodelay(true);
        cli = fresh.get();
      }
      complete(execute_one(*cli, item, rng));
    }
  }

  InvocationRecord execute_one(httplib::Client& cli, PendingItem& item, std::mt19937_64& rng) {
    InvocationRecord rec;
    rec.local_id = item.local_id;

    cli.set_connection_timeout(kConnectTimeoutS, 0);
    auto wait_s = static_cast<time_t>(item.cfg.timeout_s + kTimeoutSlackS);
    cli.set_read_timeout(wait_s, 0);
    cli.set_write_timeout(wait_s, 0);

    const std::string path = "/2015-03-31/functions/" + item.cloud_name + "/invocations";
    double backoff_ms = kThrottleBackoffBaseMs;
    std::size_t attempts = 1;

    for (;;) {
      auto res = cli.Post(path, item.carrier_body, "application/json");
      if (!res) {
        rec.status = InvocationStatus::transport_error;
        rec.error = "transport failure: " + httplib::to_string(res.error());
        return rec;
      }
      if (res->status == 429) {
        if (attempts >= 1 + cfg.max_retries_throttle) {
          rec.status = InvocationStatus::remote_error;
          rec.error = "throttled (429) after " + std::to_string(attempts) + " attempts";
          return rec;
        }
        std::uniform_real_distribution<double> jitter(0.75, 1.25);
        auto sleep_us = static_cast<std::int64_t>(backoff_ms * jitter(rng) * 1000.0);
        std::this_thread::sleep_for(std::chrono::microseconds(sleep_us));
        backoff_ms *= 2.0;
        ++attempts;
        continue;
      }

      rec.request_id = res->get_header_value("X-Cpls-Request-Id");
      rec.cold = res->get_header_value("X-Cpls-Cold") == "1";
      rec.duration_ms = parse_ms_header(res, "X-Cpls-Duration-Ms");
      rec.init_ms = parse_ms_header(res, "X-Cpls-Init-Ms");

      if (res->status != 200) {
        rec.status = InvocationStatus::remote_error;
        rec.error = "backend returned HTTP " + std::to_string(res->status) + ": " +
                    truncate_for_diagnostic(res->body);
        return rec;
      }

      try {
        auto envelope_bytes = wire::unwrap_base64_json(res->body);
        auto envelope = wire::decode_envelope(envelope_bytes);
        switch (envelope.kind) {
          case wire::EnvelopeKind::response_ok:
            item.write_result(envelope.body);
            rec.status = InvocationStatus::ok;
            break;
          case wire::EnvelopeKind::response_err:
            rec.status = InvocationStatus::remote_error;
            rec.error = decode_error_message(envelope.body);
            break;
          default:
            rec.status = InvocationStatus::transport_error;
            rec.error = "response carried a request envelope";
            break;
        }
      } catch (const std::exception& e) {
        rec.status = InvocationStatus::transport_error;
        rec.error = std::string("malformed response: ") + e.what();
      }
      return rec;
    }
  }

  static std::string decode_error_message(std::span<const std::uint8_t> body) {
    try {
      return wire::decode<std::string>(body);
    } catch (const std::exception&) {
      return "worker reported an error with an undecodable message";
    }
  }
};

Dispatcher::Dispatcher(DispatcherConfig config) {
  if (config.pool_size == 0) {
    throw ConfigError("dispatcher pool_size must be at least 1");
  }
  if (config.backend_endpoint.empty()) {
    throw ConfigError("dispatcher backend_endpoint must be non-empty");
  }
  config.backend_endpoint = normalize_endpoint(std::move(config.backend_endpoint));
  impl_ = std::make_unique<Impl>(std::move(config));
}

Dispatcher::~Dispatcher() = default;

std::uint64_t Dispatcher::dispatch_raw(
    const std::string& cloud_name, const FunctionConfig& cfg,
    std::vector<std::uint8_t> request_envelope,
    std::function<void(std::span<const std::uint8_t>)> write_result) {
  PendingItem item;
  item.cloud_name = cloud_name;
  item.cfg = cfg;
  item.carrier_body = wire::wrap_base64_json(request_envelope);
  item.write_result = std::move(write_result);
  {
    std::lock_guard<std::mutex> lock(impl_->state_mu);
    item.local_id = impl_->next_local_id++;
    ++impl_->outstanding;
    ++impl_->loads[select_connection(item.local_id, impl_->cfg.pool_size)];
  }
  std::uint64_t local_id = item.local_id;
  impl_->queues[select_connection(local_id, impl_->cfg.pool_size)]->push(std::move(item));
  return local_id;
}

std::vector<InvocationRecord> Dispatcher::wait(std::size_t n) {
  std::vector<InvocationRecord> out;
  out.reserve(n);
  std::unique_lock<std::mutex> lock(impl_->state_mu);
  for (std::size_t i = 0; i < n; ++i) {
    impl_->completion_cv.wait(lock, [&] { return !impl_->completed.empty(); });
    out.push_back(std::move(impl_->completed.front()));
    impl_->completed.pop_front();
    --impl_->outstanding;
  }
  return out;
}

InvocationRecord Dispatcher::wait_any() {
  std::unique_lock<std::mutex> lock(impl_->state_mu);
  if (impl_->outstanding == 0) {
    throw UsageError("wait_any called with no outstanding invocations");
  }
  impl_->completion_cv.wait(lock, [&] { return !impl_->completed.empty(); });
  InvocationRecord rec = std::move(impl_->completed.front());
  impl_->completed.pop_front();
  --impl_->outstanding;
  return rec;
}

std::size_t Dispatcher::outstanding() const {
  std::lock_guard<std::mutex> lock(impl_->state_mu);
  return impl_->outstanding;
}

std::vector<std::uint64_t> Dispatcher::connection_loads() const {
  std::lock_guard<std::mutex> lock(impl_->state_mu);
  return impl_->loads;
}

const DispatcherConfig& Dispatcher::config() const { return impl_->cfg; }

}  // namespace cppless
