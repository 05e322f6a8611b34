// Fork-join benchmark harness: Monte-Carlo Pi and N-Queens prefix
// decomposition, either on an in-process worker pool (local mode) or as one
// cloud invocation per task through the dispatcher (serverless mode). Both
// modes run the same task bodies with the same seeds, so results match
// bit-for-bit; the CSV captures per-task durations and costs plus aggregate
// footer rows.
//
// CSV schema: header task_id,duration_ms,cold,init_ms,cost_usd,request_id;
// one row per task (task_id order); footer rows "<metric>,<value>" for
// wall_ms, host_dispatch_ms, total_cost_usd, compute_cost_usd,
// request_fees_usd.
#include <CLI11.hpp>
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <thread>
#include <vector>

#include "bench_tasks.hpp"
#include "cppless/dispatch/dispatcher.hpp"
#include "cppless/error.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

constexpr double kHostVcpuDollarsPerHour = 0.0575;

struct TaskRow {
  std::uint64_t task_id = 0;
  double duration_ms = 0.0;
  bool cold = false;
  double init_ms = 0.0;
  double cost_usd = 0.0;
  std::string request_id;
};

struct RunResult {
  std::vector<TaskRow> rows;
  double wall_ms = 0.0;
  double host_dispatch_ms = 0.0;
  double compute_cost_usd = 0.0;
  double request_fees_usd = 0.0;
  int failures = 0;

  double total_cost_usd() const {
    const double host_cost =
        (host_dispatch_ms / 3'600'000.0) * kHostVcpuDollarsPerHour;
    return compute_cost_usd + request_fees_usd + host_cost;
  }
};

void write_csv(const RunResult& run, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw cppless::ConfigError("cannot write CSV file " + path);
  out << "task_id,duration_ms,cold,init_ms,cost_usd,request_id\n";
  char line[256];
  for (const auto& row : run.rows) {
    std::snprintf(line, sizeof line, "%llu,%.6f,%d,%.6f,%.12g,%s\n",
                  static_cast<unsigned long long>(row.task_id), row.duration_ms,
                  row.cold ? 1 : 0, row.init_ms, row.cost_usd, row.request_id.c_str());
    out << line;
  }
  std::snprintf(line, sizeof line, "wall_ms,%.6f\n", run.wall_ms);
  out << line;
  std::snprintf(line, sizeof line, "host_dispatch_ms,%.6f\n", run.host_dispatch_ms);
  out << line;
  std::snprintf(line, sizeof line, "total_cost_usd,%.12g\n", run.total_cost_usd());
  out << line;
  std::snprintf(line, sizeof line, "compute_cost_usd,%.12g\n", run.compute_cost_usd);
  out << line;
  std::snprintf(line, sizeof line, "request_fees_usd,%.12g\n", run.request_fees_usd);
  out << line;
}

void print_summary(const RunResult& run) {
  std::cout << "tasks: " << run.rows.size() << ", wall_ms: " << run.wall_ms
            << ", host_dispatch_ms: " << run.host_dispatch_ms
            << ", total_cost_usd: " << run.total_cost_usd() << "\n";
}

// Runs `count` jobs on a bounded thread pool, recording per-task wall time.
// Local rows have no platform identity: request_id "local", zero cost.
template <typename Job>
RunResult run_local_pool(std::size_t count, std::size_t pool, Job job) {
  RunResult run;
  run.rows.resize(count);
  const auto started = Clock::now();
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  const std::size_t width = std::max<std::size_t>(1, std::min(pool, count));
  threads.reserve(width);
  for (std::size_t t = 0; t < width; ++t) {
    threads.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        const auto task_start = Clock::now();
        job(i);
        run.rows[i] = TaskRow{i, ms_between(task_start, Clock::now()), false, 0.0, 0.0, "local"};
      }
    });
  }
  for (auto& t : threads) t.join();
  run.wall_ms = ms_between(started, Clock::now());
  run.host_dispatch_ms = 0.0;  // no serialization happens on the local path
  return run;
}

// Billing rows for this run's request ids, fetched from the platform:
// request_id -> {cost_usd, request_fee_usd}.
std::map<std::string, std::pair<double, double>> fetch_billing(const std::string& backend) {
  std::map<std::string, std::pair<double, double>> costs;
  std::string endpoint = backend;
  if (endpoint.find("://") == std::string::npos) endpoint = "http://" + endpoint;
  httplib::Client client(endpoint);
  client.set_connection_timeout(std::chrono::seconds(10));
  auto res = client.Get("/billing");
  if (!res || res->status != 200) return costs;  // billing is best-effort decoration
  for (const auto& item : nlohmann::json::parse(res->body)) {
    costs[item.at("request_id").get<std::string>()] = {
        item.at("cost_usd").get<double>(), item.at("request_fee_usd").get<double>()};
  }
  return costs;
}

// Dispatches `count` tasks through one dispatcher and joins them, folding
// invocation records and platform billing into CSV rows. dispatch_one(d, i)
// must call d.dispatch(...) exactly once for task i.
template <typename DispatchOne>
RunResult run_serverless(std::size_t count, const std::string& backend, std::size_t pool,
                         std::size_t max_retries, DispatchOne dispatch_one) {
  cppless::DispatcherConfig cfg;
  cfg.backend_endpoint = backend;
  cfg.pool_size = pool;
  cfg.max_retries_throttle = max_retries;
  cppless::Dispatcher dispatcher(cfg);

  RunResult run;
  run.rows.resize(count);
  const auto started = Clock::now();
  for (std::size_t i = 0; i < count; ++i) dispatch_one(dispatcher, i);
  run.host_dispatch_ms = ms_between(started, Clock::now());
  auto records = dispatcher.wait(count);
  run.wall_ms = ms_between(started, Clock::now());

  const auto billing = fetch_billing(backend);
  for (const auto& record : records) {
    TaskRow& row = run.rows[record.local_id];
    row.task_id = record.local_id;
    row.duration_ms = record.duration_ms;
    row.cold = record.cold;
    row.init_ms = record.init_ms;
    row.request_id = record.request_id;
    if (auto it = billing.find(record.request_id); it != billing.end()) {
      row.cost_usd = it->second.first;
      run.compute_cost_usd += it->second.first - it->second.second;
      run.request_fees_usd += it->second.second;
    }
    if (record.status != cppless::InvocationStatus::ok) {
      std::cerr << "bench: task " << record.local_id << " failed ("
                << to_string(record.status) << "): " << record.error << "\n";
      ++run.failures;
    }
  }
  return run;
}

int run_and_report(const RunResult& run, const std::string& csv_path) {
  write_csv(run, csv_path);
  print_summary(run);
  return run.failures == 0 ? 0 : 1;
}

}  // namespace

CPLS_MAIN(int argc, char** argv) {
  CLI::App app{"cppless fork-join benchmarks"};
  app.require_subcommand(1);

  std::string mode, backend = "http://127.0.0.1:9123", csv_path, seed_text = "42";
  std::size_t pool = 16;
  std::size_t max_retries = 5;
  std::size_t local_pool = std::max(1u, std::thread::hardware_concurrency());

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--mode", mode, "local | serverless")->required();
    cmd->add_option("--backend", backend, "platform endpoint (serverless mode)");
    cmd->add_option("--csv", csv_path, "write per-task rows and footer metrics here");
    cmd->add_option("--seed", seed_text, "base RNG seed");
    cmd->add_option("--pool", pool, "dispatcher connection pool size");
    cmd->add_option("--local-pool", local_pool, "local worker pool size");
    cmd->add_option("--max-retries", max_retries, "throttle retry budget per invocation");
  };

  std::int64_t samples = 10'000'000;
  std::int64_t workers = 16;
  auto* pi = app.add_subcommand("pi", "Monte-Carlo pi estimate");
  pi->add_option("--samples", samples, "total sample budget");
  pi->add_option("--workers", workers, "task count (must divide --samples)");
  add_common(pi);

  std::uint32_t board_n = 8;
  std::uint32_t prefix_len = 2;
  auto* nqueens = app.add_subcommand("nqueens", "N-queens solution count");
  nqueens->add_option("--n", board_n, "board size");
  nqueens->add_option("--prefix", prefix_len, "prefix length (tasks = #prefixes)");
  add_common(nqueens);

  CLI11_PARSE(app, argc, argv);

  if (mode != "local" && mode != "serverless") {
    std::cerr << "bench: --mode must be local or serverless\n";
    return 2;
  }

  std::uint64_t seed = 0;
  try {
    seed = std::stoull(seed_text);
  } catch (const std::exception&) {
    std::cerr << "bench: --seed must be an unsigned integer\n";
    return 2;
  }

  try {
    if (pi->parsed()) {
      if (workers < 1 || samples < 1 || samples % workers != 0) {
        std::cerr << "bench: --samples must be a positive multiple of --workers\n";
        return 2;
      }
      const std::int64_t per_task = samples / workers;
      const std::size_t count = static_cast<std::size_t>(workers);
      std::vector<double> estimates(count, 0.0);

      RunResult run =
          mode == "local"
              ? run_local_pool(count, local_pool,
                               [&](std::size_t i) {
                                 estimates[i] = bench_tasks::pi_task.run_local(per_task, seed + i);
                               })
              : run_serverless(count, backend, pool, max_retries,
                               [&](cppless::Dispatcher& d, std::size_t i) {
                                 d.dispatch(bench_tasks::pi_task.bind(per_task, seed + i),
                                            estimates[i]);
                               });

      double mean = 0.0;
      for (double e : estimates) mean += e;
      mean /= static_cast<double>(count);
      std::cout.precision(12);
      std::cout << "pi_estimate: " << mean << " (samples " << samples << ", tasks " << count
                << ", mode " << mode << ")\n";
      return run_and_report(run, csv_path);
    }

    const auto prefixes = cppless::bench::enumerate_prefixes(board_n, prefix_len);
    const std::size_t count = prefixes.size();
    std::vector<std::uint64_t> counts(count, 0);

    RunResult run =
        mode == "local"
            ? run_local_pool(count, local_pool,
                             [&](std::size_t i) {
                               counts[i] = bench_tasks::nqueens_task.run_local(board_n, prefixes[i]);
                             })
            : run_serverless(count, backend, pool, max_retries,
                             [&](cppless::Dispatcher& d, std::size_t i) {
                               d.dispatch(bench_tasks::nqueens_task.bind(board_n, prefixes[i]),
                                          counts[i]);
                             });

    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    std::cout << "nqueens_solutions: " << total << " (n " << board_n << ", prefix " << prefix_len
              << ", tasks " << count << ", mode " << mode << ")\n";
    return run_and_report(run, csv_path);
  } catch (const cppless::TransportError& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 2;
  }
}
