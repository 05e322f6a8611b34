// Integration runs: dispatcher against the in-process platform with real
// worker processes, and the bench CLI driven as a subprocess.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "cppless/deploy/deployer.hpp"
#include "cppless/dispatch/dispatcher.hpp"
#include "cppless/emulator/emulator.hpp"
#include "cppless/emulator/server.hpp"
#include "cppless/tasks/manifest.hpp"
#include "support/test_paths.h"
#include "support/worker_tasks.hpp"

namespace {

namespace fs = std::filesystem;
namespace emu = cppless::emulator;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("cpls_e2e_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::pair<int, std::string> run(const std::string& cmd) {
  fs::path out_file = scratch_dir() / "cmd_output.txt";
  int rc = std::system((cmd + " > " + out_file.string() + " 2>&1").c_str());
  int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return {code, slurp(out_file)};
}

// In-process platform with its HTTP plane up, plus shorthand to register the
// test worker's tasks as functions.
struct TestPlatform {
  emu::Emulator emulator;
  emu::EmulatorServer server;
  std::string endpoint;

  explicit TestPlatform(emu::PlatformConfig cfg = {})
      : emulator(std::move(cfg)), server(emulator) {
    int port = server.start();
    endpoint = "http://127.0.0.1:" + std::to_string(port);
  }

  template <typename Handle>
  void add(const Handle& task) {
    emulator.create_function(task.identifier().cloud_name, task.config(), TEST_WORKER_BIN,
                             task.identifier().cloud_name);
  }
};

cppless::DispatcherConfig dispatcher_config(const std::string& endpoint, std::size_t pool) {
  cppless::DispatcherConfig cfg;
  cfg.backend_endpoint = endpoint;
  cfg.pool_size = pool;
  return cfg;
}

}  // namespace

TEST_CASE("fork-join dispatch fills every result slot it promised") {
  TestPlatform platform;
  platform.add(worker_tasks::echo_plus_one);

  cppless::Dispatcher dispatcher(dispatcher_config(platform.endpoint, 8));
  constexpr std::size_t kTasks = 32;
  std::vector<std::uint32_t> slots(kTasks, 0);
  std::vector<std::uint64_t> ids(kTasks);
  for (std::size_t i = 0; i < kTasks; ++i) {
    ids[i] = dispatcher.dispatch(
        worker_tasks::echo_plus_one.bind(static_cast<std::uint32_t>(i) * 10), slots[i]);
    CHECK(ids[i] == i);  // dense local ids in dispatch order
  }
  CHECK(dispatcher.outstanding() == kTasks);

  auto records = dispatcher.wait(kTasks);
  REQUIRE(records.size() == kTasks);
  std::set<std::uint64_t> seen;
  for (const auto& record : records) {
    CHECK(record.status == cppless::InvocationStatus::ok);
    seen.insert(record.local_id);
  }
  CHECK(seen.size() == kTasks);  // every dispatch surfaced exactly once
  for (std::size_t i = 0; i < kTasks; ++i) {
    CHECK(slots[i] == i * 10 + 1);  // slot i holds task i's result
  }

  // 32 dispatches over 8 connections: 4 each by round-robin.
  auto loads = dispatcher.connection_loads();
  REQUIRE(loads.size() == 8);
  for (std::uint64_t load : loads) CHECK(load == 4);
  CHECK(dispatcher.outstanding() == 0);
}

TEST_CASE("a thrown task error surfaces as remote-error and the pool survives") {
  TestPlatform platform;
  platform.add(worker_tasks::fail_with);
  platform.add(worker_tasks::echo_plus_one);

  cppless::Dispatcher dispatcher(dispatcher_config(platform.endpoint, 2));
  std::uint32_t sink = 0;
  dispatcher.dispatch(worker_tasks::fail_with.bind("boom-7"), sink);
  auto failed = dispatcher.wait_any();
  CHECK(failed.status == cppless::InvocationStatus::remote_error);
  CHECK(failed.error.find("boom-7") != std::string::npos);

  // The same dispatcher keeps working after a task failure.
  std::uint32_t ok_slot = 0;
  dispatcher.dispatch(worker_tasks::echo_plus_one.bind(41u), ok_slot);
  auto fine = dispatcher.wait_any();
  CHECK(fine.status == cppless::InvocationStatus::ok);
  CHECK(ok_slot == 42);
}

TEST_CASE("first concurrent batch runs cold and the second reuses warm instances") {
  emu::PlatformConfig cfg;
  cfg.exec_delays.emplace("*", emu::DelaySchedule::fixed(80.0));
  TestPlatform platform(std::move(cfg));
  platform.add(worker_tasks::echo_plus_one);

  cppless::Dispatcher dispatcher(dispatcher_config(platform.endpoint, 4));
  auto run_batch = [&] {
    std::vector<std::uint32_t> slots(4, 0);
    for (std::uint32_t i = 0; i < 4; ++i) {
      dispatcher.dispatch(worker_tasks::echo_plus_one.bind(i), slots[i]);
    }
    return dispatcher.wait(4);
  };

  for (const auto& record : run_batch()) {
    CHECK(record.status == cppless::InvocationStatus::ok);
    CHECK(record.cold);
    CHECK(record.duration_ms == 80.0);  // injected delay, not wall time
    CHECK(record.init_ms == 11.0);
  }
  for (const auto& record : run_batch()) {
    CHECK(record.status == cppless::InvocationStatus::ok);
    CHECK(!record.cold);
    CHECK(record.duration_ms == 80.0);
    CHECK(record.init_ms == 0.0);
  }
  CHECK(platform.emulator.stats().spawned_instances == 4);
  CHECK(platform.emulator.stats().completed == 8);
}

TEST_CASE("a wider connection pool drains a fixed batch faster") {
  emu::PlatformConfig cfg;
  cfg.exec_delays.emplace("*", emu::DelaySchedule::fixed(100.0));
  TestPlatform platform(std::move(cfg));
  platform.add(worker_tasks::echo_plus_one);

  constexpr std::size_t kBatch = 16;
  auto timed_batch = [&](std::size_t pool) {
    cppless::Dispatcher dispatcher(dispatcher_config(platform.endpoint, pool));
    std::vector<std::uint32_t> slots(kBatch, 0);
    const auto start = Clock::now();
    for (std::uint32_t i = 0; i < kBatch; ++i) {
      dispatcher.dispatch(worker_tasks::echo_plus_one.bind(i), slots[i]);
    }
    auto records = dispatcher.wait(kBatch);
    const double wall = ms_since(start);
    for (const auto& record : records) {
      CAPTURE(record.error);
      REQUIRE(record.status == cppless::InvocationStatus::ok);
    }
    return wall;
  };

  timed_batch(kBatch);  // warm-up: leaves 16 warm instances behind
  const double serial = timed_batch(1);
  const double quad = timed_batch(4);
  const double wide = timed_batch(16);
  CAPTURE(serial);
  CAPTURE(quad);
  CAPTURE(wide);
  // 16 × 100 ms of injected work: ~1600 ms serially, ~400 ms at 4 lanes,
  // ~100 ms at 16. Strict ordering holds with huge margins.
  CHECK(serial > quad);
  CHECK(quad > wide);
}

TEST_CASE("bench CLI: local and serverless agree, CSV reconciles with billing") {
  TestPlatform platform;
  auto manifest = cppless::tasks::read_manifest_file(BENCH_MANIFEST);
  auto summary = cppless::deploy::deploy(manifest, BENCH_WORKER_BIN, platform.endpoint);
  REQUIRE(summary.ok());

  const fs::path local_csv = scratch_dir() / "pi_local.csv";
  const fs::path remote_csv = scratch_dir() / "pi_remote.csv";
  const std::string bench = BENCH_BIN;

  auto [local_code, local_out] =
      run(bench + " pi --samples 64000 --workers 8 --mode local --seed 5 --csv " +
          local_csv.string());
  REQUIRE(local_code == 0);
  auto [remote_code, remote_out] =
      run(bench + " pi --samples 64000 --workers 8 --mode serverless --seed 5 --backend " +
          platform.endpoint + " --csv " + remote_csv.string());
  REQUIRE(remote_code == 0);

  // Same seeds, same slice sizes: the printed estimate must match exactly.
  const std::string local_line = local_out.substr(0, local_out.find(" (samples"));
  const std::string remote_line = remote_out.substr(0, remote_out.find(" (samples"));
  CHECK(local_line.rfind("pi_estimate: ", 0) == 0);
  CHECK(local_line == remote_line);

  // Parse the serverless CSV: 8 task rows, then the 5 footer metrics.
  std::ifstream csv(remote_csv);
  REQUIRE(csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "task_id,duration_ms,cold,init_ms,cost_usd,request_id");
  struct Row {
    double cost = 0.0;
    std::string request_id;
  };
  std::vector<Row> rows;
  std::map<std::string, double> footer;
  std::string line;
  while (std::getline(csv, line)) {
    const auto c1 = line.find(',');
    REQUIRE(c1 != std::string::npos);
    const std::string first = line.substr(0, c1);
    if (first.find_first_not_of("0123456789") != std::string::npos) {
      footer[first] = std::stod(line.substr(c1 + 1));
      continue;
    }
    const auto last_comma = line.rfind(',');
    const auto cost_start = line.rfind(',', last_comma - 1) + 1;
    Row row;
    row.cost = std::stod(line.substr(cost_start, last_comma - cost_start));
    row.request_id = line.substr(last_comma + 1);
    rows.push_back(std::move(row));
  }
  REQUIRE(rows.size() == 8);
  REQUIRE(footer.size() == 5);

  // Every CSV cost matches the platform's billing sample for that request id,
  // and the footer decomposition adds up.
  std::map<std::string, const emu::BillingSample*> by_request;
  for (const auto& sample : platform.emulator.billing()) {
    by_request[sample.request_id] = &sample;
  }
  double compute = 0.0, fees = 0.0;
  for (const auto& row : rows) {
    auto it = by_request.find(row.request_id);
    REQUIRE(it != by_request.end());
    CHECK(row.cost == doctest::Approx(it->second->cost_usd).epsilon(1e-9));
    compute += it->second->cost_usd - it->second->request_fee_usd;
    fees += it->second->request_fee_usd;
  }
  CHECK(footer.at("compute_cost_usd") == doctest::Approx(compute).epsilon(1e-9));
  CHECK(footer.at("request_fees_usd") == doctest::Approx(fees).epsilon(1e-9));
  const double host_cost = footer.at("host_dispatch_ms") / 3'600'000.0 * 0.0575;
  CHECK(footer.at("total_cost_usd") ==
        doctest::Approx(compute + fees + host_cost).epsilon(1e-9));
  CHECK(footer.at("wall_ms") > 0.0);

  // The local CSV carries no platform identity or cost.
  std::ifstream lcsv(local_csv);
  std::getline(lcsv, header);
  std::size_t local_rows = 0;
  while (std::getline(lcsv, line)) {
    if (line.find("local") != std::string::npos) {
      CHECK(line.substr(line.rfind(',') + 1) == "local");
      ++local_rows;
    }
  }
  CHECK(local_rows == 8);
}

TEST_CASE("nqueens through the CLI splits across prefixes and recombines") {
  TestPlatform platform;
  auto manifest = cppless::tasks::read_manifest_file(BENCH_MANIFEST);
  REQUIRE(cppless::deploy::deploy(manifest, BENCH_WORKER_BIN, platform.endpoint).ok());

  auto [code, out] = run(std::string(BENCH_BIN) +
                         " nqueens --n 8 --prefix 2 --mode serverless --backend " +
                         platform.endpoint);
  REQUIRE(code == 0);
  CHECK(out.find("nqueens_solutions: 92 (n 8, prefix 2, tasks 42, mode serverless)") !=
        std::string::npos);
  // 42 prefix tasks, one platform invocation each.
  CHECK(platform.emulator.stats().completed == 42);
}
