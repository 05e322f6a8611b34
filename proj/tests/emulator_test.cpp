#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cppless/emulator/emulator.hpp"
#include "cppless/emulator/server.hpp"
#include "cppless/error.hpp"
#include "cppless/wire/binary.hpp"
#include "cppless/wire/envelope.hpp"
#include "support/test_paths.h"
#include "support/worker_tasks.hpp"

using namespace cppless;
using namespace cppless::emulator;

namespace {

std::string request_carrier(const std::vector<std::uint8_t>& captures) {
  return wire::wrap_base64_json(wire::encode_envelope(wire::EnvelopeKind::request, captures));
}

template <typename T>
T result_of(const InvokeResult& r) {
  REQUIRE(r.status == 200);
  auto env = wire::decode_envelope(wire::unwrap_base64_json(r.body));
  REQUIRE(env.kind == wire::EnvelopeKind::response_ok);
  return wire::decode<T>(env.body);
}

std::string error_of(const InvokeResult& r) {
  REQUIRE(r.status == 200);
  auto env = wire::decode_envelope(wire::unwrap_base64_json(r.body));
  REQUIRE(env.kind == wire::EnvelopeKind::response_err);
  return wire::decode<std::string>(env.body);
}

const std::string kEchoName = worker_tasks::echo_plus_one.identifier().cloud_name;
const std::string kIdentityName = worker_tasks::identity_u64.identifier().cloud_name;
const std::string kSleepyName = worker_tasks::sleepy.identifier().cloud_name;
const std::string kFailName = worker_tasks::fail_with.identifier().cloud_name;

std::string echo_carrier(std::uint32_t v) {
  return request_carrier(worker_tasks::echo_plus_one.bind(v).capture_body);
}

void register_echo(Emulator& emu, FunctionConfig cfg = {}) {
  emu.create_function(kEchoName, cfg, TEST_WORKER_BIN, kEchoName);
}

}  // namespace

TEST_CASE("cost model holds at the reference points") {
  const PlatformConfig defaults;

  SUBCASE("512 MB for 100 billed ms") {
    double cost = compute_cost(512.0, 100.0, defaults.gb_second_rate, defaults.request_fee);
    CHECK(cost == doctest::Approx(1.0333e-6).epsilon(1e-3));
  }
  SUBCASE("zero memory bills only the request fee") {
    CHECK(compute_cost(0.0, 98765.0, defaults.gb_second_rate, defaults.request_fee) ==
          defaults.request_fee);
  }
  SUBCASE("1769 MB for an hour of compute, fee off") {
    double cost = compute_cost(1769.0, 3.6e6, defaults.gb_second_rate, 0.0);
    CHECK(cost == doctest::Approx(0.1040).epsilon(0.005));
  }
  SUBCASE("halving duration while doubling memory is cost-neutral") {
    double a = compute_cost(512.0, 100.0, defaults.gb_second_rate, defaults.request_fee);
    double b = compute_cost(1024.0, 50.0, defaults.gb_second_rate, defaults.request_fee);
    CHECK(a == b);
  }
}

TEST_CASE("platform config is validated") {
  PlatformConfig cfg;
  cfg.max_concurrency = 0;
  CHECK_THROWS_AS(Emulator{cfg}, ConfigError);

  cfg = {};
  cfg.gb_second_rate = -1.0;
  CHECK_THROWS_AS(Emulator{cfg}, ConfigError);

  cfg = {};
  cfg.request_fee = -0.5;
  CHECK_THROWS_AS(Emulator{cfg}, ConfigError);
}

TEST_CASE("function registration is a guarded upsert") {
  Emulator emu;

  SUBCASE("missing package is rejected with a 400-class error") {
    try {
      emu.create_function("f", {}, "/no/such/binary", "entry");
      FAIL("expected PlatformError");
    } catch (const PlatformError& e) {
      CHECK(e.status() == 400);
    }
  }

  SUBCASE("non-executable package is rejected") {
    try {
      emu.create_function("f", {}, "/etc/passwd", "entry");
      FAIL("expected PlatformError");
    } catch (const PlatformError& e) {
      CHECK(e.status() == 400);
    }
  }

  SUBCASE("invalid config is rejected") {
    FunctionConfig cfg;
    cfg.memory_mb = 64;
    CHECK_THROWS_AS(emu.create_function("f", cfg, TEST_WORKER_BIN, "entry"), ConfigError);
  }

  SUBCASE("created, then unchanged, then updated") {
    CHECK(emu.create_function("f", {}, TEST_WORKER_BIN, kEchoName) == UpsertOutcome::created);
    CHECK(emu.create_function("f", {}, TEST_WORKER_BIN, kEchoName) == UpsertOutcome::unchanged);
    FunctionConfig bigger;
    bigger.memory_mb = 1024;
    CHECK(emu.create_function("f", bigger, TEST_WORKER_BIN, kEchoName) == UpsertOutcome::updated);
    auto listed = emu.list_functions();
    REQUIRE(listed.size() == 1);
    CHECK(listed[0].name == "f");
    CHECK(listed[0].config.memory_mb == 1024);
  }
}

TEST_CASE("invoking an unknown function is a 404") {
  Emulator emu;
  auto r = emu.invoke("nobody-home", echo_carrier(1));
  CHECK(r.status == 404);
  CHECK(r.body.find("nobody-home") != std::string::npos);
  CHECK(emu.billing().empty());
}

TEST_CASE("payloads over the platform limit are rejected before admission") {
  PlatformConfig cfg;
  cfg.max_payload_bytes = 8;
  Emulator emu(cfg);
  register_echo(emu);
  auto r = emu.invoke(kEchoName, echo_carrier(1));
  CHECK(r.status == 413);
  CHECK(emu.billing().empty());
  CHECK(emu.stats().in_flight == 0);
  CHECK(emu.stats().throttled == 0);
}

TEST_CASE("cold start, warm reuse, and drain on update") {
  Emulator emu;
  register_echo(emu);

  auto first = emu.invoke(kEchoName, echo_carrier(41));
  CHECK(result_of<std::uint32_t>(first) == 42);
  CHECK(first.cold);
  CHECK(first.init_ms == 11.0);

  auto second = emu.invoke(kEchoName, echo_carrier(7));
  CHECK(result_of<std::uint32_t>(second) == 8);
  CHECK_FALSE(second.cold);
  CHECK(second.init_ms == 0.0);
  CHECK(second.request_id != first.request_id);

  auto listed = emu.list_functions();
  REQUIRE(listed.size() == 1);
  CHECK(listed[0].warm_instances == 1);
  CHECK(listed[0].instances_spawned == 1);

  // identical re-registration keeps the pool warm
  register_echo(emu);
  auto third = emu.invoke(kEchoName, echo_carrier(0));
  CHECK(result_of<std::uint32_t>(third) == 1);
  CHECK_FALSE(third.cold);

  // a config change retires the pool; the next invocation starts cold
  FunctionConfig bigger;
  bigger.memory_mb = 1024;
  emu.create_function(kEchoName, bigger, TEST_WORKER_BIN, kEchoName);
  auto fourth = emu.invoke(kEchoName, echo_carrier(9));
  CHECK(result_of<std::uint32_t>(fourth) == 10);
  CHECK(fourth.cold);
  CHECK(fourth.init_ms == 11.0);

  auto samples = emu.billing();
  REQUIRE(samples.size() == 4);
  CHECK(samples[0].cold);
  CHECK(samples[0].init_ms == 11.0);
  CHECK(samples[0].billed_ms == std::ceil(samples[0].duration_ms + 11.0));
  CHECK(samples[0].memory_mb == 512);
  CHECK_FALSE(samples[1].cold);
  CHECK(samples[1].init_ms == 0.0);
  CHECK(samples[3].cold);
  CHECK(samples[3].memory_mb == 1024);

  CHECK(emu.stats().spawned_instances == 2);
  CHECK(emu.stats().completed == 4);
}

TEST_CASE("one package can back several functions with different entries") {
  Emulator emu;
  emu.create_function("alias-echo", {}, TEST_WORKER_BIN, kEchoName);
  emu.create_function(kIdentityName, {}, TEST_WORKER_BIN, kIdentityName);

  auto r1 = emu.invoke("alias-echo", echo_carrier(10));
  CHECK(result_of<std::uint32_t>(r1) == 11);

  auto r2 = emu.invoke(
      kIdentityName,
      request_carrier(worker_tasks::identity_u64.bind(0xDEADBEEFCAFEBABEULL).capture_body));
  CHECK(result_of<std::uint64_t>(r2) == 0xDEADBEEFCAFEBABEULL);
}

TEST_CASE("a task exception travels back as a remote error response") {
  Emulator emu;
  emu.create_function(kFailName, {}, TEST_WORKER_BIN, kFailName);
  auto r = emu.invoke(
      kFailName, request_carrier(worker_tasks::fail_with.bind("sharp edge").capture_body));
  CHECK(error_of(r) == "sharp edge");
  // an error response still bills like a completed request
  CHECK(emu.billing().size() == 1);
}

TEST_CASE("the concurrency cap rejects immediately and never queues") {
  PlatformConfig cfg;
  cfg.max_concurrency = 2;
  cfg.exec_delays.emplace("*", DelaySchedule::fixed(250.0));
  Emulator emu(cfg);
  register_echo(emu);

  std::vector<int> statuses(4, 0);
  std::vector<std::thread> first_wave, second_wave;
  for (int i = 0; i < 2; ++i) {
    first_wave.emplace_back(
        [&, i] { statuses[i] = emu.invoke(kEchoName, echo_carrier(i)).status; });
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(60));
  for (int i = 2; i < 4; ++i) {
    second_wave.emplace_back(
        [&, i] { statuses[i] = emu.invoke(kEchoName, echo_carrier(i)).status; });
  }
  for (auto& t : first_wave) t.join();
  for (auto& t : second_wave) t.join();

  CHECK(statuses[0] == 200);
  CHECK(statuses[1] == 200);
  CHECK(statuses[2] == 429);
  CHECK(statuses[3] == 429);
  auto stats = emu.stats();
  CHECK(stats.peak_in_flight == 2);
  CHECK(stats.throttled == 2);
  CHECK(stats.in_flight == 0);
  // the injected schedule is reported verbatim as the duration
  for (const auto& s : emu.billing()) CHECK(s.duration_ms == 250.0);
}

TEST_CASE("an instance that dies before answering is a platform error") {
  Emulator emu;
  emu.create_function("crasher", {}, "/bin/false", "whatever");
  auto r = emu.invoke("crasher", echo_carrier(1));
  CHECK(r.status == 500);
  CHECK(r.body.find("exited") != std::string::npos);
  CHECK(emu.billing().empty());
  CHECK(emu.stats().in_flight == 0);
}

TEST_CASE("a function that overruns its timeout is a platform error") {
  Emulator emu;
  FunctionConfig one_second;
  one_second.timeout_s = 1;
  emu.create_function(kSleepyName, one_second, TEST_WORKER_BIN, kSleepyName);
  auto r = emu.invoke(kSleepyName,
                      request_carrier(worker_tasks::sleepy.bind(2500).capture_body));
  CHECK(r.status == 500);
  CHECK(r.body.find("timed out") != std::string::npos);
  CHECK(emu.billing().empty());
}

TEST_CASE("billing is deterministic under injected schedules") {
  struct Outcome {
    std::vector<BillingSample> samples;
    BillingTotals totals;
  };
  auto run_five = [](std::uint64_t seed) {
    PlatformConfig cfg;
    cfg.delay_seed = seed;
    cfg.exec_delays.emplace("*", DelaySchedule::fixed(50.0));
    Emulator emu(cfg);
    register_echo(emu);
    for (std::uint32_t i = 0; i < 5; ++i) emu.invoke(kEchoName, echo_carrier(i));
    return Outcome{emu.billing(), emu.billing_totals()};
  };

  Outcome a = run_five(1);
  Outcome b = run_five(1);
  auto &sa = a.samples, &sb = b.samples;
  REQUIRE(sa.size() == 5);
  REQUIRE(sb.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(sa[i].duration_ms == sb[i].duration_ms);
    CHECK(sa[i].billed_ms == sb[i].billed_ms);
    CHECK(sa[i].cost_usd == sb[i].cost_usd);
    CHECK(sa[i].cold == sb[i].cold);
  }
  CHECK(a.totals.total_usd == b.totals.total_usd);
  CHECK(sa[0].billed_ms == 61.0);  // ceil(50 + 11) cold
  CHECK(sa[1].billed_ms == 50.0);  // warm
}

TEST_CASE("cost grows linearly in the number of identical requests") {
  PlatformConfig cfg;
  cfg.exec_delays.emplace("*", DelaySchedule::fixed(50.0));
  Emulator emu(cfg);
  register_echo(emu);
  for (std::uint32_t i = 0; i < 8; ++i) emu.invoke(kEchoName, echo_carrier(i));

  const double warm = compute_cost(512.0, 50.0, cfg.gb_second_rate, cfg.request_fee);
  const double cold = compute_cost(512.0, 61.0, cfg.gb_second_rate, cfg.request_fee);
  auto samples = emu.billing();
  REQUIRE(samples.size() == 8);
  CHECK(samples[0].cost_usd == cold);
  for (std::size_t i = 1; i < 8; ++i) CHECK(samples[i].cost_usd == warm);

  auto totals = emu.billing_totals();
  CHECK(totals.samples == 8);
  CHECK(totals.total_usd == doctest::Approx(cold + 7 * warm).epsilon(1e-12));
  CHECK(totals.fees_usd == doctest::Approx(8 * cfg.request_fee).epsilon(1e-12));
  CHECK(totals.compute_usd ==
        doctest::Approx(totals.total_usd - totals.fees_usd).epsilon(1e-12));
}

TEST_CASE("cold sample count equals instances spawned") {
  PlatformConfig cfg;
  cfg.exec_delays.emplace("*", DelaySchedule::fixed(80.0));
  Emulator emu(cfg);
  register_echo(emu);

  // four concurrent requests against an empty pool spawn four instances
  std::vector<std::thread> threads;
  for (std::uint32_t i = 0; i < 4; ++i) {
    threads.emplace_back([&, i] {
      auto r = emu.invoke(kEchoName, echo_carrier(i));
      CHECK(r.status == 200);
    });
  }
  for (auto& t : threads) t.join();

  CHECK(emu.stats().spawned_instances == 4);
  CHECK(emu.list_functions()[0].warm_instances == 4);

  // the pool now covers sequential traffic without another spawn
  for (std::uint32_t i = 0; i < 4; ++i) {
    auto r = emu.invoke(kEchoName, echo_carrier(i));
    CHECK(r.status == 200);
    CHECK_FALSE(r.cold);
  }
  CHECK(emu.stats().spawned_instances == 4);

  auto samples = emu.billing();
  auto colds = std::count_if(samples.begin(), samples.end(),
                             [](const BillingSample& s) { return s.cold; });
  CHECK(static_cast<std::uint64_t>(colds) == emu.stats().spawned_instances);
}

TEST_CASE("uniform schedules replay under the same seed") {
  auto durations = [](std::uint64_t seed) {
    PlatformConfig cfg;
    cfg.delay_seed = seed;
    cfg.exec_delays.emplace("*", DelaySchedule::uniform(5.0, 25.0));
    Emulator emu(cfg);
    register_echo(emu);
    std::vector<double> out;
    for (std::uint32_t i = 0; i < 5; ++i) {
      out.push_back(emu.invoke(kEchoName, echo_carrier(i)).duration_ms);
    }
    return out;
  };

  auto a = durations(42), b = durations(42), c = durations(43);
  CHECK(a == b);
  CHECK(a != c);
  for (double d : a) {
    CHECK(d >= 5.0);
    CHECK(d <= 25.0);
  }
}

TEST_CASE("list schedules follow arrival order and wrap around") {
  PlatformConfig cfg;
  cfg.exec_delays.emplace(kEchoName, DelaySchedule::list({30.0, 10.0, 20.0}));
  Emulator emu(cfg);
  register_echo(emu);
  std::vector<double> got;
  for (std::uint32_t i = 0; i < 5; ++i) {
    got.push_back(emu.invoke(kEchoName, echo_carrier(i)).duration_ms);
  }
  CHECK(got == std::vector<double>{30.0, 10.0, 20.0, 30.0, 10.0});
}

TEST_CASE("removing a function forgets it") {
  Emulator emu;
  register_echo(emu);
  CHECK(emu.invoke(kEchoName, echo_carrier(1)).status == 200);
  CHECK(emu.remove_function(kEchoName));
  CHECK_FALSE(emu.remove_function(kEchoName));
  CHECK(emu.invoke(kEchoName, echo_carrier(1)).status == 404);
}

TEST_CASE("an idle platform reports empty billing and zeroed stats") {
  Emulator emu;
  CHECK(emu.billing().empty());
  auto totals = emu.billing_totals();
  CHECK(totals.total_usd == 0.0);
  CHECK(totals.samples == 0);
  auto stats = emu.stats();
  CHECK(stats.in_flight == 0);
  CHECK(stats.peak_in_flight == 0);
  CHECK(stats.completed == 0);
}

TEST_CASE("the platform speaks HTTP end to end") {
  Emulator emu;
  EmulatorServer server(emu);
  int port = server.start();
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);

  SUBCASE("register, list, invoke, bill, delete") {
    nlohmann::json reg{{"name", kEchoName},
                       {"entry", kEchoName},
                       {"package", TEST_WORKER_BIN},
                       {"config", {{"memory", 512}, {"timeout", 10}, {"ephemeral_storage", 512}}}};
    auto res = client.Post("/functions", reg.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 201);
    CHECK(nlohmann::json::parse(res->body)["result"] == "created");

    res = client.Post("/functions", reg.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(nlohmann::json::parse(res->body)["result"] == "unchanged");

    res = client.Get("/functions");
    REQUIRE(res);
    auto listed = nlohmann::json::parse(res->body);
    REQUIRE(listed.size() == 1);
    CHECK(listed[0]["name"] == kEchoName);
    CHECK(listed[0]["config"]["memory"] == 512);

    const std::string route = "/2015-03-31/functions/" + kEchoName + "/invocations";
    res = client.Post(route, echo_carrier(41), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    CHECK(res->get_header_value("X-Cpls-Cold") == "1");
    CHECK_FALSE(res->get_header_value("X-Cpls-Request-Id").empty());
    CHECK(std::stod(res->get_header_value("X-Cpls-Init-Ms")) == 11.0);
    auto env = wire::decode_envelope(wire::unwrap_base64_json(res->body));
    CHECK(wire::decode<std::uint32_t>(env.body) == 42);

    res = client.Get("/billing");
    REQUIRE(res);
    auto bill = nlohmann::json::parse(res->body);
    REQUIRE(bill.size() == 1);
    CHECK(bill[0]["cloud_name"] == kEchoName);
    CHECK(bill[0]["cold"] == true);
    CHECK(bill[0]["billed_ms"].get<double>() >= 11.0);

    res = client.Get("/stats");
    REQUIRE(res);
    CHECK(nlohmann::json::parse(res->body)["completed"] == 1);

    res = client.Delete("/functions/" + kEchoName);
    REQUIRE(res);
    CHECK(res->status == 200);
    res = client.Post(route, echo_carrier(41), "application/json");
    REQUIRE(res);
    CHECK(res->status == 404);
  }

  SUBCASE("malformed registrations are 400s") {
    auto res = client.Post("/functions", "not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);

    nlohmann::json extra{{"name", "f"}, {"entry", "e"}, {"package", TEST_WORKER_BIN}, {"bogus", 1}};
    res = client.Post("/functions", extra.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(nlohmann::json::parse(res->body)["error"].get<std::string>().find("bogus") !=
          std::string::npos);

    nlohmann::json tiny{{"name", "f"},
                        {"entry", "e"},
                        {"package", TEST_WORKER_BIN},
                        {"config", {{"memory", 64}}}};
    res = client.Post("/functions", tiny.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);

    res = client.Delete("/functions/ghost");
    REQUIRE(res);
    CHECK(res->status == 404);
  }
}
