// Standalone local FaaS platform: control plane, data plane and billing over
// HTTP, with injectable per-function execution delays.
#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "cppless/emulator/emulator.hpp"
#include "cppless/emulator/server.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop.store(true); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cppless local FaaS emulator"};

  std::string host = "127.0.0.1";
  int port = 9123;
  cppless::emulator::PlatformConfig config;
  std::vector<std::string> delay_flags;

  app.add_option("--host", host, "bind address");
  app.add_option("--port", port, "bind port (0 picks a free one)");
  app.add_option("--max-concurrency", config.max_concurrency,
                 "platform-wide in-flight cap (throttles beyond it)");
  app.add_option("--cold-init-ms", config.cold_init_ms, "billed init time for a cold start");
  app.add_option("--gb-second-rate", config.gb_second_rate, "$ per GB-second of compute");
  app.add_option("--request-fee", config.request_fee, "$ per invocation");
  app.add_option("--delay-seed", config.delay_seed, "seed for uniform delay schedules");
  app.add_option("--exec-delay-ms", delay_flags,
                 "injected execution time, \"<function>=<fixed:N|uniform:LO,HI|list:A,B,...>\"; "
                 "\"*\" matches every function")
      ->take_all();

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& flag : delay_flags) {
      auto [name, schedule] = cppless::emulator::parse_delay_flag(flag);
      config.exec_delays.insert_or_assign(name, schedule);
    }

    cppless::emulator::Emulator emulator(config);
    cppless::emulator::EmulatorServer server(emulator);
    int bound = server.start(host, port);

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cout << "cpls-emulator listening on http://" << host << ":" << bound
              << " (max-concurrency " << config.max_concurrency << ")" << std::endl;

    while (!g_stop.load()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    std::cout << "cpls-emulator shutting down" << std::endl;
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "cpls-emulator: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
