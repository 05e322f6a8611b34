#pragma once

#include <httplib.h>

#include <string>
#include <thread>

// An in-process HTTP server bound to a random loopback port. Configure
// routes on `svr` before calling start().
struct TestServer {
  httplib::Server svr;
  int port = 0;
  std::thread runner;

  void start() {
    port = svr.bind_to_any_port("127.0.0.1");
    runner = std::thread([this] { svr.listen_after_bind(); });
    svr.wait_until_ready();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port); }

  ~TestServer() {
    svr.stop();
    if (runner.joinable()) runner.join();
  }
};
