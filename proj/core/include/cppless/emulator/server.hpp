#pragma once

#include <memory>
#include <string>

#include "cppless/emulator/emulator.hpp"

namespace cppless::emulator {

// HTTP facade over an Emulator: function management under /functions, the
// dated invocations route as the data plane, billing under /billing, and
// counters under /stats. Invocation handlers block for the full call, so the
// server keeps a wide handler pool.
class EmulatorServer {
 public:
  explicit EmulatorServer(Emulator& emulator);
  ~EmulatorServer();
  EmulatorServer(const EmulatorServer&) = delete;
  EmulatorServer& operator=(const EmulatorServer&) = delete;

  // Binds host:port (port 0 picks a free port) and serves in the background.
  // Returns the bound port; throws PlatformError when the bind fails.
  int start(const std::string& host = "127.0.0.1", int port = 0);

  void stop();

  int port() const;
  std::string endpoint() const;  // "http://host:port"

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cppless::emulator
