#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cppless/tasks/config.hpp"
#include "cppless/tasks/manifest.hpp"

namespace cppless::deploy {

// Result of pushing one manifest to a backend control plane.
struct DeploySummary {
  std::size_t created = 0;
  std::size_t updated = 0;
  std::size_t unchanged = 0;
  std::vector<std::string> failures;  // "cppless-<hash>: <reason>" per failed entry

  bool ok() const { return failures.empty(); }
};

// Registers every manifest entry under its cloud name: POST {backend}/functions
// with the shared package path and the entry's resource config. Entries are
// pushed sequentially; per-entry rejections land in failures. Throws
// TransportError when the backend is unreachable, ConfigError when the
// package file does not exist.
DeploySummary deploy(const std::vector<tasks::ManifestEntry>& manifest,
                     const std::string& package_path, const std::string& backend_endpoint);

// A function as the backend reports it.
struct RemoteFunction {
  std::string name;
  std::string entry;
  std::string package;
  FunctionConfig config;
  std::size_t warm_instances = 0;
  std::uint64_t instances_spawned = 0;
};

// GET {backend}/functions. Throws TransportError when unreachable.
std::vector<RemoteFunction> list_functions(const std::string& backend_endpoint);

// Writes a deterministic store-only zip holding exactly two entries: the
// worker binary (its basename, mode 0755) and "cppless-launch.json" naming
// it. Timestamps are fixed, so identical inputs give byte-identical archives.
// Throws ConfigError when the input is missing or unreadable.
void write_package_zip(const std::string& binary_path, const std::string& out_zip);

// One synchronous data-plane call.
struct InvokeOutcome {
  int status = 0;
  std::string request_id;
  std::string cold;         // "0" | "1" | "" when absent
  std::string duration_ms;  // header text verbatim
  std::string init_ms;
  std::string body;
};

// POST {backend}/2015-03-31/functions/{name}/invocations with the given
// carrier text. Throws TransportError when unreachable.
InvokeOutcome invoke_once(const std::string& backend_endpoint, const std::string& cloud_name,
                          const std::string& carrier_body, int timeout_s = 60);

}  // namespace cppless::deploy
