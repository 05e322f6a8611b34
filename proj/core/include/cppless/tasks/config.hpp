#pragma once

namespace cppless {

// Per-function resource configuration — the manifest's user_meta.
struct FunctionConfig {
  int memory_mb = 512;
  int timeout_s = 10;
  int ephemeral_storage_mb = 512;

  bool operator==(const FunctionConfig&) const = default;
};

// Throws ConfigError unless memory >= 128 and timeout >= 1.
void validate(const FunctionConfig& config);

}  // namespace cppless
