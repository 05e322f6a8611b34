#include "cppless/tasks/config.hpp"

#include <string>

#include "cppless/error.hpp"

namespace cppless {

void validate(const FunctionConfig& cfg) {
  if (cfg.memory_mb < 128) {
    throw ConfigError("function memory must be at least 128 MB, got " +
                      std::to_string(cfg.memory_mb));
  }
  if (cfg.timeout_s < 1) {
    throw ConfigError("function timeout must be at least 1 second, got " +
                      std::to_string(cfg.timeout_s));
  }
  if (cfg.ephemeral_storage_mb < 0) {
    throw ConfigError("ephemeral storage must be non-negative, got " +
                      std::to_string(cfg.ephemeral_storage_mb));
  }
}

}  // namespace cppless
