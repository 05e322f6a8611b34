#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cppless/tasks/config.hpp"
#include "cppless/tasks/identifier.hpp"
#include "cppless/tasks/manifest.hpp"

namespace cppless::tasks {

// One task as the worker runtime sees it: its identity, config, and a
// type-erased wrapper that decodes captures, runs the body, and encodes the
// return value.
struct RegisteredEntry {
  TaskIdentifier id;
  TaskSite site;
  std::string original_function_name;
  FunctionConfig config;
  std::function<std::vector<std::uint8_t>(std::span<const std::uint8_t>)> run_serialized;
};

// Process-global task table, populated by static initialization of task
// definitions (identically in host and serverless builds — single source) and
// read-only once the worker loop starts.
class EntryRegistry {
 public:
  static EntryRegistry& instance();

  // Throws ConfigError on duplicate sites or cloud names.
  const RegisteredEntry& add(RegisteredEntry entry);

  const RegisteredEntry* find(std::string_view cloud_name) const;

  // Registration (= definition) order.
  std::vector<const RegisteredEntry*> entries() const;

  std::size_t size() const;

  // Manifest rows for every registered task, in definition order, with the
  // given worker artifact name.
  std::vector<ManifestEntry> manifest_entries(std::string_view artifact_filename) const;

 private:
  mutable std::mutex mu_;
  std::vector<std::unique_ptr<RegisteredEntry>> entries_;
};

}  // namespace cppless::tasks
