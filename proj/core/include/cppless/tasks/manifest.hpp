#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cppless/tasks/config.hpp"

namespace cppless::tasks {

// One row of the build-emitted entry-point catalog ("cppless-manifest.json").
struct ManifestEntry {
  std::string original_function_name;
  std::string filename;    // worker artifact name
  FunctionConfig config;   // user_meta: ephemeral_storage / memory / timeout
  std::string identifier;  // user_meta.identifier — the human_id

  bool operator==(const ManifestEntry&) const = default;
};

// Renders {"entry_points": [...]} with entries in the given order. Throws
// ManifestError on an empty list or duplicate identifiers (naming both
// entries).
std::string emit_manifest(const std::vector<ManifestEntry>& entries);

// Strict inverse: unknown keys, missing keys, wrong types, empty entry lists,
// duplicate identifiers, and out-of-range config values are all rejected with
// the offending field path. emit(read(emit(x))) == emit(x) byte-for-byte.
std::vector<ManifestEntry> read_manifest(std::string_view text);

std::vector<ManifestEntry> read_manifest_file(const std::string& path);
void write_manifest_file(const std::vector<ManifestEntry>& entries, const std::string& path);

}  // namespace cppless::tasks
