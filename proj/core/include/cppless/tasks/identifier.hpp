#pragma once

#include <string>
#include <string_view>

namespace cppless::tasks {

// Where a task definition sits in the source tree. ordinal disambiguates
// multiple definitions at one location (rare; defaults to 0).
struct TaskSite {
  std::string source_file;  // repo-relative, forward slashes
  int line = 0;             // 1-based
  int column = 0;           // 1-based
  int ordinal = 0;          // 0-based

  bool operator==(const TaskSite&) const = default;
};

// Stable naming derived purely from the definition site. Build mode, build
// directory and rebuilds never feed the hash.
struct TaskIdentifier {
  std::string human_id;     // "<source_file>@<line>:<column>#<ordinal>"
  std::string stable_hash;  // 40 lowercase hex chars (truncated SHA-256)
  std::string cloud_name;   // "cppless-" + stable_hash, <= 64 chars

  bool operator==(const TaskIdentifier&) const = default;
};

// Validates the site and derives the identifier. Pure. Throws ConfigError on
// invalid positions (line/column < 1, ordinal < 0, empty or absolute path).
TaskIdentifier derive_task_identifier(const std::string& source_file, int line, int column,
                                      int ordinal);

inline TaskIdentifier derive_task_identifier(const TaskSite& site) {
  return derive_task_identifier(site.source_file, site.line, site.column, site.ordinal);
}

// Derives "cppless-<40hex>" from an identifier's human form — what the
// deployer registers a manifest entry under.
std::string cloud_name_for(std::string_view human_id);

// Maps an absolute __FILE__ to a repo-relative path by stripping `root` (and
// "./"), normalizing backslashes to forward slashes. Paths outside root are
// returned normalized but unstripped.
std::string relative_source_path(std::string_view file, std::string_view root);

// Lowercase-hex SHA-256 of the input (64 chars).
std::string sha256_hex(std::string_view input);

}  // namespace cppless::tasks
