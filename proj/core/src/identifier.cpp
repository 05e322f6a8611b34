#include "cppless/tasks/identifier.hpp"

#include <openssl/evp.h>

#include <algorithm>

#include "cppless/error.hpp"

namespace cppless::tasks {

std::string sha256_hex(std::string_view input) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(input.data(), input.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

std::string cloud_name_for(std::string_view human_id) {
  return "cppless-" + sha256_hex(human_id).substr(0, 40);
}

TaskIdentifier derive_task_identifier(const std::string& source_file, int line, int column,
                                      int ordinal) {
  if (source_file.empty()) throw ConfigError("task source file must not be empty");
  if (line < 1) throw ConfigError("task line must be >= 1, got " + std::to_string(line));
  if (column < 1) throw ConfigError("task column must be >= 1, got " + std::to_string(column));
  if (ordinal < 0) throw ConfigError("task ordinal must be >= 0, got " + std::to_string(ordinal));
  if (source_file.find('\\') != std::string::npos) {
    throw ConfigError("task source file must use forward slashes: " + source_file);
  }

  TaskIdentifier id;
  id.human_id = source_file + "@" + std::to_string(line) + ":" + std::to_string(column) + "#" +
                std::to_string(ordinal);
  id.stable_hash = sha256_hex(id.human_id).substr(0, 40);
  id.cloud_name = "cppless-" + id.stable_hash;
  return id;
}

std::string relative_source_path(std::string_view file, std::string_view root) {
  std::string f(file);
  std::replace(f.begin(), f.end(), '\\', '/');
  std::string r(root);
  std::replace(r.begin(), r.end(), '\\', '/');
  while (!r.empty() && r.back() == '/') r.pop_back();
  if (!r.empty() && f.size() > r.size() && f.compare(0, r.size(), r) == 0 &&
      f[r.size()] == '/') {
    f.erase(0, r.size() + 1);
  }
  while (f.rfind("./", 0) == 0) f.erase(0, 2);
  return f;
}

}  // namespace cppless::tasks
