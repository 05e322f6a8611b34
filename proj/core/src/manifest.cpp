#include "cppless/tasks/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cppless/error.hpp"

namespace cppless::tasks {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& expected,
                  const std::string& path) {
  for (const auto& key : expected) {
    if (!obj.contains(key)) {
      throw ManifestError("missing key \"" + key + "\"", path);
    }
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!expected.count(it.key())) {
      throw ManifestError("unknown key", path + "." + it.key());
    }
  }
}

int expect_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    throw ManifestError("expected integer, got " + std::string(j.type_name()), path);
  }
  return j.get<int>();
}

std::string expect_string(const json& j, const std::string& path) {
  if (!j.is_string()) {
    throw ManifestError("expected string, got " + std::string(j.type_name()), path);
  }
  return j.get<std::string>();
}

}  // namespace

std::string emit_manifest(const std::vector<ManifestEntry>& entries) {
  if (entries.empty()) {
    throw ManifestError("manifest requires at least one entry point", "");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      if (entries[i].identifier == entries[j].identifier) {
        throw ManifestError("duplicate identifier \"" + entries[i].identifier + "\" (entries \"" +
                                entries[i].original_function_name + "\" and \"" +
                                entries[j].original_function_name + "\")",
                            "");
      }
    }
  }
  json doc;
  doc["entry_points"] = json::array();
  for (const auto& e : entries) {
    json row;
    row["original_function_name"] = e.original_function_name;
    row["filename"] = e.filename;
    row["user_meta"] = {
        {"ephemeral_storage", e.config.ephemeral_storage_mb},
        {"memory", e.config.memory_mb},
        {"timeout", e.config.timeout_s},
        {"identifier", e.identifier},
    };
    doc["entry_points"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

std::vector<ManifestEntry> read_manifest(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ManifestError(std::string("not valid JSON: ") + e.what(), "");
  }
  if (!doc.is_object()) throw ManifestError("manifest root must be an object", "$");
  require_keys(doc, {"entry_points"}, "$");
  const json& eps = doc["entry_points"];
  if (!eps.is_array()) throw ManifestError("expected array", "$.entry_points");
  if (eps.empty()) {
    throw ManifestError("manifest requires at least one entry point", "$.entry_points");
  }

  std::vector<ManifestEntry> out;
  out.reserve(eps.size());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    std::string path = "$.entry_points[" + std::to_string(i) + "]";
    const json& row = eps[i];
    if (!row.is_object()) throw ManifestError("expected object", path);
    require_keys(row, {"original_function_name", "filename", "user_meta"}, path);

    ManifestEntry e;
    e.original_function_name = expect_string(row["original_function_name"],
                                             path + ".original_function_name");
    e.filename = expect_string(row["filename"], path + ".filename");

    const json& meta = row["user_meta"];
    std::string mpath = path + ".user_meta";
    if (!meta.is_object()) throw ManifestError("expected object", mpath);
    require_keys(meta, {"ephemeral_storage", "memory", "timeout", "identifier"}, mpath);
    e.config.ephemeral_storage_mb = expect_int(meta["ephemeral_storage"],
                                               mpath + ".ephemeral_storage");
    e.config.memory_mb = expect_int(meta["memory"], mpath + ".memory");
    e.config.timeout_s = expect_int(meta["timeout"], mpath + ".timeout");
    e.identifier = expect_string(meta["identifier"], mpath + ".identifier");

    if (e.identifier.empty()) throw ManifestError("identifier must not be empty", mpath + ".identifier");
    if (e.config.memory_mb < 128) {
      throw ManifestError("memory must be >= 128 MB, got " + std::to_string(e.config.memory_mb),
                          mpath + ".memory");
    }
    if (e.config.timeout_s < 1) {
      throw ManifestError("timeout must be >= 1 s, got " + std::to_string(e.config.timeout_s),
                          mpath + ".timeout");
    }
    if (e.config.ephemeral_storage_mb < 0) {
      throw ManifestError("ephemeral_storage must be >= 0", mpath + ".ephemeral_storage");
    }
    if (!seen.insert(e.identifier).second) {
      throw ManifestError("duplicate identifier \"" + e.identifier + "\"",
                          mpath + ".identifier");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ManifestEntry> read_manifest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError("cannot open manifest file: " + path, "");
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_manifest(ss.str());
}

void write_manifest_file(const std::vector<ManifestEntry>& entries, const std::string& path) {
  std::string text = emit_manifest(entries);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ManifestError("cannot write manifest file: " + path, "");
  out << text;
}

}  // namespace cppless::tasks
