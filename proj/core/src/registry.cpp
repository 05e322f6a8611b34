#include "cppless/tasks/registry.hpp"

#include "cppless/error.hpp"

namespace cppless::tasks {

EntryRegistry& EntryRegistry::instance() {
  static EntryRegistry registry;
  return registry;
}

const RegisteredEntry& EntryRegistry::add(RegisteredEntry entry) {
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& existing : entries_) {
    if (existing->site == entry.site) {
      throw ConfigError("duplicate task definition at " + entry.id.human_id +
                        " (already defined as \"" + existing->original_function_name +
                        "\"); bump the site ordinal to disambiguate");
    }
    if (existing->id.cloud_name == entry.id.cloud_name) {
      throw ConfigError("cloud name collision between " + existing->id.human_id + " and " +
                        entry.id.human_id);
    }
  }
  entries_.push_back(std::make_unique<RegisteredEntry>(std::move(entry)));
  return *entries_.back();
}

const RegisteredEntry* EntryRegistry::find(std::string_view cloud_name) const {
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& e : entries_) {
    if (e->id.cloud_name == cloud_name) return e.get();
  }
  return nullptr;
}

std::vector<const RegisteredEntry*> EntryRegistry::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<const RegisteredEntry*> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.get());
  return out;
}

std::size_t EntryRegistry::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::vector<ManifestEntry> EntryRegistry::manifest_entries(
    std::string_view artifact_filename) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<ManifestEntry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    ManifestEntry row;
    row.original_function_name = e->original_function_name;
    row.filename = std::string(artifact_filename);
    row.config = e->config;
    row.identifier = e->id.human_id;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace cppless::tasks
