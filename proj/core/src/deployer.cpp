#include "cppless/deploy/deployer.hpp"

#include <httplib.h>
#include <zlib.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "cppless/error.hpp"
#include "cppless/tasks/identifier.hpp"

namespace cppless::deploy {

namespace {

using nlohmann::json;

std::string normalize_endpoint(std::string endpoint) {
  if (endpoint.find("://") == std::string::npos) endpoint = "http://" + endpoint;
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  return endpoint;
}

httplib::Client make_client(const std::string& endpoint, int timeout_s = 30) {
  httplib::Client client(normalize_endpoint(endpoint));
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(std::chrono::seconds(timeout_s));
  client.set_write_timeout(std::chrono::seconds(timeout_s));
  return client;
}

[[noreturn]] void throw_unreachable(const std::string& endpoint, const httplib::Result& res) {
  throw TransportError("backend " + normalize_endpoint(endpoint) +
                       " unreachable: " + httplib::to_string(res.error()));
}

std::string backend_error_text(const std::string& body) {
  try {
    json j = json::parse(body);
    if (j.is_object() && j.contains("error")) return j["error"].get<std::string>();
  } catch (...) {
  }
  return body;
}

}  // namespace

DeploySummary deploy(const std::vector<tasks::ManifestEntry>& manifest,
                     const std::string& package_path, const std::string& backend_endpoint) {
  if (!std::filesystem::exists(package_path)) {
    throw ConfigError("package " + package_path + " does not exist");
  }
  const std::string package_abs = std::filesystem::absolute(package_path).string();

  auto client = make_client(backend_endpoint);
  DeploySummary summary;
  for (const auto& entry : manifest) {
    const std::string cloud_name = tasks::cloud_name_for(entry.identifier);
    json body{{"name", cloud_name},
              {"entry", cloud_name},
              {"package", package_abs},
              {"config",
               {{"memory", entry.config.memory_mb},
                {"timeout", entry.config.timeout_s},
                {"ephemeral_storage", entry.config.ephemeral_storage_mb}}}};
    auto res = client.Post("/functions", body.dump(), "application/json");
    if (!res) throw_unreachable(backend_endpoint, res);
    if (res->status == 200 || res->status == 201) {
      const std::string outcome = json::parse(res->body).value("result", "");
      if (outcome == "created") {
        ++summary.created;
      } else if (outcome == "updated") {
        ++summary.updated;
      } else if (outcome == "unchanged") {
        ++summary.unchanged;
      } else {
        summary.failures.push_back(cloud_name + ": unrecognized backend result \"" + outcome +
                                   "\"");
      }
    } else {
      summary.failures.push_back(cloud_name + ": HTTP " + std::to_string(res->status) + ": " +
                                 backend_error_text(res->body));
    }
  }
  return summary;
}

std::vector<RemoteFunction> list_functions(const std::string& backend_endpoint) {
  auto client = make_client(backend_endpoint);
  auto res = client.Get("/functions");
  if (!res) throw_unreachable(backend_endpoint, res);
  if (res->status != 200) {
    throw PlatformError("listing functions failed: HTTP " + std::to_string(res->status),
                        res->status);
  }
  std::vector<RemoteFunction> out;
  json listed = json::parse(res->body);
  for (const auto& item : listed) {
    RemoteFunction fn;
    fn.name = item.at("name").get<std::string>();
    fn.entry = item.at("entry").get<std::string>();
    fn.package = item.at("package").get<std::string>();
    fn.config.memory_mb = item.at("config").at("memory").get<int>();
    fn.config.timeout_s = item.at("config").at("timeout").get<int>();
    fn.config.ephemeral_storage_mb = item.at("config").at("ephemeral_storage").get<int>();
    fn.warm_instances = item.at("warm_instances").get<std::size_t>();
    fn.instances_spawned = item.at("instances_spawned").get<std::uint64_t>();
    out.push_back(std::move(fn));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic store-only zip.

namespace {

constexpr std::uint16_t kDosTime = 0x0000;  // 00:00:00
constexpr std::uint16_t kDosDate = 0x5021;  // 2020-01-01
constexpr std::uint16_t kVersionMadeBy = (3 << 8) | 20;  // unix, 2.0
constexpr std::uint16_t kVersionNeeded = 20;

struct ZipEntry {
  std::string name;
  std::string data;
  std::uint32_t mode;  // unix permission bits
  std::uint32_t crc = 0;
  std::uint32_t offset = 0;
};

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put32(std::string& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v & 0xFFFF));
  put16(out, static_cast<std::uint16_t>(v >> 16));
}

void append_local_header(std::string& out, const ZipEntry& e) {
  put32(out, 0x04034b50);
  put16(out, kVersionNeeded);
  put16(out, 0);  // flags
  put16(out, 0);  // method: store
  put16(out, kDosTime);
  put16(out, kDosDate);
  put32(out, e.crc);
  put32(out, static_cast<std::uint32_t>(e.data.size()));
  put32(out, static_cast<std::uint32_t>(e.data.size()));
  put16(out, static_cast<std::uint16_t>(e.name.size()));
  put16(out, 0);  // extra length
  out += e.name;
}

void append_central_header(std::string& out, const ZipEntry& e) {
  put32(out, 0x02014b50);
  put16(out, kVersionMadeBy);
  put16(out, kVersionNeeded);
  put16(out, 0);
  put16(out, 0);
  put16(out, kDosTime);
  put16(out, kDosDate);
  put32(out, e.crc);
  put32(out, static_cast<std::uint32_t>(e.data.size()));
  put32(out, static_cast<std::uint32_t>(e.data.size()));
  put16(out, static_cast<std::uint16_t>(e.name.size()));
  put16(out, 0);  // extra
  put16(out, 0);  // comment
  put16(out, 0);  // disk number
  put16(out, 0);  // internal attrs
  put32(out, (e.mode | 0100000u) << 16);  // regular file + permissions
  put32(out, e.offset);
  out += e.name;
}

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) throw ConfigError("cannot read " + path);
  return data;
}

}  // namespace

void write_package_zip(const std::string& binary_path, const std::string& out_zip) {
  if (binary_path.empty()) throw ConfigError("package input path is empty");
  if (!std::filesystem::is_regular_file(binary_path)) {
    throw ConfigError("package input " + binary_path + " does not exist");
  }

  const std::string basename = std::filesystem::path(binary_path).filename().string();
  std::vector<ZipEntry> entries;
  entries.push_back({basename, read_file_or_throw(binary_path), 0755});
  entries.push_back(
      {"cppless-launch.json", nlohmann::json{{"binary", basename}}.dump() + "\n", 0644});

  std::string archive;
  for (auto& e : entries) {
    e.crc = static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(e.data.data()), e.data.size()));
    e.offset = static_cast<std::uint32_t>(archive.size());
    append_local_header(archive, e);
    archive += e.data;
  }
  const std::uint32_t central_start = static_cast<std::uint32_t>(archive.size());
  for (const auto& e : entries) append_central_header(archive, e);
  const std::uint32_t central_size = static_cast<std::uint32_t>(archive.size()) - central_start;

  put32(archive, 0x06054b50);  // end of central directory
  put16(archive, 0);
  put16(archive, 0);
  put16(archive, static_cast<std::uint16_t>(entries.size()));
  put16(archive, static_cast<std::uint16_t>(entries.size()));
  put32(archive, central_size);
  put32(archive, central_start);
  put16(archive, 0);  // comment length

  std::ofstream out(out_zip, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + out_zip);
  out.write(archive.data(), static_cast<std::streamsize>(archive.size()));
  if (!out.good()) throw ConfigError("cannot write " + out_zip);
}

InvokeOutcome invoke_once(const std::string& backend_endpoint, const std::string& cloud_name,
                          const std::string& carrier_body, int timeout_s) {
  auto client = make_client(backend_endpoint, timeout_s);
  auto res = client.Post("/2015-03-31/functions/" + cloud_name + "/invocations", carrier_body,
                         "application/json");
  if (!res) throw_unreachable(backend_endpoint, res);
  InvokeOutcome out;
  out.status = res->status;
  out.request_id = res->get_header_value("X-Cpls-Request-Id");
  out.cold = res->get_header_value("X-Cpls-Cold");
  out.duration_ms = res->get_header_value("X-Cpls-Duration-Ms");
  out.init_ms = res->get_header_value("X-Cpls-Init-Ms");
  out.body = res->body;
  return out;
}

}  // namespace cppless::deploy
