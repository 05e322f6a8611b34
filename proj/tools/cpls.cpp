// Deployment and debugging CLI: package, deploy, list, invoke.
//
// Exit codes: 0 success; 1 partial deploy failure or other runtime error;
// 2 bad input (manifest schema, missing package, malformed payload);
// 3 backend unreachable; invoke maps HTTP 404/429/500 to 4/5/6.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "cppless/deploy/deployer.hpp"
#include "cppless/error.hpp"
#include "cppless/tasks/manifest.hpp"
#include "cppless/wire/binary.hpp"
#include "cppless/wire/envelope.hpp"

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitUnreachable = 3;

int run_deploy(const std::string& manifest_path, const std::string& package_path,
               const std::string& backend) {
  std::vector<cppless::tasks::ManifestEntry> manifest;
  try {
    manifest = cppless::tasks::read_manifest_file(manifest_path);
  } catch (const std::exception& e) {
    std::cerr << "cpls: manifest rejected: " << e.what() << "\n";
    return kExitBadInput;
  }

  cppless::deploy::DeploySummary summary;
  try {
    summary = cppless::deploy::deploy(manifest, package_path, backend);
  } catch (const cppless::TransportError& e) {
    std::cerr << "cpls: " << e.what() << "\n";
    return kExitUnreachable;
  } catch (const cppless::ConfigError& e) {
    std::cerr << "cpls: " << e.what() << "\n";
    return kExitBadInput;
  }

  std::cout << "deployed " << manifest.size() << " entry point(s): " << summary.created
            << " created, " << summary.updated << " updated, " << summary.unchanged
            << " unchanged\n";
  if (!summary.ok()) {
    for (const auto& failure : summary.failures) std::cerr << "failed: " << failure << "\n";
    return 1;
  }
  return 0;
}

int run_list(const std::string& backend) {
  try {
    auto functions = cppless::deploy::list_functions(backend);
    for (const auto& fn : functions) {
      std::cout << fn.name << "  entry=" << fn.entry << "  memory=" << fn.config.memory_mb
                << "MB  timeout=" << fn.config.timeout_s << "s  warm=" << fn.warm_instances
                << "  spawned=" << fn.instances_spawned << "\n";
    }
    std::cout << functions.size() << " function(s)\n";
    return 0;
  } catch (const cppless::TransportError& e) {
    std::cerr << "cpls: " << e.what() << "\n";
    return kExitUnreachable;
  } catch (const std::exception& e) {
    std::cerr << "cpls: " << e.what() << "\n";
    return 1;
  }
}

int run_package(const std::string& in_path, const std::string& out_zip) {
  try {
    cppless::deploy::write_package_zip(in_path, out_zip);
    std::cout << "wrote " << out_zip << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "cpls: " << e.what() << "\n";
    return kExitBadInput;
  }
}

int run_invoke(const std::string& backend, const std::string& name,
               const std::string& payload_path) {
  std::string carrier;
  {
    std::ifstream in(payload_path, std::ios::binary);
    if (!in) {
      std::cerr << "cpls: cannot read payload file " << payload_path << "\n";
      return kExitBadInput;
    }
    carrier.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }

  // reject malformed payloads before any network traffic
  try {
    cppless::wire::decode_envelope(cppless::wire::unwrap_base64_json(carrier));
  } catch (const std::exception& e) {
    std::cerr << "cpls: payload rejected: " << e.what() << "\n";
    return kExitBadInput;
  }

  cppless::deploy::InvokeOutcome out;
  try {
    out = cppless::deploy::invoke_once(backend, name, carrier);
  } catch (const cppless::TransportError& e) {
    std::cerr << "cpls: " << e.what() << "\n";
    return kExitUnreachable;
  }

  std::cout << "status: " << out.status << "\n";
  if (!out.request_id.empty()) std::cout << "x-cpls-request-id: " << out.request_id << "\n";
  if (!out.cold.empty()) std::cout << "x-cpls-cold: " << out.cold << "\n";
  if (!out.duration_ms.empty()) std::cout << "x-cpls-duration-ms: " << out.duration_ms << "\n";
  if (!out.init_ms.empty()) std::cout << "x-cpls-init-ms: " << out.init_ms << "\n";

  if (out.status == 200) {
    try {
      auto envelope = cppless::wire::decode_envelope(cppless::wire::unwrap_base64_json(out.body));
      const bool ok = envelope.kind == cppless::wire::EnvelopeKind::response_ok;
      std::cout << "envelope: " << (ok ? "response-ok" : "response-err") << ", "
                << envelope.body.size() << " body byte(s)\n";
      if (!ok) {
        std::cout << "error: " << cppless::wire::decode<std::string>(envelope.body) << "\n";
      }
    } catch (const std::exception& e) {
      std::cout << "body (undecodable): " << e.what() << "\n";
    }
    return 0;
  }

  std::cout << "body: " << out.body << "\n";
  switch (out.status) {
    case 404:
      return 4;
    case 429:
      return 5;
    case 500:
      return 6;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cppless deployment tool"};
  app.require_subcommand(1);

  std::string manifest_path, package_path, backend, in_path, out_zip, name, payload_path;

  auto* deploy = app.add_subcommand("deploy", "register a manifest's entry points");
  deploy->add_option("--manifest", manifest_path, "manifest JSON path")->required();
  deploy->add_option("--package", package_path, "worker binary path")->required();
  deploy->add_option("--backend", backend, "backend endpoint URL")->required();

  auto* list = app.add_subcommand("list", "list registered functions");
  list->add_option("--backend", backend, "backend endpoint URL")->required();

  auto* package = app.add_subcommand("package", "write a deterministic worker archive");
  package->add_option("--in", in_path, "worker binary path")->required();
  package->add_option("--out", out_zip, "output zip path")->required();

  auto* invoke = app.add_subcommand("invoke", "invoke one function with a payload file");
  invoke->add_option("--backend", backend, "backend endpoint URL")->required();
  invoke->add_option("--name", name, "cloud function name")->required();
  invoke->add_option("--payload", payload_path, "carrier JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  if (deploy->parsed()) return run_deploy(manifest_path, package_path, backend);
  if (list->parsed()) return run_list(backend);
  if (package->parsed()) return run_package(in_path, out_zip);
  return run_invoke(backend, name, payload_path);
}
