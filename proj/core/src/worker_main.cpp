// main() for worker builds. Besides serving the invocation loop, the binary
// doubles as its own manifest generator so the build can dump the entry-point
// catalog right next to the artifact.
#include <cstring>
#include <filesystem>
#include <iostream>

#include "cppless/runtime/entry.hpp"
#include "cppless/tasks/manifest.hpp"
#include "cppless/tasks/registry.hpp"

int main(int argc, char** argv) {
  auto& registry = cppless::tasks::EntryRegistry::instance();

  if (argc >= 2 && std::strcmp(argv[1], "--cpls-emit-manifest") == 0) {
    if (argc != 3) {
      std::cerr << "usage: " << argv[0] << " --cpls-emit-manifest <output path>\n";
      return 64;
    }
    try {
      const std::string artifact = std::filesystem::path(argv[0]).filename().string();
      cppless::tasks::write_manifest_file(registry.manifest_entries(artifact), argv[2]);
    } catch (const std::exception& e) {
      std::cerr << "manifest emission failed: " << e.what() << "\n";
      return 1;
    }
    return 0;
  }

  return cppless::runtime::run_entry_loop_from_env(registry);
}
