#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include "json.hpp"

namespace vxhaze::cli {

/// run_manifest.json for one output directory. The file is written as soon
/// as the manifest is constructed and rewritten whenever a stage finishes,
/// so an interrupted run still records what it was asked to do.
class RunManifest {
 public:
  RunManifest(std::filesystem::path dir, const std::string& subcommand, const nlohmann::json& global,
              const nlohmann::json& args);

  void input(const std::filesystem::path& p);
  void output(const std::filesystem::path& p);
  void warn(const std::string& message);

  // Runs fn as a named stage and records its wall time.
  template <class F>
  auto stage(const std::string& name, F&& fn) {
    begin(name);
    struct Finish {
      RunManifest* m;
      ~Finish() { m->end(); }
    } finish{this};
    return fn();
  }

  const nlohmann::json& json() const { return doc_; }
  void save() const;

  static constexpr const char* kFileName = "run_manifest.json";

 private:
  void begin(const std::string& name);
  void end();

  std::filesystem::path dir_;
  nlohmann::json doc_;
  std::chrono::steady_clock::time_point started_;
};

}  // namespace vxhaze::cli
