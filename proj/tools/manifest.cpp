#include "manifest.hpp"

#include <fstream>

#include "vxhaze/error.hpp"

namespace vxhaze::cli {

RunManifest::RunManifest(std::filesystem::path dir, const std::string& subcommand, const nlohmann::json& global,
                         const nlohmann::json& args)
    : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  doc_ = {{"tool", "vxhaze"},
          {"version", VXHAZE_VERSION},
          {"subcommand", subcommand},
          {"config", {{"global", global}, {"args", args}}},
          {"seeds", {{"seed", global.at("seed")}}},
          {"inputs", nlohmann::json::array()},
          {"outputs", nlohmann::json::array()},
          {"stages", nlohmann::json::array()},
          {"warnings", nlohmann::json::array()}};
  save();
}

void RunManifest::input(const std::filesystem::path& p) { doc_["inputs"].push_back(p.string()); }

void RunManifest::output(const std::filesystem::path& p) {
  doc_["outputs"].push_back(p.lexically_relative(dir_).string());
}

void RunManifest::warn(const std::string& message) {
  doc_["warnings"].push_back(message);
  save();
}

void RunManifest::begin(const std::string& name) {
  doc_["stages"].push_back({{"name", name}, {"status", "running"}, {"wall_seconds", nullptr}});
  save();
  started_ = std::chrono::steady_clock::now();
}

void RunManifest::end() {
  auto& s = doc_["stages"].back();
  s["status"] = std::uncaught_exceptions() > 0 ? "failed" : "done";
  s["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  // Runs from a destructor; a failed rewrite must not replace the stage's own error.
  try {
    save();
  } catch (...) {
  }
}

void RunManifest::save() const {
  std::ofstream f(dir_ / kFileName);
  require(static_cast<bool>(f), ErrorCode::kIo, "cannot write " + (dir_ / kFileName).string());
  f << doc_.dump(2) << '\n';
}

}  // namespace vxhaze::cli
