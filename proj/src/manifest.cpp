#include "prd/manifest.hpp"

#include "prd/io.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace prd {

void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config"] = nlohmann::json::parse(m.config_json);
  j["seeds"] = m.seeds;
  j["duration_seconds"] = m.duration_seconds;
  auto entries = [](const std::vector<ArtifactEntry>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : list) arr.push_back({{"path", e.path}, {"sha256", e.sha256}});
    return arr;
  };
  j["inputs"] = entries(m.inputs);
  j["artifacts"] = entries(m.artifacts);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("manifest: cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("manifest: write failed");
}

std::string read_config_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.contains("config") && j["config"].is_object()) return j["config"].dump();
  return j.dump();
}

}  // namespace prd
