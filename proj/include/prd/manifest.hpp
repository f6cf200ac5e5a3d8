#pragma once

#include <string>
#include <vector>

namespace prd {

struct ArtifactEntry {
  std::string path;
  std::string sha256;
};

// One JSON manifest per CLI run: the resolved configuration (sufficient to
// reproduce the run), seeds, every file the run read or wrote with its
// digest, and the wall-clock duration. Written after all artifacts.
struct RunManifest {
  std::string command;
  std::string config_json;  // resolved config as a JSON object (serialized)
  std::vector<std::uint64_t> seeds;
  std::vector<ArtifactEntry> inputs;
  std::vector<ArtifactEntry> artifacts;
  double duration_seconds = 0.0;
};

void write_manifest(const RunManifest& m, const std::string& path);

// Extracts the "config" object (for manifest files) or the whole object (for
// plain config files) as a serialized JSON string.
std::string read_config_json(const std::string& path);

}  // namespace prd
