#pragma once

#include <map>
#include <string>
#include <vector>

namespace pfe {

// Reproducibility record written next to every subcommand's outputs.
// Re-running with identical inputs must reproduce identical output digests;
// only the timestamp may differ.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string version;
  std::map<std::string, std::string> config_hashes;  // path -> digest
  std::map<std::string, std::string> input_digests;  // path -> digest
  std::vector<uint64_t> seeds;
  std::string timestamp;                              // ISO-8601 UTC
  std::map<std::string, std::string> output_digests;  // path -> digest

  void add_config(const std::string& path);
  void add_input(const std::string& path);
  void add_output(const std::string& path);

  std::string to_json_text() const;
  void write(const std::string& path) const;
};

std::string current_timestamp_utc();

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pfe
