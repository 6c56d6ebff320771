#include "perceptfe/manifest.hpp"

#include <ctime>
#include <fstream>
#include <json.hpp>

#include "perceptfe/errors.hpp"
#include "perceptfe/hash.hpp"

namespace pfe {

using nlohmann::json;

std::string current_timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void RunManifest::add_config(const std::string& path) {
  config_hashes[path] = file_digest(path);
}

void RunManifest::add_input(const std::string& path) {
  input_digests[path] = file_digest(path);
}

void RunManifest::add_output(const std::string& path) {
  output_digests[path] = file_digest(path);
}

std::string RunManifest::to_json_text() const {
  json j;
  j["command"] = command;
  j["argv"] = argv;
  j["version"] = version;
  j["config_hashes"] = config_hashes;
  j["input_digests"] = input_digests;
  j["seeds"] = seeds;
  j["timestamp"] = timestamp;
  j["output_digests"] = output_digests;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write manifest: " + path);
  out << to_json_text();
}

}  // namespace pfe
