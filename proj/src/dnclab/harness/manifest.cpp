#include "dnclab/harness/manifest.hpp"

#include <chrono>
#include <ctime>
#include <stdexcept>

#include "dnclab/harness/lab.hpp"
#include "json.hpp"

namespace dnclab::harness {

namespace {
// key-sorted compact dump; hashing survives reformatting but not edits
std::string canonical_config(const std::string& config_json) {
  return nlohmann::json::parse(config_json).dump();
}
}  // namespace

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

std::string hash_string(const std::string& text) { return hex64(fnv1a64(text)); }

std::string hash_file(const std::string& path) { return hash_string(read_file(path)); }

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string manifest_to_json(const Manifest& m) {
  nlohmann::json js;
  js["run_id"] = m.run_id;
  js["command"] = m.command;
  js["config"] = nlohmann::json::parse(m.config_json);
  js["config_hash"] = m.config_hash;
  js["checkpoint_hash"] = m.checkpoint_hash;
  js["seed"] = m.seed;
  js["started_at"] = m.started_at;
  js["finished_at"] = m.finished_at;
  js["artifacts"] = m.artifacts;
  return js.dump(2) + "\n";
}

Manifest manifest_from_json(const std::string& json_text) {
  const auto js = nlohmann::json::parse(json_text);
  Manifest m;
  m.run_id = js.at("run_id").get<std::string>();
  m.command = js.at("command").get<std::string>();
  m.config_json = js.at("config").dump();
  m.config_hash = js.at("config_hash").get<std::string>();
  m.checkpoint_hash = js.value("checkpoint_hash", "");
  m.seed = js.at("seed").get<uint64_t>();
  m.started_at = js.value("started_at", "");
  m.finished_at = js.value("finished_at", "");
  if (js.contains("artifacts")) m.artifacts = js.at("artifacts").get<std::vector<std::string>>();
  return m;
}

Manifest make_manifest(const std::string& command, const std::string& config_json, uint64_t seed) {
  Manifest m;
  m.command = command;
  m.config_json = config_json;
  m.config_hash = hash_string(canonical_config(config_json));
  m.seed = seed;
  m.run_id = hash_string(command + "|" + m.config_hash + "|" + std::to_string(seed));
  m.started_at = timestamp_now();
  return m;
}

void finalize_manifest(Manifest& m, const std::string& out_dir) {
  m.finished_at = timestamp_now();
  write_file(out_dir + "/manifest.json", manifest_to_json(m));
}

Manifest load_and_verify_manifest(const std::string& path) {
  Manifest m = manifest_from_json(read_file(path));
  const std::string recomputed = hash_string(canonical_config(m.config_json));
  if (recomputed != m.config_hash)
    throw std::runtime_error("manifest " + path + ": config hash mismatch (stored " +
                             m.config_hash + ", recomputed " + recomputed +
                             "); the config was edited after the run");
  return m;
}

}  // namespace dnclab::harness
