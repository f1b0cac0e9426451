#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dnclab::harness {

uint64_t fnv1a64(const std::string& bytes);
std::string hex64(uint64_t value);
std::string hash_string(const std::string& text);
std::string hash_file(const std::string& path);

// Persistent record of a run: what was executed, with which config and
// seed, and what it produced. The config is stored inline so the hash can
// always be recomputed; verification fails loudly on any edit.
struct Manifest {
  std::string run_id;
  std::string command;
  std::string config_json;  // canonical serialization
  std::string config_hash;
  std::string checkpoint_hash;  // empty when no checkpoint is involved
  uint64_t seed = 0;
  std::string started_at;   // informational; CSV outputs carry no timestamps
  std::string finished_at;
  std::vector<std::string> artifacts;
};

std::string manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const std::string& json_text);

Manifest make_manifest(const std::string& command, const std::string& config_json, uint64_t seed);
void finalize_manifest(Manifest& m, const std::string& out_dir);

// Load + recompute the config hash; mismatch is an error.
Manifest load_and_verify_manifest(const std::string& path);

std::string timestamp_now();

}  // namespace dnclab::harness
