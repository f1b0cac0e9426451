#include "dnclab/dnc/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace dnclab::dnc {

namespace {
constexpr char kMagic[8] = {'D', 'N', 'C', 'K', 'P', 'T', '0', '1'};
constexpr int kFormatVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}
}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  nlohmann::json header;
  header["format_version"] = kFormatVersion;
  header["config"] = nlohmann::json::parse(config_to_json(ckpt.config));
  header["seed"] = ckpt.seed;
  header["params"] = nlohmann::json::array();
  for_each_param(ckpt.params, [&](const std::string& name, const nn::Mat& m) {
    header["params"].push_back({{"name", name}, {"rows", m.rows}, {"cols", m.cols}});
  });
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, uint32_t(header_text.size()));
  out.write(header_text.data(), std::streamsize(header_text.size()));
  static_assert(sizeof(double) == 8);
  for_each_param(ckpt.params, [&](const std::string&, const nn::Mat& m) {
    out.write(reinterpret_cast<const char*>(m.a.data()), std::streamsize(m.a.size() * 8));
  });
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  const uint32_t header_len = get_u32(in);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), header_len);
  const auto header = nlohmann::json::parse(header_text);
  if (header.at("format_version").get<int>() != kFormatVersion)
    throw std::runtime_error("unsupported checkpoint version in " + path);

  Checkpoint ckpt;
  ckpt.config = config_from_json(header.at("config").dump());
  ckpt.seed = header.at("seed").get<uint64_t>();
  ckpt.params = init_params(ckpt.config, 0);  // shapes, then overwritten below

  const auto& entries = header.at("params");
  size_t idx = 0;
  for_each_param(ckpt.params, [&](const std::string& name, nn::Mat& m) {
    if (idx >= entries.size()) throw std::runtime_error("checkpoint missing arrays: " + path);
    const auto& e = entries[idx++];
    if (e.at("name").get<std::string>() != name || e.at("rows").get<int>() != m.rows ||
        e.at("cols").get<int>() != m.cols)
      throw std::runtime_error("checkpoint array mismatch at '" + name + "' in " + path);
    in.read(reinterpret_cast<char*>(m.a.data()), std::streamsize(m.a.size() * 8));
  });
  if (idx != entries.size() || !in)
    throw std::runtime_error("checkpoint truncated or trailing arrays: " + path);
  return ckpt;
}

}  // namespace dnclab::dnc
