#include "dnclab/dnc/config.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace dnclab::dnc {

void DncConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v <= 0) throw std::invalid_argument(std::string("DncConfig: ") + name + " must be positive");
  };
  positive(input_size, "input_size");
  positive(output_size, "output_size");
  positive(memory_rows, "memory_rows");
  positive(memory_width, "memory_width");
  positive(read_heads, "read_heads");
  positive(ctrl_output, "ctrl_output");
  positive(hidden, "hidden");
  positive(layers, "layers");
}

DncConfig resize_memory(const DncConfig& config, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("resize_memory: factor must be > 0");
  const long n = std::lround(factor * config.memory_rows);
  if (n < 1) throw std::invalid_argument("resize_memory: resulting memory has no rows");
  DncConfig out = config;
  out.memory_rows = int(n);
  return out;
}

std::string config_to_json(const DncConfig& c) {
  nlohmann::json js;
  js["input_size"] = c.input_size;
  js["output_size"] = c.output_size;
  js["memory_rows"] = c.memory_rows;
  js["memory_width"] = c.memory_width;
  js["read_heads"] = c.read_heads;
  js["ctrl_output"] = c.ctrl_output;
  js["hidden"] = c.hidden;
  js["layers"] = c.layers;
  js["bidirectional"] = c.bidirectional;
  js["layer_norm"] = c.layer_norm;
  return js.dump();
}

DncConfig config_from_json(const std::string& json_text) {
  const auto js = nlohmann::json::parse(json_text);
  DncConfig c;
  c.input_size = js.at("input_size").get<int>();
  c.output_size = js.at("output_size").get<int>();
  c.memory_rows = js.at("memory_rows").get<int>();
  c.memory_width = js.at("memory_width").get<int>();
  c.read_heads = js.at("read_heads").get<int>();
  c.ctrl_output = js.at("ctrl_output").get<int>();
  c.hidden = js.at("hidden").get<int>();
  c.layers = js.at("layers").get<int>();
  c.bidirectional = js.at("bidirectional").get<bool>();
  c.layer_norm = js.value("layer_norm", true);
  c.validate();
  return c;
}

}  // namespace dnclab::dnc
