#pragma once

#include <cstdint>
#include <string>

#include "dnclab/dnc/params.hpp"

namespace dnclab::dnc {

// Versioned checkpoint container; layout documented in
// docs/checkpoint_format.md so other implementations can read and write it.
//   magic "DNCKPT01" | u32 header length | header JSON | raw float64 LE
// The header carries {format_version, config, params:[{name,rows,cols}],
// seed}; arrays follow in header order, which equals for_each_param order.
struct Checkpoint {
  DncConfig config;
  DncParams params;
  uint64_t seed = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace dnclab::dnc
