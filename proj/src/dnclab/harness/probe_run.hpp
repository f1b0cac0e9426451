#pragma once

#include <string>

#include "dnclab/harness/sweep.hpp"
#include "dnclab/probe/triple.hpp"

namespace dnclab::harness {

struct ProbeRunResult {
  bool found = false;
  std::string status;
  uint64_t saa_candidates_tried = 0;
};

// Run the CE/UAA/SAA search and, on success, persist traces/{ce,uaa,saa}.json
// plus report/comparison.json and the three report CSV tables under out_dir.
// A not-found search writes only a status file; it is not an error.
ProbeRunResult probe_run(const SweepContext& ctx, const meta::AttackSpec& spec,
                         const probe::TripleSearchConfig& search, uint64_t seed,
                         const std::string& out_dir);

}  // namespace dnclab::harness
