#pragma once

#include <string>
#include <vector>

#include "dnclab/harness/sweep.hpp"
#include "dnclab/probe/compare.hpp"

namespace dnclab::harness {

// Attack grid pivot: one row per (source, position), one column per
// sentence count plus the full block, cells averaged over seeds. Errors on
// empty input.
std::string attack_pivot_csv(const std::vector<ResultRow>& rows);

// Memory sweep curve: factor, clean wer, attacked wer (mean over seeds).
std::string mem_curve_csv(const std::vector<ResultRow>& rows);

// Mean cosine table for keys/vectors (pairs x segments), '-' where a clean
// pair has no adversary segment.
std::string cosine_table_csv(const probe::ComparisonReport& report);

// Both KL directions per gate and segment.
std::string kl_table_csv(const probe::ComparisonReport& report);

// Per-step cosine series, long format, for plotting.
std::string series_csv(const probe::ComparisonReport& report);

// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace dnclab::harness
