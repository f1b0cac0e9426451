#include "dnclab/harness/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace dnclab::harness {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("fmt");
  return std::string(buf, end);
}

int count_order(const std::string& num_sentences) {
  if (num_sentences == "full") return 1 << 20;
  return std::stoi(num_sentences);
}

}  // namespace

std::string attack_pivot_csv(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("attack_pivot_csv: empty input");
  std::set<std::string> counts_seen;
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::pair<double, int>>> grid;
  std::string target = rows.front().target_task;
  double clean = -1.0;
  for (const ResultRow& r : rows) {
    if (r.status != "ok") continue;
    if (r.position == "clean") {
      clean = r.wer;
      continue;
    }
    counts_seen.insert(r.num_sentences);
    auto& cell = grid[{r.source_task, r.position}][r.num_sentences];
    cell.first += r.wer;
    cell.second += 1;
  }
  if (grid.empty() && clean < 0) throw std::invalid_argument("attack_pivot_csv: no usable rows");

  std::vector<std::string> counts(counts_seen.begin(), counts_seen.end());
  std::sort(counts.begin(), counts.end(),
            [](const std::string& a, const std::string& b) { return count_order(a) < count_order(b); });

  std::string out = "target,source,position";
  for (const std::string& c : counts) out += ",l=" + c;
  out += "\n";
  if (clean >= 0) {
    out += target + ",none,clean";
    for (size_t i = 0; i < counts.size(); ++i) out += i == 0 ? "," + fmt(clean) : ",";
    out += "\n";
  }
  for (const auto& [key, cells] : grid) {
    out += target + ',' + key.first + ',' + key.second;
    for (const std::string& c : counts) {
      auto it = cells.find(c);
      out += ',';
      if (it != cells.end()) out += fmt(it->second.first / it->second.second);
    }
    out += "\n";
  }
  return out;
}

std::string mem_curve_csv(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("mem_curve_csv: empty input");
  std::map<double, std::pair<double, std::pair<double, int>>> by_factor;  // clean, (attacked sum, n)
  for (const ResultRow& r : rows) {
    if (r.status != "ok") continue;
    auto& slot = by_factor[r.memory_factor];
    if (r.position == "clean")
      slot.first = r.wer;
    else {
      slot.second.first += r.wer;
      slot.second.second += 1;
    }
  }
  std::string out = "memory_factor,clean_wer,attacked_wer\n";
  for (const auto& [factor, v] : by_factor) {
    out += fmt(factor) + ',' + fmt(v.first) + ',';
    if (v.second.second > 0) out += fmt(v.second.first / v.second.second);
    out += "\n";
  }
  return out;
}

std::string cosine_table_csv(const probe::ComparisonReport& report) {
  if (report.cosines.empty()) throw std::invalid_argument("cosine_table_csv: empty report");
  std::string out = "signal,pair,story,adversary,question\n";
  std::vector<std::pair<std::string, std::string>> keys;  // (signal, pair) in first-seen order
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> cells;
  for (const probe::VectorEntry& e : report.cosines) {
    const auto key = std::make_pair(e.signal, e.pair);
    if (!cells.count(key)) keys.push_back(key);
    cells[key][e.segment] = e.mean_cosine;
  }
  for (const auto& key : keys) {
    const auto& segs = cells.at(key);
    out += key.first + ',' + key.second;
    for (const char* seg : {"story", "adversary", "question"}) {
      out += ',';
      auto it = segs.find(seg);
      out += it == segs.end() ? "-" : fmt(it->second);
    }
    out += "\n";
  }
  return out;
}

std::string kl_table_csv(const probe::ComparisonReport& report) {
  if (report.kls.empty()) throw std::invalid_argument("kl_table_csv: empty report");
  std::string out = "signal,pair,direction,story,adversary,question\n";
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::pair<double, double>>>
      cells;
  for (const probe::GateEntry& e : report.kls) {
    const auto key = std::make_pair(e.signal, e.pair);
    if (!cells.count(key)) keys.push_back(key);
    cells[key][e.segment] = {e.kl_forward, e.kl_backward};
  }
  for (const auto& key : keys) {
    const auto& segs = cells.at(key);
    for (int dir = 0; dir < 2; ++dir) {
      out += key.first + ',' + key.second + ',' + (dir == 0 ? "forward" : "backward");
      for (const char* seg : {"story", "adversary", "question"}) {
        out += ',';
        auto it = segs.find(seg);
        if (it == segs.end())
          out += "-";
        else
          out += fmt(dir == 0 ? it->second.first : it->second.second);
      }
      out += "\n";
    }
  }
  return out;
}

std::string series_csv(const probe::ComparisonReport& report) {
  if (report.cosines.empty()) throw std::invalid_argument("series_csv: empty report");
  std::string out = "signal,pair,segment,step,cosine\n";
  for (const probe::VectorEntry& e : report.cosines)
    for (size_t t = 0; t < e.per_step.size(); ++t)
      out += e.signal + ',' + e.pair + ',' + e.segment + ',' + std::to_string(t) + ',' +
             fmt(e.per_step[t]) + '\n';
  return out;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("spearman: need two equal series of length >= 2");
  auto ranks = [](const std::vector<double>& v) {
    const size_t n = v.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    size_t i = 0;
    while (i < n) {
      size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (double(i) + double(j)) / 2.0 + 1.0;  // average rank for ties
      for (size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(xs);
  const auto ry = ranks(ys);
  double mx = 0, my = 0;
  for (size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= double(rx.size());
  my /= double(ry.size());
  double cov = 0, vx = 0, vy = 0;
  for (size_t i = 0; i < rx.size(); ++i) {
    cov += (rx[i] - mx) * (ry[i] - my);
    vx += (rx[i] - mx) * (rx[i] - mx);
    vy += (ry[i] - my) * (ry[i] - my);
  }
  if (vx == 0 || vy == 0) return 0.0;  // a constant series carries no ordering signal
  return cov / std::sqrt(vx * vy);
}

}  // namespace dnclab::harness
