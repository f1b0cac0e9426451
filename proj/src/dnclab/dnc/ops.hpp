#pragma once

#include <vector>

#include "dnclab/dnc/config.hpp"
#include "dnclab/nn/mat.hpp"
#include "dnclab/nn/tape.hpp"

// Memory addressing and update operations, written once against the value
// type V: nn::Mat runs them plainly (inference, unit tests), nn::Var runs
// them on the tape (training). values(v) yields the concrete Mat either way.

namespace dnclab::dnc {

// epsilon added to norms so all-zero rows (the initial memory) read as
// cosine 0 instead of 0/0
inline constexpr double kCosineEps = 1e-6;

inline nn::Mat constant_like(const nn::Mat&, nn::Mat value) { return value; }
inline nn::Var constant_like(const nn::Var& sibling, nn::Mat value) {
  return sibling.tape->constant(std::move(value));
}

// softmax over strength-scaled cosine similarity of each memory row to key.
// memory: N x W, key: W x 1, strength: 1x1 (>= 1 after oneplus).
template <class V>
V content_address(const V& memory, const V& key, const V& strength) {
  auto dots = matmul(memory, key);                     // N x 1
  auto row_norm = sqrt_m(rowsum(emul(memory, memory)));  // N x 1
  auto key_norm = sqrt_m(sum(emul(key, key)));           // 1 x 1
  auto denom = smul(addc(row_norm, kCosineEps), addc(key_norm, kCosineEps));
  auto cosines = ediv(dots, denom);
  return softmax(smul(cosines, strength));
}

// retention psi = prod_r (1 - free_r * prev_read_r); usage' =
// (usage + prev_write - usage o prev_write) o psi
template <class V>
V update_usage(const V& usage, const V& prev_write_weighting,
               const std::vector<V>& prev_read_weightings, const V& free_gates) {
  V psi = addc(scale(smul(prev_read_weightings[0], slice(free_gates, 0, 1)), -1.0), 1.0);
  for (size_t r = 1; r < prev_read_weightings.size(); ++r) {
    auto factor =
        addc(scale(smul(prev_read_weightings[r], slice(free_gates, int(r), 1)), -1.0), 1.0);
    psi = emul(psi, factor);
  }
  auto after_write = sub(add(usage, prev_write_weighting), emul(usage, prev_write_weighting));
  return emul(after_write, psi);
}

// allocation_weighting lives in nn:: (alloc_weight) because its sorted
// backward is a fused tape op; re-export under the domain name.
template <class V>
V allocation_weighting(const V& usage) {
  return alloc_weight(usage);
}

template <class V>
V write_weighting(const V& content_w, const V& alloc_w, const V& allocation_gate,
                  const V& write_gate) {
  auto one_minus_gate = addc(scale(allocation_gate, -1.0), 1.0);
  auto mix = add(smul(alloc_w, allocation_gate), smul(content_w, one_minus_gate));
  return smul(mix, write_gate);
}

// M' = M o (1 - w e^T) + w v^T
template <class V>
V memory_write(const V& memory, const V& write_w, const V& erase_vector, const V& write_vector) {
  auto keep = addc(scale(outer(write_w, erase_vector), -1.0), 1.0);
  return add(emul(memory, keep), outer(write_w, write_vector));
}

template <class V>
struct ReadResult {
  std::vector<V> weightings;  // R of N x 1
  V read_vectors;             // P x 1, heads concatenated
};

// content-based read only; the temporal linkage mechanism is intentionally
// absent (dropped for QA tasks)
template <class V>
ReadResult<V> memory_read(const V& memory, const std::vector<V>& read_keys,
                          const V& read_strengths) {
  ReadResult<V> out;
  std::vector<V> vecs;
  auto memory_t = transpose(memory);
  for (size_t r = 0; r < read_keys.size(); ++r) {
    auto w = content_address(memory, read_keys[r], slice(read_strengths, int(r), 1));
    vecs.push_back(matmul(memory_t, w));
    out.weightings.push_back(std::move(w));
  }
  out.read_vectors = vcat(vecs);
  return out;
}

// y = W_v v + W_mu mu + b
template <class V>
V output_logits(const V& w_v, const V& w_mu, const V& bias, const V& ctrl_out, const V& read_vecs) {
  return add(add(matmul(w_v, ctrl_out), matmul(w_mu, read_vecs)), bias);
}

}  // namespace dnclab::dnc
