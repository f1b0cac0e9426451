#pragma once

#include <functional>
#include <vector>

#include "dnclab/nn/mat.hpp"

namespace dnclab::nn {

class Tape;

// Handle to a node on a Tape. Cheap to copy. Forward values are computed
// eagerly when ops are built, so val() is always available.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Mat& val() const;
};

// Reverse-mode autodiff tape over Mat. The op set mirrors the plain Mat
// functions in mat.hpp; DNC code is templated on the value type so the
// same source runs as plain inference (Mat) or as a differentiable graph
// (Var). backward() walks nodes in reverse creation order.
class Tape {
 public:
  Var leaf(Mat value, bool requires_grad);
  Var constant(Mat value) { return leaf(std::move(value), false); }

  void backward(const Var& scalar_loss);
  const Mat& value(int id) const { return nodes_[id].value; }
  const Mat& grad(const Var& v) const;
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }

  size_t size() const { return nodes_.size(); }

  // Internal: build a node from parents. backward_fn receives the tape and
  // the node's own id; it must accumulate into parents' grads.
  using BackwardFn = std::function<void(Tape&, int)>;
  Var make(Mat value, std::vector<int> parents, BackwardFn fn);
  Mat& grad_ref(int id) { return grads_[id]; }

 private:
  struct Node {
    Mat value;
    std::vector<int> parents;
    BackwardFn backward;
    bool requires_grad = false;
  };
  std::vector<Node> nodes_;
  std::vector<Mat> grads_;
  friend struct Var;
};

inline const Mat& Var::val() const { return tape->value(id); }
inline const Mat& values(const Var& v) { return v.val(); }

// Tape counterparts of the mat.hpp ops.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var emul(const Var& a, const Var& b);
Var ediv(const Var& a, const Var& b);
Var scale(const Var& a, double c);
Var addc(const Var& a, double c);
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var sigmoid(const Var& a);
Var tanh_m(const Var& a);
Var softplus(const Var& a);
Var sqrt_m(const Var& a);
Var rowsum(const Var& a);
Var sum(const Var& a);
Var softmax(const Var& v);
Var vcat(const std::vector<Var>& parts);
Var slice(const Var& v, int offset, int len);
Var outer(const Var& u, const Var& v);
Var smul(const Var& a, const Var& s);
Var sdiv(const Var& a, const Var& s);
Var sadd(const Var& a, const Var& s);
Var dot(const Var& u, const Var& v);
Var alloc_weight(const Var& usage);

// Mean softmax cross-entropy against integer targets, numerically stable.
// Only exists on the tape engine; the loss is where gradients start.
Var ce_with_logits(const Var& logits, int target);

}  // namespace dnclab::nn
