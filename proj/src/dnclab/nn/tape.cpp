#include "dnclab/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dnclab::nn {

Var Tape::leaf(Mat value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  nodes_.push_back(std::move(n));
  return Var{this, int(nodes_.size()) - 1};
}

Var Tape::make(Mat value, std::vector<int> parents, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  n.parents = std::move(parents);
  n.backward = std::move(fn);
  for (int p : n.parents)
    if (nodes_[p].requires_grad) n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var{this, int(nodes_.size()) - 1};
}

const Mat& Tape::grad(const Var& v) const {
  if (v.id < 0 || size_t(v.id) >= grads_.size()) throw std::logic_error("grad before backward");
  return grads_[v.id];
}

void Tape::backward(const Var& scalar_loss) {
  if (scalar_loss.tape != this) throw std::logic_error("backward: var from another tape");
  const Mat& l = nodes_[scalar_loss.id].value;
  if (l.size() != 1) throw std::invalid_argument("backward: loss must be 1x1");
  grads_.assign(nodes_.size(), Mat());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].requires_grad) grads_[i] = Mat(nodes_[i].value.rows, nodes_[i].value.cols);
  }
  if (!nodes_[scalar_loss.id].requires_grad)
    throw std::logic_error("backward: loss does not depend on any trainable leaf");
  grads_[scalar_loss.id][0] = 1.0;
  for (int i = scalar_loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward) continue;
    n.backward(*this, i);
  }
}

namespace {

// Accumulate src into the grad slot of node `id` if it participates in the
// backward pass.
void acc(Tape& t, int id, const Mat& src) {
  if (!t.requires_grad(id)) return;
  Mat& g = t.grad_ref(id);
  for (int i = 0; i < src.size(); ++i) g[i] += src[i];
}

Tape* same_tape(const Var& a, const Var& b) {
  if (a.tape != b.tape) throw std::logic_error("op: vars from different tapes");
  return a.tape;
}

}  // namespace

Var add(const Var& a, const Var& b) {
  Tape* t = same_tape(a, b);
  int ia = a.id, ib = b.id;
  return t->make(add(a.val(), b.val()), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    acc(t, ia, g);
    acc(t, ib, g);
  });
}

Var sub(const Var& a, const Var& b) {
  Tape* t = same_tape(a, b);
  int ia = a.id, ib = b.id;
  return t->make(sub(a.val(), b.val()), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    acc(t, ia, g);
    acc(t, ib, scale(g, -1.0));
  });
}

Var emul(const Var& a, const Var& b) {
  Tape* t = same_tape(a, b);
  int ia = a.id, ib = b.id;
  return t->make(emul(a.val(), b.val()), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    acc(t, ia, emul(g, t.value(ib)));
    acc(t, ib, emul(g, t.value(ia)));
  });
}

Var ediv(const Var& a, const Var& b) {
  Tape* t = same_tape(a, b);
  int ia = a.id, ib = b.id;
  return t->make(ediv(a.val(), b.val()), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    const Mat& bv = t.value(ib);
    acc(t, ia, ediv(g, bv));
    Mat gb = emul(g, t.value(self));  // g * (a/b)
    for (int i = 0; i < gb.size(); ++i) gb[i] = -gb[i] / bv[i];
    acc(t, ib, gb);
  });
}

Var scale(const Var& a, double c) {
  int ia = a.id;
  return a.tape->make(scale(a.val(), c), {ia}, [ia, c](Tape& t, int self) {
    acc(t, ia, scale(t.grad_ref(self), c));
  });
}

Var addc(const Var& a, double c) {
  int ia = a.id;
  return a.tape->make(addc(a.val(), c), {ia}, [ia](Tape& t, int self) {
    acc(t, ia, t.grad_ref(self));
  });
}

Var matmul(const Var& a, const Var& b) {
  Tape* t = same_tape(a, b);
  int ia = a.id, ib = b.id;
  return t->make(matmul(a.val(), b.val()), {ia, ib}, [ia, ib](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    if (t.requires_grad(ia)) acc(t, ia, matmul(g, transpose(t.value(ib))));
    if (t.requires_grad(ib)) acc(t, ib, matmul(transpose(t.value(ia)), g));
  });
}

Var transpose(const Var& a) {
  int ia = a.id;
  return a.tape->make(transpose(a.val()), {ia}, [ia](Tape& t, int self) {
    acc(t, ia, transpose(t.grad_ref(self)));
  });
}

Var sigmoid(const Var& a) {
  int ia = a.id;
  return a.tape->make(sigmoid(a.val()), {ia}, [ia](Tape& t, int self) {
    const Mat& y = t.value(self);
    Mat g = t.grad_ref(self);
    for (int i = 0; i < g.size(); ++i) g[i] *= y[i] * (1.0 - y[i]);
    acc(t, ia, g);
  });
}

Var tanh_m(const Var& a) {
  int ia = a.id;
  return a.tape->make(tanh_m(a.val()), {ia}, [ia](Tape& t, int self) {
    const Mat& y = t.value(self);
    Mat g = t.grad_ref(self);
    for (int i = 0; i < g.size(); ++i) g[i] *= 1.0 - y[i] * y[i];
    acc(t, ia, g);
  });
}

Var softplus(const Var& a) {
  int ia = a.id;
  return a.tape->make(softplus(a.val()), {ia}, [ia](Tape& t, int self) {
    Mat g = emul(t.grad_ref(self), sigmoid(t.value(ia)));
    acc(t, ia, g);
  });
}

Var sqrt_m(const Var& a) {
  int ia = a.id;
  return a.tape->make(sqrt_m(a.val()), {ia}, [ia](Tape& t, int self) {
    const Mat& y = t.value(self);
    Mat g = t.grad_ref(self);
    // clamp avoids the infinite derivative at exactly 0 (all-zero memory rows)
    for (int i = 0; i < g.size(); ++i) g[i] /= 2.0 * std::max(y[i], 1e-12);
    acc(t, ia, g);
  });
}

Var rowsum(const Var& a) {
  int ia = a.id;
  return a.tape->make(rowsum(a.val()), {ia}, [ia](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    const Mat& av = t.value(ia);
    Mat ga(av.rows, av.cols);
    for (int i = 0; i < av.rows; ++i)
      for (int j = 0; j < av.cols; ++j) ga.at(i, j) = g[i];
    acc(t, ia, ga);
  });
}

Var sum(const Var& a) {
  int ia = a.id;
  return a.tape->make(sum(a.val()), {ia}, [ia](Tape& t, int self) {
    const double g = t.grad_ref(self)[0];
    const Mat& av = t.value(ia);
    acc(t, ia, Mat(av.rows, av.cols, g));
  });
}

Var softmax(const Var& v) {
  int iv = v.id;
  return v.tape->make(softmax(v.val()), {iv}, [iv](Tape& t, int self) {
    const Mat& y = t.value(self);
    const Mat& g = t.grad_ref(self);
    double gy = 0.0;
    for (int i = 0; i < y.rows; ++i) gy += g[i] * y[i];
    Mat gv(y.rows, 1);
    for (int i = 0; i < y.rows; ++i) gv[i] = y[i] * (g[i] - gy);
    acc(t, iv, gv);
  });
}

Var vcat(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("vcat: empty");
  Tape* t = parts[0].tape;
  std::vector<int> ids;
  std::vector<Mat> vals;
  for (const Var& p : parts) {
    same_tape(parts[0], p);
    ids.push_back(p.id);
    vals.push_back(p.val());
  }
  return t->make(vcat(vals), ids, [ids](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    int off = 0;
    for (int id : ids) {
      const int n = t.value(id).rows;
      acc(t, id, slice(g, off, n));
      off += n;
    }
  });
}

Var slice(const Var& v, int offset, int len) {
  int iv = v.id;
  return v.tape->make(slice(v.val(), offset, len), {iv}, [iv, offset, len](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    if (!t.requires_grad(iv)) return;
    Mat& gv = t.grad_ref(iv);
    for (int i = 0; i < len; ++i) gv[offset + i] += g[i];
  });
}

Var outer(const Var& u, const Var& v) {
  Tape* t = same_tape(u, v);
  int iu = u.id, iv = v.id;
  return t->make(outer(u.val(), v.val()), {iu, iv}, [iu, iv](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    if (t.requires_grad(iu)) acc(t, iu, matmul(g, t.value(iv)));
    if (t.requires_grad(iv)) acc(t, iv, matmul(transpose(g), t.value(iu)));
  });
}

Var smul(const Var& a, const Var& s) {
  Tape* t = same_tape(a, s);
  int ia = a.id, is = s.id;
  return t->make(smul(a.val(), s.val()), {ia, is}, [ia, is](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    const double sv = t.value(is)[0];
    acc(t, ia, scale(g, sv));
    if (t.requires_grad(is)) {
      const Mat& av = t.value(ia);
      double gs = 0.0;
      for (int i = 0; i < g.size(); ++i) gs += g[i] * av[i];
      t.grad_ref(is)[0] += gs;
    }
  });
}

Var sdiv(const Var& a, const Var& s) {
  Tape* t = same_tape(a, s);
  int ia = a.id, is = s.id;
  return t->make(sdiv(a.val(), s.val()), {ia, is}, [ia, is](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    const double sv = t.value(is)[0];
    acc(t, ia, scale(g, 1.0 / sv));
    if (t.requires_grad(is)) {
      const Mat& yv = t.value(self);
      double gs = 0.0;
      for (int i = 0; i < g.size(); ++i) gs += g[i] * yv[i];
      t.grad_ref(is)[0] += -gs / sv;
    }
  });
}

Var sadd(const Var& a, const Var& s) {
  Tape* t = same_tape(a, s);
  int ia = a.id, is = s.id;
  return t->make(sadd(a.val(), s.val()), {ia, is}, [ia, is](Tape& t, int self) {
    const Mat& g = t.grad_ref(self);
    acc(t, ia, g);
    if (t.requires_grad(is)) {
      double gs = 0.0;
      for (int i = 0; i < g.size(); ++i) gs += g[i];
      t.grad_ref(is)[0] += gs;
    }
  });
}

Var dot(const Var& u, const Var& v) {
  Tape* t = same_tape(u, v);
  int iu = u.id, iv = v.id;
  return t->make(dot(u.val(), v.val()), {iu, iv}, [iu, iv](Tape& t, int self) {
    const double g = t.grad_ref(self)[0];
    acc(t, iu, scale(t.value(iv), g));
    acc(t, iv, scale(t.value(iu), g));
  });
}

Var alloc_weight(const Var& usage) {
  int iu = usage.id;
  return usage.tape->make(alloc_weight(usage.val()), {iu}, [iu](Tape& t, int self) {
    if (!t.requires_grad(iu)) return;
    const Mat& u = t.value(iu);
    const Mat& g = t.grad_ref(self);
    const int n = u.rows;
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return u[i] < u[j]; });
    // sorted-domain values and exclusive prefix products
    std::vector<double> us(n), gs(n), pre(n);
    for (int j = 0; j < n; ++j) {
      us[j] = u[order[j]];
      gs[j] = g[order[j]];
    }
    double prod = 1.0;
    for (int j = 0; j < n; ++j) {
      pre[j] = prod;
      prod *= us[j];
    }
    // a_j = (1-u_j) * pre_j in sorted coordinates; O(n^2) accumulation
    // avoids dividing by possibly-zero usage entries.
    std::vector<double> gu(n, 0.0);
    for (int k = 0; k < n; ++k) {
      gu[k] -= gs[k] * pre[k];
      double run = pre[k];  // prod_{i<j, i!=k} u_i for j = k+1
      for (int j = k + 1; j < n; ++j) {
        gu[k] += gs[j] * (1.0 - us[j]) * run;
        run *= us[j];
      }
    }
    Mat& dst = t.grad_ref(iu);
    for (int j = 0; j < n; ++j) dst[order[j]] += gu[j];
  });
}

Var ce_with_logits(const Var& logits, int target) {
  int il = logits.id;
  const Mat& y = logits.val();
  if (!y.is_colvec()) shape_error("ce_with_logits", y);
  if (target < 0 || target >= y.rows) throw std::out_of_range("ce_with_logits: target");
  double mx = y[0];
  for (double x : y.a) mx = std::max(mx, x);
  double z = 0.0;
  for (double x : y.a) z += std::exp(x - mx);
  const double loss = std::log(z) + mx - y[target];
  return logits.tape->make(Mat::scalar(loss), {il}, [il, target](Tape& t, int self) {
    const double g = t.grad_ref(self)[0];
    Mat p = softmax(t.value(il));
    p[target] -= 1.0;
    acc(t, il, scale(p, g));
  });
}

}  // namespace dnclab::nn
