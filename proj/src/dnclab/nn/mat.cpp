#include "dnclab/nn/mat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dnclab::nn {

namespace {
std::string shape_str(const Mat& m) {
  return "(" + std::to_string(m.rows) + "x" + std::to_string(m.cols) + ")";
}
}  // namespace

void shape_error(const std::string& op, const Mat& a) {
  throw std::invalid_argument(op + ": bad shape " + shape_str(a));
}

void shape_error(const std::string& op, const Mat& a, const Mat& b) {
  throw std::invalid_argument(op + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Mat m(int(rows.size()), rows.size() ? int(rows.begin()->size()) : 0);
  int r = 0;
  for (const auto& row : rows) {
    if (int(row.size()) != m.cols) throw std::invalid_argument("from_rows: ragged rows");
    int c = 0;
    for (double x : row) m.at(r, c++) = x;
    ++r;
  }
  return m;
}

double Mat::item() const {
  if (size() != 1) shape_error("item", *this);
  return a[0];
}

bool Mat::all_finite() const {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

Mat add(const Mat& a, const Mat& b) {
  if (!a.same_shape(b)) shape_error("add", a, b);
  Mat r = a;
  for (int i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

Mat sub(const Mat& a, const Mat& b) {
  if (!a.same_shape(b)) shape_error("sub", a, b);
  Mat r = a;
  for (int i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

Mat emul(const Mat& a, const Mat& b) {
  if (!a.same_shape(b)) shape_error("emul", a, b);
  Mat r = a;
  for (int i = 0; i < r.size(); ++i) r[i] *= b[i];
  return r;
}

Mat ediv(const Mat& a, const Mat& b) {
  if (!a.same_shape(b)) shape_error("ediv", a, b);
  Mat r = a;
  for (int i = 0; i < r.size(); ++i) r[i] /= b[i];
  return r;
}

Mat scale(const Mat& a, double c) {
  Mat r = a;
  for (double& x : r.a) x *= c;
  return r;
}

Mat addc(const Mat& a, double c) {
  Mat r = a;
  for (double& x : r.a) x += c;
  return r;
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols != b.rows) shape_error("matmul", a, b);
  Mat r(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      const double* brow = &b.a[size_t(k) * b.cols];
      double* rrow = &r.a[size_t(i) * r.cols];
      for (int j = 0; j < b.cols; ++j) rrow[j] += aik * brow[j];
    }
  }
  return r;
}

Mat transpose(const Mat& a) {
  Mat r(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r.at(j, i) = a.at(i, j);
  return r;
}

Mat sigmoid(const Mat& a) {
  Mat r = a;
  for (double& x : r.a) x = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  return r;
}

Mat tanh_m(const Mat& a) {
  Mat r = a;
  for (double& x : r.a) x = std::tanh(x);
  return r;
}

Mat softplus(const Mat& a) {
  Mat r = a;
  // log(1+e^x) without overflow for large |x|
  for (double& x : r.a) x = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return r;
}

Mat sqrt_m(const Mat& a) {
  Mat r = a;
  for (double& x : r.a) x = std::sqrt(x);
  return r;
}

Mat rowsum(const Mat& a) {
  Mat r(a.rows, 1);
  for (int i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols; ++j) s += a.at(i, j);
    r[i] = s;
  }
  return r;
}

Mat sum(const Mat& a) {
  double s = 0.0;
  for (double x : a.a) s += x;
  return Mat::scalar(s);
}

Mat softmax(const Mat& v) {
  if (!v.is_colvec() || v.rows == 0) shape_error("softmax", v);
  Mat r = v;
  double mx = r[0];
  for (double x : r.a) mx = std::max(mx, x);
  double z = 0.0;
  for (double& x : r.a) {
    x = std::exp(x - mx);
    z += x;
  }
  for (double& x : r.a) x /= z;
  return r;
}

Mat vcat(const std::vector<Mat>& parts) {
  int n = 0;
  for (const Mat& p : parts) {
    if (!p.is_colvec()) shape_error("vcat", p);
    n += p.rows;
  }
  Mat r(n, 1);
  int off = 0;
  for (const Mat& p : parts) {
    std::copy(p.a.begin(), p.a.end(), r.a.begin() + off);
    off += p.rows;
  }
  return r;
}

Mat slice(const Mat& v, int offset, int len) {
  if (!v.is_colvec() || offset < 0 || len < 0 || offset + len > v.rows) shape_error("slice", v);
  Mat r(len, 1);
  std::copy(v.a.begin() + offset, v.a.begin() + offset + len, r.a.begin());
  return r;
}

Mat outer(const Mat& u, const Mat& v) {
  if (!u.is_colvec() || !v.is_colvec()) shape_error("outer", u, v);
  Mat r(u.rows, v.rows);
  for (int i = 0; i < u.rows; ++i)
    for (int j = 0; j < v.rows; ++j) r.at(i, j) = u[i] * v[j];
  return r;
}

Mat smul(const Mat& a, const Mat& s) {
  return scale(a, s.item());
}

Mat sdiv(const Mat& a, const Mat& s) {
  return scale(a, 1.0 / s.item());
}

Mat sadd(const Mat& a, const Mat& s) {
  return addc(a, s.item());
}

Mat dot(const Mat& u, const Mat& v) {
  if (!u.same_shape(v) || !u.is_colvec()) shape_error("dot", u, v);
  double s = 0.0;
  for (int i = 0; i < u.rows; ++i) s += u[i] * v[i];
  return Mat::scalar(s);
}

Mat alloc_weight(const Mat& usage) {
  if (!usage.is_colvec()) shape_error("alloc_weight", usage);
  const int n = usage.rows;
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  // ascending usage, ties broken by lower index
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return usage[i] < usage[j]; });
  Mat r(n, 1);
  double prod = 1.0;
  for (int j = 0; j < n; ++j) {
    const int idx = order[j];
    r[idx] = (1.0 - usage[idx]) * prod;
    prod *= usage[idx];
  }
  return r;
}

int argmax(const Mat& v) {
  if (!v.is_colvec() || v.rows == 0) shape_error("argmax", v);
  int best = 0;
  for (int i = 1; i < v.rows; ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

double l2_norm(const Mat& m) {
  double s = 0.0;
  for (double x : m.a) s += x * x;
  return std::sqrt(s);
}

double max_abs(const Mat& m) {
  double s = 0.0;
  for (double x : m.a) s = std::max(s, std::fabs(x));
  return s;
}

}  // namespace dnclab::nn
