#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace dnclab::nn {

// Dense row-major matrix of doubles. Column vectors are (n x 1).
// All model math runs in double precision.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(size_t(r) * c, fill) {}

  static Mat colvec(std::vector<double> v) {
    Mat m;
    m.rows = int(v.size());
    m.cols = 1;
    m.a = std::move(v);
    return m;
  }
  static Mat scalar(double x) { return colvec({x}); }
  static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows);

  double& at(int r, int c) { return a[size_t(r) * cols + c]; }
  double at(int r, int c) const { return a[size_t(r) * cols + c]; }
  double& operator[](size_t i) { return a[i]; }
  double operator[](size_t i) const { return a[i]; }
  int size() const { return rows * cols; }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
  bool is_colvec() const { return cols == 1; }
  double item() const;  // requires 1x1
  bool all_finite() const;
};

[[noreturn]] void shape_error(const std::string& op, const Mat& a);
[[noreturn]] void shape_error(const std::string& op, const Mat& a, const Mat& b);

// Plain-engine ops. These mirror the tape ops in tape.hpp so that code
// templated on the value type runs identically with and without gradients.
Mat add(const Mat& a, const Mat& b);
Mat sub(const Mat& a, const Mat& b);
Mat emul(const Mat& a, const Mat& b);
Mat ediv(const Mat& a, const Mat& b);
Mat scale(const Mat& a, double c);
Mat addc(const Mat& a, double c);
Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
Mat sigmoid(const Mat& a);
Mat tanh_m(const Mat& a);
Mat softplus(const Mat& a);
Mat sqrt_m(const Mat& a);
Mat rowsum(const Mat& a);             // (n x m) -> (n x 1)
Mat sum(const Mat& a);                // -> 1x1
Mat softmax(const Mat& v);            // column vector -> simplex column vector
Mat vcat(const std::vector<Mat>& parts);  // stack column vectors
Mat slice(const Mat& v, int offset, int len);  // column vector slice
Mat outer(const Mat& u, const Mat& v);         // (n x 1) x (m x 1) -> (n x m)
Mat smul(const Mat& a, const Mat& s);          // a * scalar(1x1)
Mat sdiv(const Mat& a, const Mat& s);          // a / scalar(1x1)
Mat sadd(const Mat& a, const Mat& s);          // a + scalar(1x1) broadcast
Mat dot(const Mat& u, const Mat& v);           // -> 1x1
Mat alloc_weight(const Mat& usage);            // allocation weighting, see tape.cpp

// Plain helpers (no tape counterpart needed).
inline const Mat& values(const Mat& m) { return m; }
int argmax(const Mat& v);  // column vector, ties -> lowest index
double l2_norm(const Mat& m);
double max_abs(const Mat& m);

}  // namespace dnclab::nn
