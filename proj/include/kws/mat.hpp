/* Copyright 2026 The kws-crnn Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef KWS_MAT_HPP_
#define KWS_MAT_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

namespace kws {

using Vec = std::vector<double>;

// Dense row-major matrix of doubles. All internal computation runs in double
// precision; narrowing to float happens only at serialization boundaries.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) {
    return data[i * cols + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }

  std::size_t size() const { return data.size(); }

  void fill(double v) {
    for (auto& x : data) x = v;
  }
};

// out = A * x. A is (rows x cols), x has cols entries, out gets rows entries.
inline void matvec(const Mat& a, const double* x, double* out) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* row = a.data.data() + i * a.cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
}

// out += A * x.
inline void matvec_acc(const Mat& a, const double* x, double* out) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* row = a.data.data() + i * a.cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
    out[i] += acc;
  }
}

// out += A^T * x. x has a.rows entries, out gets a.cols entries.
inline void matvec_t_acc(const Mat& a, const double* x, double* out) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* row = a.data.data() + i * a.cols;
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols; ++j) out[j] += row[j] * xi;
  }
}

// dA += u * v^T (outer product accumulation for weight gradients).
inline void outer_acc(Mat& da, const double* u, const double* v) {
  for (std::size_t i = 0; i < da.rows; ++i) {
    double* row = da.data.data() + i * da.cols;
    const double ui = u[i];
    for (std::size_t j = 0; j < da.cols; ++j) row[j] += ui * v[j];
  }
}

inline bool all_finite(const double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p[i])) return false;
  }
  return true;
}

}  // namespace kws

#endif  // KWS_MAT_HPP_
