// Copyright 2026 The embattack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>

#include "embattack/error.hpp"
#include "embattack/random.hpp"

namespace embattack {

// Rank-k factors M ≈ U diag(sigma) V^T with sigma descending.
struct TruncatedSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd v;
};

struct SvdOptions {
  // Matrices up to this size go through an exact SVD.
  Eigen::Index exact_up_to = 256;
  Eigen::Index oversampling = 30;
  int power_iterations = 8;
  // Fixed so the factorization is a deterministic function of the input.
  std::uint64_t sketch_seed = 0x5eed5eedULL;
};

namespace detail {

inline Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

}  // namespace detail

// Exact for small inputs; otherwise a randomized range finder with power
// iterations followed by an SVD of the projected k+p row matrix.
inline TruncatedSvd truncated_svd(const Eigen::MatrixXd& m, Eigen::Index k,
                                  const SvdOptions& opt = {}) {
  const Eigen::Index rows = m.rows(), cols = m.cols();
  if (k < 1 || k > std::min(rows, cols)) {
    throw ParameterError("truncated_svd: rank " + std::to_string(k) + " outside [1, " +
                         std::to_string(std::min(rows, cols)) + "]");
  }
  TruncatedSvd out;
  if (std::max(rows, cols) <= opt.exact_up_to ||
      k + opt.oversampling >= std::min(rows, cols)) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.u = svd.matrixU().leftCols(k);
    out.sigma = svd.singularValues().head(k);
    out.v = svd.matrixV().leftCols(k);
    return out;
  }

  const Eigen::Index l = k + opt.oversampling;
  Rng rng(opt.sketch_seed);
  Eigen::MatrixXd omega(cols, l);
  for (Eigen::Index j = 0; j < l; ++j) {
    for (Eigen::Index i = 0; i < cols; ++i) omega(i, j) = uniform_real(rng, -1.0, 1.0);
  }
  Eigen::MatrixXd q = detail::orthonormal_basis(m * omega);
  for (int it = 0; it < opt.power_iterations; ++it) {
    Eigen::MatrixXd z = detail::orthonormal_basis(m.transpose() * q);
    q = detail::orthonormal_basis(m * z);
  }
  Eigen::MatrixXd b = q.transpose() * m;  // l x cols
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = q * svd.matrixU().leftCols(k);
  out.sigma = svd.singularValues().head(k);
  out.v = svd.matrixV().leftCols(k);
  return out;
}

}  // namespace embattack
