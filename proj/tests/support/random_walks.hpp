#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "qmctree/opalg.hpp"
#include "qmctree/oqrw.hpp"

namespace qmctree::testing {

using Rng = std::mt19937_64;

inline Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = Complex(n(rng), n(rng));
  return m;
}

/// Columns form an orthonormal family: the thin Q factor of a Gaussian.
inline Matrix isometry(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, rows, cols));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

inline Matrix random_psd(Rng& rng, Eigen::Index dim, Eigen::Index rank) {
  const Matrix g = gaussian(rng, dim, rank);
  return g * g.adjoint();
}

inline Matrix random_density(Rng& rng, Eigen::Index dim) {
  Matrix rho = random_psd(rng, dim, dim);
  return rho / rho.trace().real();
}

/// Random orthogonal projection of rank 1..dim-1 (rank 0 and dim excluded).
inline Matrix random_projection(Rng& rng, Eigen::Index dim) {
  if (dim < 2) throw std::invalid_argument("random_projection needs dim >= 2");
  std::uniform_int_distribution<Eigen::Index> r(1, dim - 1);
  const Matrix q = isometry(rng, dim, r(rng));
  return q * q.adjoint();
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Valid walk: for every source j the stacked column (B_j^1; ...; B_j^n) is an
/// isometry, so sum_i B_j^i* B_j^i = 1. Initial blocks are full-rank with
/// total trace one.
inline WalkSpec random_walk(Rng& rng, std::size_t num_labels, std::size_t dim_internal) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < num_labels; ++i) labels.push_back(std::to_string(i + 1));
  WalkSpec spec = WalkSpec::zeros(labels, dim_internal);
  const auto d = static_cast<Eigen::Index>(dim_internal);
  const auto n = static_cast<Eigen::Index>(num_labels);
  for (std::size_t j = 0; j < num_labels; ++j) {
    const Matrix q = isometry(rng, n * d, d);
    for (std::size_t i = 0; i < num_labels; ++i) {
      spec.jump(j, i) = q.block(static_cast<Eigen::Index>(i) * d, 0, d, d);
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < num_labels; ++j) {
    spec.initial_blocks[j] = random_psd(rng, d, d);
    total += spec.initial_blocks[j].trace().real();
  }
  for (auto& rho : spec.initial_blocks) rho /= total;
  return spec;
}

/// Random walk with |labels| in [1, max_labels] and dim_internal in [1, max_dim].
inline WalkSpec random_small_walk(Rng& rng, std::size_t max_labels, std::size_t max_dim) {
  return random_walk(rng, pick(rng, 1, max_labels), pick(rng, 1, max_dim));
}

/// random_small_walk redrawn until the site space has dimension >= 2.
inline WalkSpec random_nontrivial_walk(Rng& rng, std::size_t max_labels, std::size_t max_dim) {
  for (;;) {
    WalkSpec spec = random_small_walk(rng, max_labels, max_dim);
    if (spec.site_dim() >= 2) return spec;
  }
}

}  // namespace qmctree::testing
