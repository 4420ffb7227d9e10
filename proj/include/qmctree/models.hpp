#pragma once

#include <cstddef>

#include "qmctree/opalg.hpp"
#include "qmctree/oqrw.hpp"

// The two-label walk on C^2 used throughout the examples and tests:
//   B_1^1 = diag(a, b)   B_1^2 = diag(c, d)
//   B_2^1 = |1><2|       B_2^2 = diag(1, 0)
// with |a|^2 + |c|^2 = |b|^2 + |d|^2 = 1.
namespace qmctree::models {

struct TwoLabelParams {
  Complex a{0.6};
  Complex b{0.8};
  Complex c{0.8};
  Complex d{0.6};
};

/// Initial blocks default to rho_1 = rho_2 = diag(0.5, 0).
WalkSpec two_label_walk(const TwoLabelParams& params);
WalkSpec two_label_walk(const TwoLabelParams& params, const Matrix& rho1, const Matrix& rho2);

/// diag(1, 0) and diag(0, 1) on the internal space.
Matrix upper_projector();
Matrix lower_projector();

/// p(eps, z) (x) |xi><xi|.
Projection rank1_site_projection(double eps, Complex z, const Vector& xi);

/// 1_H (x) |i><i|.
Matrix position_projector(std::size_t dim_internal, std::size_t num_labels, std::size_t i);

}  // namespace qmctree::models
