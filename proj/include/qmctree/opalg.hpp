#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "qmctree/tolerances.hpp"

namespace qmctree {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Dense operator algebra on H (x) K. All functions are pure.

Matrix kron(const Matrix& a, const Matrix& b);

Matrix identity(std::size_t n);

/// |i><j| in dimension n.
Matrix ket_bra(std::size_t n, std::size_t i, std::size_t j);

/// Largest singular value.
double op_norm(const Matrix& a);

/// max |A - A^dagger| entry.
double hermitian_residual(const Matrix& a);

/// Smallest eigenvalue of the Hermitian part (A + A^dagger)/2.
double min_eigenvalue(const Matrix& a);

bool is_psd(const Matrix& a, double psd_tol);

/// Hermitian PSD square root; eigenvalues in (-psd_tol, 0) are clipped to 0.
/// Throws NotPSD below that.
Matrix principal_sqrt(const Matrix& rho, double psd_tol = Tolerances{}.psd_tol);

/// Trace over the first tensor factor of a (dim_first * dim_rest)-square
/// operator.
Matrix partial_trace_first(const Matrix& a, std::size_t dim_first,
                           std::size_t dim_rest);

/// Trace over every factor after the first; keeps a dim_keep-square operator.
Matrix partial_trace_rest(const Matrix& a, std::size_t dim_keep,
                          std::size_t dim_rest);

/// Orthogonal projection (self-adjoint idempotent).
class Projection {
 public:
  /// Throws NotProjection when ||P^2 - P|| or ||P - P^dagger|| exceeds tol.
  static Projection from_matrix(Matrix m, double tol = 1e-9);

  const Matrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

  /// 1 - P.
  Projection complement() const;

  double rank() const { return m_.trace().real(); }

 private:
  explicit Projection(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// PSD operator with real nonnegative trace. Unit trace is not enforced here.
class DensityOperator {
 public:
  static DensityOperator from_matrix(Matrix m, double psd_tol = Tolerances{}.psd_tol);

  const Matrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  double trace() const { return m_.trace().real(); }

 private:
  explicit DensityOperator(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// The 2x2 rank-one projection
///   [ eps                     z sqrt(eps(1-eps)) ]
///   [ conj(z) sqrt(eps(1-eps))        1 - eps    ]
/// Throws BadPhase when |z| != 1 and InvalidSpec when eps is outside [0, 1].
Projection rank1_projection(double eps, Complex z, double tol = 1e-9);

/// |xi><xi| for a vector xi (not normalized here).
Matrix vector_projector(const Vector& xi);

}  // namespace qmctree
