#include "qmctree/opalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmctree/error.hpp"

namespace qmctree {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BadPhase: return "BadPhase";
    case ErrorCode::NotProjection: return "NotProjection";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::InvalidVertex: return "InvalidVertex";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ZeroWeightState: return "ZeroWeightState";
    case ErrorCode::BadState: return "BadState";
    case ErrorCode::DegenerateProjection: return "DegenerateProjection";
    case ErrorCode::ZeroProjection: return "ZeroProjection";
    case ErrorCode::Schema: return "Schema";
  }
  return "Unknown";
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix identity(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return Matrix::Identity(m, m);
}

Matrix ket_bra(std::size_t n, std::size_t i, std::size_t j) {
  const auto m = static_cast<Eigen::Index>(n);
  Matrix out = Matrix::Zero(m, m);
  out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return out;
}

double op_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double hermitian_residual(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "hermitian_residual: matrix not square");
  }
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "min_eigenvalue: matrix not square");
  }
  if (a.size() == 0) return 0.0;
  const Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool is_psd(const Matrix& a, double psd_tol) {
  return a.rows() == a.cols() && hermitian_residual(a) <= psd_tol &&
         min_eigenvalue(a) >= -psd_tol;
}

Matrix principal_sqrt(const Matrix& rho, double psd_tol) {
  if (rho.rows() != rho.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "principal_sqrt: matrix not square");
  }
  const Matrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.size() > 0 && ev(0) < -psd_tol) {
    std::ostringstream msg;
    msg << "principal_sqrt: eigenvalue " << ev(0) << " below -" << psd_tol;
    throw Error(ErrorCode::NotPSD, msg.str());
  }
  const Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

Matrix partial_trace_first(const Matrix& a, std::size_t dim_first,
                           std::size_t dim_rest) {
  const auto f = static_cast<Eigen::Index>(dim_first);
  const auto r = static_cast<Eigen::Index>(dim_rest);
  if (a.rows() != a.cols() || a.rows() != f * r) {
    throw Error(ErrorCode::DimensionMismatch,
                "partial_trace_first: operator is not (dim_first*dim_rest)-square");
  }
  Matrix out = Matrix::Zero(r, r);
  for (Eigen::Index k = 0; k < f; ++k) out += a.block(k * r, k * r, r, r);
  return out;
}

Matrix partial_trace_rest(const Matrix& a, std::size_t dim_keep,
                          std::size_t dim_rest) {
  const auto f = static_cast<Eigen::Index>(dim_keep);
  const auto r = static_cast<Eigen::Index>(dim_rest);
  if (a.rows() != a.cols() || a.rows() != f * r) {
    throw Error(ErrorCode::DimensionMismatch,
                "partial_trace_rest: operator is not (dim_keep*dim_rest)-square");
  }
  Matrix out(f, f);
  for (Eigen::Index i = 0; i < f; ++i) {
    for (Eigen::Index j = 0; j < f; ++j) {
      out(i, j) = a.block(i * r, j * r, r, r).trace();
    }
  }
  return out;
}

Projection Projection::from_matrix(Matrix m, double tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "projection must be square");
  }
  const double idem = op_norm(m * m - m);
  const double herm = op_norm(m - m.adjoint());
  if (idem > tol || herm > tol) {
    std::ostringstream msg;
    msg << "not an orthogonal projection: ||P^2-P|| = " << idem
        << ", ||P-P^*|| = " << herm;
    throw Error(ErrorCode::NotProjection, msg.str());
  }
  return Projection(std::move(m));
}

Projection Projection::complement() const {
  return Projection(Matrix::Identity(m_.rows(), m_.cols()) - m_);
}

DensityOperator DensityOperator::from_matrix(Matrix m, double psd_tol) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "density operator must be square");
  }
  if (!is_psd(m, psd_tol)) {
    std::ostringstream msg;
    msg << "density operator not PSD (min eigenvalue " << min_eigenvalue(m)
        << ", hermitian residual " << hermitian_residual(m) << ")";
    throw Error(ErrorCode::NotPSD, msg.str());
  }
  return DensityOperator(std::move(m));
}

Projection rank1_projection(double eps, Complex z, double tol) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw Error(ErrorCode::InvalidSpec, "rank1_projection: eps outside [0, 1]");
  }
  if (std::abs(std::abs(z) - 1.0) > tol) {
    throw Error(ErrorCode::BadPhase, "rank1_projection: |z| != 1");
  }
  const double off = std::sqrt(eps * (1.0 - eps));
  Matrix p(2, 2);
  p << eps, z * off, std::conj(z) * off, 1.0 - eps;
  return Projection::from_matrix(std::move(p), std::max(tol, 1e-12));
}

Matrix vector_projector(const Vector& xi) { return xi * xi.adjoint(); }

}  // namespace qmctree
