#include "qmctree/qmc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmctree/error.hpp"

namespace qmctree {

Complex trace_product(const Matrix& x, const Matrix& y) {
  return x.cwiseProduct(y.transpose()).sum();
}

ProductObservable ProductObservable::shifted(const Vertex& g) const {
  ProductObservable out;
  for (const auto& [v, m] : factors) out.factors.emplace(shift(g, v), m);
  return out;
}

std::size_t ProductObservable::depth() const {
  std::size_t d = 0;
  for (const auto& [v, m] : factors) d = std::max(d, v.level());
  return d;
}

namespace {

std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t e = 0; e < exp; ++e) {
    if (out > cap / base) {
      throw Error(ErrorCode::SizeOverflow, "dense operator exceeds the dense cap");
    }
    out *= base;
  }
  return out;
}

}  // namespace

Matrix KrausInteraction::dense(std::size_t dense_cap) const {
  const std::size_t total = checked_power(site_dim, static_cast<std::size_t>(k) + 1, dense_cap);
  const auto t = static_cast<Eigen::Index>(total);
  Matrix out = Matrix::Zero(t, t);
  for (std::size_t idx = 0; idx < root_factors.size(); ++idx) {
    Matrix term = root_factors[idx];
    for (int l = 0; l < k; ++l) term = kron(term, child_factors[idx]);
    out += term;
  }
  return out;
}

TreeChain::TreeChain(WalkSpec spec, int k, Tolerances tol)
    : spec_(std::move(spec)), k_(k), tol_(tol) {
  if (k_ < 1) throw Error(ErrorCode::InvalidSpec, "branching order must be >= 1");
  const ValidationReport report = validate(spec_, tol_, /*require_unit_trace=*/false);
  if (!report.passed()) {
    throw Error(ErrorCode::InvalidSpec, "walk specification invalid: " + report.failures.front());
  }

  const std::size_t n = spec_.num_labels();
  lifted_ = lifted_jumps(spec_);

  std::vector<Matrix> sqrt_rho(n);
  std::vector<double> traces(n);
  for (std::size_t j = 0; j < n; ++j) {
    sqrt_rho[j] = principal_sqrt(spec_.initial_blocks[j], tol_.psd_tol);
    traces[j] = spec_.initial_blocks[j].trace().real();
  }

  // phi_{jj'}: the child trace Tr(A_j^i b A_{j'}^{i*}) = Tr(A_{j'}^{i*} A_j^i b),
  // with A_{j'}^{i*} A_j^i = rho_{j'}^{1/2} rho_j^{1/2} (x) |j'><j| / norms.
  phi_densities_.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t j2 = 0; j2 < n; ++j2) {
      const double norm = std::sqrt(traces[j] * traces[j2]);
      phi_densities_[j * n + j2] =
          kron(sqrt_rho[j2] * sqrt_rho[j] / norm, ket_bra(n, j2, j));
    }
  }

  psi_densities_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto dim = static_cast<Eigen::Index>(spec_.site_dim());
    Matrix y = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix& b = spec_.jump(j, i);
      y += kron(b * spec_.initial_blocks[j] * b.adjoint(), ket_bra(n, i, i));
    }
    psi_densities_[j] = y / traces[j];
  }

  kraus_.num_labels = n;
  kraus_.site_dim = spec_.site_dim();
  kraus_.k = k_;
  kraus_.root_factors.resize(n * n);
  kraus_.child_factors.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      kraus_.root_factors[j * n + i] = lifted_[j * n + i].op.adjoint();
      kraus_.child_factors[j * n + i] =
          kron(sqrt_rho[j] / std::sqrt(traces[j]), ket_bra(n, i, j));
    }
  }
}

void TreeChain::check_site_operator(const Matrix& m) const {
  const auto d = static_cast<Eigen::Index>(site_dim());
  if (m.rows() != d || m.cols() != d) {
    std::ostringstream msg;
    msg << "site operator is " << m.rows() << "x" << m.cols() << ", expected " << d
        << "x" << d;
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

void TreeChain::check_state(const DensityOperator& omega) const {
  if (omega.dim() != site_dim()) {
    throw Error(ErrorCode::BadState, "initial state has the wrong dimension");
  }
  if (std::abs(omega.trace() - 1.0) > tol_.zero_tol) {
    throw Error(ErrorCode::BadState, "initial state does not have unit trace");
  }
}

Complex TreeChain::phi_pair(std::size_t j, std::size_t j2, const Matrix& b) const {
  const std::size_t n = num_labels();
  if (j >= n || j2 >= n) throw Error(ErrorCode::UnknownLabel, "label index out of range");
  check_site_operator(b);
  return trace_product(phi_densities_[j * n + j2], b);
}

Complex TreeChain::psi(std::size_t j, const Matrix& b) const {
  if (j >= num_labels()) throw Error(ErrorCode::UnknownLabel, "label index out of range");
  check_site_operator(b);
  return trace_product(psi_densities_[j], b);
}

Eigen::MatrixXd TreeChain::classical_kernel() const {
  const std::size_t n = num_labels();
  Eigen::MatrixXd q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Matrix& rho = spec_.initial_blocks[j];
    const double tr = rho.trace().real();
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix& b = spec_.jump(j, i);
      q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          (b * rho * b.adjoint()).trace().real() / tr;
    }
  }
  return q;
}

Matrix TreeChain::transition_expectation(const Matrix& a_root,
                                         std::span<const Matrix> children) const {
  if (children.size() != static_cast<std::size_t>(k_)) {
    throw Error(ErrorCode::DimensionMismatch, "expected exactly k child operators");
  }
  check_site_operator(a_root);
  for (const auto& c : children) check_site_operator(c);

  const std::size_t n = num_labels();
  std::vector<Complex> coeff(n * n, Complex(1.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t j2 = 0; j2 < n; ++j2) {
      for (const auto& c : children) coeff[j * n + j2] *= trace_product(phi_densities_[j * n + j2], c);
    }
  }

  const auto d = static_cast<Eigen::Index>(site_dim());
  Matrix out = Matrix::Zero(d, d);
  Matrix right(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j2 = 0; j2 < n; ++j2) {
      bool needed = false;
      for (std::size_t j = 0; j < n; ++j) needed = needed || coeff[j * n + j2] != Complex(0.0);
      if (!needed) continue;
      right.noalias() = a_root * lifted_[j2 * n + i].op;
      for (std::size_t j = 0; j < n; ++j) {
        const Complex c = coeff[j * n + j2];
        if (c == Complex(0.0)) continue;
        out.noalias() += c * (lifted_[j * n + i].op.adjoint() * right);
      }
    }
  }
  return out;
}

Matrix TreeChain::transition_expectation_kraus(const Matrix& a) const {
  const std::size_t d = site_dim();
  const std::size_t rest = checked_power(d, static_cast<std::size_t>(k_), tol_.dense_cap);
  if (d * rest > tol_.dense_cap) {
    throw Error(ErrorCode::SizeOverflow, "interaction operator exceeds the dense cap");
  }
  const auto total = static_cast<Eigen::Index>(d * rest);
  if (a.rows() != total || a.cols() != total) {
    throw Error(ErrorCode::DimensionMismatch, "operator is not supported on (1 + k) sites");
  }
  const Matrix k_op = kraus_.dense(tol_.dense_cap);
  const Matrix ka = k_op * a;
  // Tr over the children of (K a) K^*: only the diagonal child blocks matter.
  const auto di = static_cast<Eigen::Index>(d);
  const auto r = static_cast<Eigen::Index>(rest);
  Matrix out = Matrix::Zero(di, di);
  Matrix left(di, total), right(di, total);
  for (Eigen::Index c = 0; c < r; ++c) {
    for (Eigen::Index p = 0; p < di; ++p) {
      left.row(p) = ka.row(p * r + c);
      right.row(p) = k_op.row(p * r + c);
    }
    out.noalias() += left * right.adjoint();
  }
  return out;
}

Matrix TreeChain::forward_operator(const Matrix& a) const {
  check_site_operator(a);
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (const auto& m : lifted_) out.noalias() += m.op.adjoint() * a * m.op;
  return out;
}

Matrix TreeChain::backward_operator(const Matrix& b) const {
  check_site_operator(b);
  const std::size_t n = num_labels();
  Matrix out = Matrix::Zero(b.rows(), b.cols());
  const Matrix id_h = identity(spec_.dim_internal);
  for (std::size_t j = 0; j < n; ++j) {
    out += phi(j, b) * kron(id_h, ket_bra(n, j, j));
  }
  return out;
}

Matrix TreeChain::backward_power(const Matrix& b, std::size_t m) const {
  Matrix out = b;
  for (std::size_t s = 0; s < m; ++s) out = backward_operator(out);
  return out;
}

Matrix TreeChain::mj_map(std::size_t j, const Matrix& a) const {
  const std::size_t n = num_labels();
  if (j >= n) throw Error(ErrorCode::UnknownLabel, "label index out of range");
  check_site_operator(a);
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix& m = lifted_[j * n + i].op;
    out.noalias() += m.adjoint() * a * m;
  }
  return out;
}

void TreeChain::check_observable(const ProductObservable& a) const {
  for (const auto& [v, m] : a.factors) {
    check_vertex(v, shape());
    check_site_operator(m);
  }
}

std::vector<Complex> TreeChain::psi_weights(const ProductObservable& a) const {
  std::vector<Complex> w(num_labels(), Complex(1.0));
  for (const auto& [v, m] : a.factors) {
    if (v.is_root()) continue;
    for (std::size_t j = 0; j < w.size(); ++j) w[j] *= trace_product(psi_densities_[j], m);
  }
  return w;
}

Matrix TreeChain::conditional_expectation_root(const ProductObservable& a) const {
  check_observable(a);
  const std::vector<Complex> w = psi_weights(a);
  const auto root_it = a.factors.find(Vertex::root());
  const auto d = static_cast<Eigen::Index>(site_dim());
  const Matrix root = root_it == a.factors.end() ? Matrix::Identity(d, d) : root_it->second;
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] == Complex(0.0)) continue;
    out += w[j] * mj_map(j, root);
  }
  return out;
}

Matrix TreeChain::conditional_expectation_root(const ObservableSum& a) const {
  const auto d = static_cast<Eigen::Index>(site_dim());
  Matrix out = Matrix::Zero(d, d);
  for (const auto& [c, term] : a.terms) out += c * conditional_expectation_root(term);
  return out;
}

Complex TreeChain::qmc_state(const DensityOperator& omega, const ProductObservable& a) const {
  check_state(omega);
  check_observable(a);
  const std::vector<Complex> w = psi_weights(a);
  const auto root_it = a.factors.find(Vertex::root());
  const auto d = static_cast<Eigen::Index>(site_dim());
  const Matrix root = root_it == a.factors.end() ? Matrix::Identity(d, d) : root_it->second;
  Complex out(0.0);
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] == Complex(0.0)) continue;
    out += trace_product(omega.matrix(), mj_map(j, root)) * w[j];
  }
  return out;
}

Complex TreeChain::qmc_state(const DensityOperator& omega, const ObservableSum& a) const {
  Complex out(0.0);
  for (const auto& [c, term] : a.terms) out += c * qmc_state(omega, term);
  return out;
}

DensityOperator TreeChain::homogeneous_initial_state() const {
  Matrix rho = assemble_blocks(spec_, spec_.initial_blocks);
  rho /= rho.trace().real();
  return DensityOperator::from_matrix(std::move(rho), tol_.psd_tol);
}

}  // namespace qmctree
