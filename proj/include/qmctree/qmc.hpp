#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "qmctree/opalg.hpp"
#include "qmctree/oqrw.hpp"
#include "qmctree/tolerances.hpp"
#include "qmctree/treegeo.hpp"

namespace qmctree {

/// Finitely supported elementary tensor on the tree. Vertices absent from
/// `factors` carry the identity.
struct ProductObservable {
  std::map<Vertex, Matrix> factors;

  ProductObservable& set(const Vertex& v, Matrix m) {
    factors.insert_or_assign(v, std::move(m));
    return *this;
  }

  /// alpha_g: moves every factor from v to (g, v); the root becomes identity.
  ProductObservable shifted(const Vertex& g) const;

  /// Deepest level that carries a factor (0 for the identity observable).
  std::size_t depth() const;
};

/// Finite linear combination of product observables.
struct ObservableSum {
  std::vector<std::pair<Complex, ProductObservable>> terms;

  ObservableSum& add(Complex coefficient, ProductObservable term) {
    terms.emplace_back(coefficient, std::move(term));
    return *this;
  }
};

/// Factored form of the vertex/successor interaction: for each pair (j, i)
/// the root carries M_j^i* and every child carries
/// A_j^i = rho_j^{1/2} / Tr(rho_j)^{1/2} (x) |i><j|.
struct KrausInteraction {
  std::size_t num_labels = 0;
  std::size_t site_dim = 0;
  int k = 0;
  std::vector<Matrix> root_factors;   ///< [j * n + i] = M_j^i*
  std::vector<Matrix> child_factors;  ///< [j * n + i] = A_j^i

  /// K = sum_{i,j} M_j^i* (x) A_j^i (x) ... (x) A_j^i on (1 + k) sites, root
  /// first. Throws SizeOverflow when site_dim^(1+k) exceeds `dense_cap`.
  Matrix dense(std::size_t dense_cap = Tolerances{}.dense_cap) const;
};

/// Tree-homogeneous quantum Markov chain on the rooted Cayley tree of order k
/// built from an open quantum random walk (trivial boundary condition).
///
/// Every site carries B(H (x) K). The single-edge functionals are
///   phi_{jj'}(b) = Tr(rho_{j'}^{1/2} rho_j^{1/2} (x) |j'><j| b) / sqrt(Tr rho_j Tr rho_j')
///   psi_j(b)     = sum_i Tr(B_j^i rho_j B_j^i* (x) |i><i| b) / Tr rho_j
/// and the root collapse of a product observable is
///   E_o](a) = sum_j M_j(a_o) prod_{u != o} psi_j(a_u).
class TreeChain {
 public:
  /// Throws InvalidSpec if the walk fails validation (unit total trace is not
  /// required: every functional normalizes by Tr rho_j).
  TreeChain(WalkSpec spec, int k, Tolerances tol = {});

  const WalkSpec& spec() const noexcept { return spec_; }
  int k() const noexcept { return k_; }
  TreeShape shape() const noexcept { return TreeShape{k_}; }
  std::size_t num_labels() const noexcept { return spec_.num_labels(); }
  std::size_t site_dim() const noexcept { return spec_.site_dim(); }
  const Tolerances& tolerances() const noexcept { return tol_; }

  Complex phi_pair(std::size_t j, std::size_t j2, const Matrix& b) const;
  /// phi_j = phi_{jj}, a state.
  Complex phi(std::size_t j, const Matrix& b) const { return phi_pair(j, j, b); }
  Complex psi(std::size_t j, const Matrix& b) const;

  /// q(j, i) = Tr(B_j^i rho_j B_j^i*) / Tr rho_j, rows sum to one.
  Eigen::MatrixXd classical_kernel() const;

  /// Closed form sum_{i,j,j'} M_j^i* a M_{j'}^i prod_l phi_{jj'}(c_l).
  Matrix transition_expectation(const Matrix& a_root,
                                std::span<const Matrix> children) const;

  /// Tr over the children of K a K^* for an arbitrary operator a on the
  /// (1 + k) sites (root first).
  Matrix transition_expectation_kraus(const Matrix& a) const;

  const KrausInteraction& kraus() const noexcept { return kraus_; }

  /// T(a) = sum_{i,j} M_j^i* a M_j^i
  Matrix forward_operator(const Matrix& a) const;
  /// P(b) = sum_j (1 (x) |j><j|) phi_j(b)
  Matrix backward_operator(const Matrix& b) const;
  /// P composed m times (m = 0 returns b).
  Matrix backward_power(const Matrix& b, std::size_t m) const;
  /// M_j(a) = sum_i M_j^i* a M_j^i
  Matrix mj_map(std::size_t j, const Matrix& a) const;

  Matrix conditional_expectation_root(const ProductObservable& a) const;
  Matrix conditional_expectation_root(const ObservableSum& a) const;

  /// phi(a) = sum_j Tr(omega M_j(a_o)) prod_{u != o} psi_j(a_u).
  /// Throws BadState unless omega is a unit-trace density operator.
  Complex qmc_state(const DensityOperator& omega, const ProductObservable& a) const;
  Complex qmc_state(const DensityOperator& omega, const ObservableSum& a) const;

  /// Initial state whose position blocks are proportional to rho_j, namely
  /// sum_j rho_j (x) |j><j| / sum_j Tr rho_j. With this initial state the chain
  /// is invariant under the tree shifts.
  DensityOperator homogeneous_initial_state() const;

  /// Throws DimensionMismatch unless m is site_dim x site_dim.
  void check_site_operator(const Matrix& m) const;
  void check_state(const DensityOperator& omega) const;

 private:
  /// prod_{u != o} psi_j(a_u) for every j; identity factors skipped.
  std::vector<Complex> psi_weights(const ProductObservable& a) const;
  void check_observable(const ProductObservable& a) const;

  WalkSpec spec_;
  int k_;
  Tolerances tol_;
  std::vector<LiftedJump> lifted_;      // [j * n + i]
  std::vector<Matrix> phi_densities_;   // [j * n + j'], phi_{jj'}(b) = Tr(X b)
  std::vector<Matrix> psi_densities_;   // [j], psi_j(b) = Tr(Y b)
  KrausInteraction kraus_;
};

/// Tr(x y) without forming the product.
Complex trace_product(const Matrix& x, const Matrix& y);

}  // namespace qmctree
