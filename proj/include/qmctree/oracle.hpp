#pragma once

#include <cstddef>
#include <vector>

#include "qmctree/opalg.hpp"
#include "qmctree/oqrw.hpp"
#include "qmctree/qmc.hpp"
#include "qmctree/tolerances.hpp"
#include "qmctree/treegeo.hpp"

// Brute-force reference evaluators. Nothing here uses the factored formulas of
// TreeChain: conditional expectations are nested dense Kraus contractions over
// the whole ball, path tables are dense lifted-operator products.
namespace qmctree::oracle {

/// Ball of radius `depth` in the tree of order k, stored densely.
struct DenseScope {
  int k = 2;
  std::size_t depth = 1;

  std::vector<Vertex> sites() const;
  /// site_dim^|ball|; throws SizeOverflow above dense_cap.
  std::size_t total_dim(std::size_t site_dim, std::size_t dense_cap) const;
};

/// Tensor product over the scope's sites (ball order), identity where the
/// observable has no factor. Throws InvalidVertex for factors outside the ball.
Matrix densify(const ProductObservable& a, const DenseScope& scope, std::size_t site_dim,
               std::size_t dense_cap = Tolerances{}.dense_cap);

/// E_{W_0}(a_o (x) E_{W_1}(a_{W_1} (x) ... E_{W_n}(a_{W_n} (x) 1))) for a dense
/// operator a on the ball, every E_u applied as Tr_children(K . K^*) with the
/// dense interaction K assembled from the walk.
Matrix nested_conditional(const WalkSpec& spec, const DenseScope& scope, const Matrix& a,
                          const Tolerances& tol = {});

/// Exact P(i_0..i_length) for every path, indexed by encode_path. Built from
/// the lifted jumps on H (x) K. Throws SizeOverflow above enumeration_cap.
std::vector<double> enumerate_path_distribution(const WalkSpec& spec, std::size_t length,
                                                const Tolerances& tol = {});

}  // namespace qmctree::oracle
