#include "qmctree/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "qmctree/error.hpp"

namespace qmctree::oracle {

namespace {

using Index = Eigen::Index;

std::size_t checked_pow(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t e = 0; e < exp; ++e) {
    if (out > cap / base) throw Error(ErrorCode::SizeOverflow, "dense scope exceeds the cap");
    out *= base;
  }
  return out;
}

/// Dense interaction K = sum_{i,j} M_j^i* (x) A_j^i^{(x) k}, root first.
Matrix dense_interaction(const WalkSpec& spec, int k, const Tolerances& tol) {
  const std::size_t n = spec.num_labels();
  const std::size_t d = spec.site_dim();
  const auto total = static_cast<Index>(checked_pow(d, static_cast<std::size_t>(k) + 1,
                                                    tol.dense_cap));
  Matrix out = Matrix::Zero(total, total);
  for (std::size_t j = 0; j < n; ++j) {
    const Matrix& rho = spec.initial_blocks[j];
    const Matrix a_core = principal_sqrt(rho, tol.psd_tol) / std::sqrt(rho.trace().real());
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix m = kron(spec.jump(j, i), ket_bra(n, i, j));
      Matrix term = m.adjoint();
      const Matrix child = kron(a_core, ket_bra(n, i, j));
      for (int l = 0; l < k; ++l) term = kron(term, child);
      out += term;
    }
  }
  return out;
}

/// S[(p,p'),(q,q')] = sum_c K[(p,c),q] conj(K[(p',c),q']): the matrix of
/// x -> Tr_children(K x K^*) acting on row-major vectorized operators.
Matrix superoperator(const Matrix& k_op, std::size_t site_dim) {
  const auto d = static_cast<Index>(site_dim);
  const Index f = k_op.rows();
  const Index r = f / d;
  Matrix s = Matrix::Zero(d * d, f * f);
  for (Index p = 0; p < d; ++p) {
    for (Index p2 = 0; p2 < d; ++p2) {
      for (Index c = 0; c < r; ++c) {
        const auto row = k_op.row(p * r + c);
        const auto row2 = k_op.row(p2 * r + c);
        for (Index q = 0; q < f; ++q) {
          const Complex kq = row(q);
          if (kq == Complex(0.0)) continue;
          for (Index q2 = 0; q2 < f; ++q2) {
            s(p * d + p2, q * f + q2) += kq * std::conj(row2(q2));
          }
        }
      }
    }
  }
  return s;
}

/// Forward map x -> E(x (x) 1 ... 1) derived from the (1+k)-site superoperator.
Matrix leaf_superoperator(const Matrix& s_full, std::size_t site_dim) {
  const auto d = static_cast<Index>(site_dim);
  const Index f = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(s_full.cols()))));
  const Index r = f / d;
  Matrix s = Matrix::Zero(d * d, d * d);
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) {
      for (Index c = 0; c < r; ++c) {
        s.col(a * d + b) += s_full.col((a * r + c) * f + (b * r + c));
      }
    }
  }
  return s;
}

struct DenseState {
  std::vector<Vertex> sites;
  Matrix op;
};

/// Applies the superoperator `s` to the factors listed in `front` (first entry
/// kept, the others traced out). The kept site moves to the front of the
/// site list; the remaining sites keep their relative order.
void apply_local(DenseState& state, const std::vector<Vertex>& front, const Matrix& s,
                 std::size_t site_dim) {
  const std::size_t ns = state.sites.size();
  std::vector<std::size_t> pos;
  for (const auto& v : front) {
    const auto it = std::find(state.sites.begin(), state.sites.end(), v);
    pos.push_back(static_cast<std::size_t>(it - state.sites.begin()));
  }
  std::vector<std::size_t> rest_pos;
  for (std::size_t p = 0; p < ns; ++p) {
    if (std::find(pos.begin(), pos.end(), p) == pos.end()) rest_pos.push_back(p);
  }

  const auto d = static_cast<Index>(site_dim);
  const Index n = state.op.rows();
  Index fdim = 1;
  for (std::size_t i = 0; i < pos.size(); ++i) fdim *= d;
  const Index rdim = n / fdim;

  // Split every full index into (front index, rest index).
  std::vector<Index> fidx(static_cast<std::size_t>(n)), ridx(static_cast<std::size_t>(n));
  std::vector<Index> digits(ns);
  for (Index idx = 0; idx < n; ++idx) {
    Index t = idx;
    for (std::size_t p = ns; p-- > 0;) {
      digits[p] = t % d;
      t /= d;
    }
    Index fi = 0, ri = 0;
    for (std::size_t p : pos) fi = fi * d + digits[p];
    for (std::size_t p : rest_pos) ri = ri * d + digits[p];
    fidx[static_cast<std::size_t>(idx)] = fi;
    ridx[static_cast<std::size_t>(idx)] = ri;
  }

  Matrix a(fdim * fdim, rdim * rdim);
  for (Index c = 0; c < n; ++c) {
    const Index fc = fidx[static_cast<std::size_t>(c)];
    const Index rc = ridx[static_cast<std::size_t>(c)];
    for (Index r = 0; r < n; ++r) {
      a(fidx[static_cast<std::size_t>(r)] * fdim + fc,
        ridx[static_cast<std::size_t>(r)] * rdim + rc) = state.op(r, c);
    }
  }
  const Matrix b = s * a;

  Matrix out(d * rdim, d * rdim);
  for (Index p = 0; p < d; ++p) {
    for (Index p2 = 0; p2 < d; ++p2) {
      for (Index rr = 0; rr < rdim; ++rr) {
        for (Index rc = 0; rc < rdim; ++rc) {
          out(p * rdim + rr, p2 * rdim + rc) = b(p * d + p2, rr * rdim + rc);
        }
      }
    }
  }

  std::vector<Vertex> sites{front.front()};
  for (std::size_t p : rest_pos) sites.push_back(state.sites[p]);
  state.sites = std::move(sites);
  state.op = std::move(out);
}

}  // namespace

std::vector<Vertex> DenseScope::sites() const { return ball(depth, TreeShape{k}); }

std::size_t DenseScope::total_dim(std::size_t site_dim, std::size_t dense_cap) const {
  return checked_pow(site_dim, sites().size(), dense_cap);
}

Matrix densify(const ProductObservable& a, const DenseScope& scope, std::size_t site_dim,
               std::size_t dense_cap) {
  scope.total_dim(site_dim, dense_cap);
  const auto sites = scope.sites();
  for (const auto& [v, m] : a.factors) {
    if (std::find(sites.begin(), sites.end(), v) == sites.end()) {
      throw Error(ErrorCode::InvalidVertex, "factor at " + v.to_string() + " outside the scope");
    }
  }
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& v : sites) {
    const auto it = a.factors.find(v);
    out = kron(out, it == a.factors.end() ? identity(site_dim) : it->second);
  }
  return out;
}

Matrix nested_conditional(const WalkSpec& spec, const DenseScope& scope, const Matrix& a,
                          const Tolerances& tol) {
  spec.check_shapes();
  const std::size_t d = spec.site_dim();
  const auto total = static_cast<Index>(scope.total_dim(d, tol.dense_cap));
  if (a.rows() != total || a.cols() != total) {
    throw Error(ErrorCode::DimensionMismatch, "operator does not match the dense scope");
  }

  const Matrix k_op = dense_interaction(spec, scope.k, tol);
  const Matrix s_edge = superoperator(k_op, d);
  const Matrix s_leaf = leaf_superoperator(s_edge, d);

  DenseState state{scope.sites(), a};
  const TreeShape shape{scope.k};
  for (const auto& leaf : level(scope.depth, shape)) apply_local(state, {leaf}, s_leaf, d);
  for (std::size_t m = scope.depth; m-- > 0;) {
    for (const auto& u : level(m, shape)) {
      std::vector<Vertex> front{u};
      for (const auto& c : successors(u, shape)) front.push_back(c);
      apply_local(state, front, s_edge, d);
    }
  }
  return state.op;
}

std::vector<double> enumerate_path_distribution(const WalkSpec& spec, std::size_t length,
                                                const Tolerances& tol) {
  spec.check_shapes();
  const std::size_t n = spec.num_labels();
  const std::size_t count = checked_pow(n, length + 1, tol.enumeration_cap);
  const auto dim = static_cast<Index>(spec.site_dim());

  Matrix rho = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < n; ++i) rho += kron(spec.initial_blocks[i], ket_bra(n, i, i));
  std::vector<Matrix> lifted(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      lifted[j * n + i] = kron(spec.jump(j, i), ket_bra(n, i, j));
    }
  }
  const Matrix id_h = identity(spec.dim_internal);

  std::vector<double> table(count);
  std::vector<std::size_t> path(length + 1);
  for (std::size_t code = 0; code < count; ++code) {
    std::size_t t = code;
    for (std::size_t m = length + 1; m-- > 0;) {
      path[m] = t % n;
      t /= n;
    }
    const Matrix pos = kron(id_h, ket_bra(n, path[0], path[0]));
    Matrix sigma = pos * rho * pos;
    for (std::size_t m = 1; m <= length; ++m) {
      const Matrix& op = lifted[path[m - 1] * n + path[m]];
      sigma = op * sigma * op.adjoint();
    }
    table[code] = sigma.trace().real();
  }
  return table;
}

}  // namespace qmctree::oracle
