#include "qmctree/models.hpp"

namespace qmctree::models {

WalkSpec two_label_walk(const TwoLabelParams& params) {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 0.5;
  return two_label_walk(params, rho, rho);
}

WalkSpec two_label_walk(const TwoLabelParams& params, const Matrix& rho1, const Matrix& rho2) {
  WalkSpec spec = WalkSpec::zeros({"1", "2"}, 2);
  spec.jump(0, 0)(0, 0) = params.a;
  spec.jump(0, 0)(1, 1) = params.b;
  spec.jump(0, 1)(0, 0) = params.c;
  spec.jump(0, 1)(1, 1) = params.d;
  spec.jump(1, 0)(0, 1) = 1.0;
  spec.jump(1, 1)(0, 0) = 1.0;
  spec.initial_blocks[0] = rho1;
  spec.initial_blocks[1] = rho2;
  return spec;
}

Matrix upper_projector() { return ket_bra(2, 0, 0); }
Matrix lower_projector() { return ket_bra(2, 1, 1); }

Projection rank1_site_projection(double eps, Complex z, const Vector& xi) {
  return Projection::from_matrix(kron(rank1_projection(eps, z).matrix(), vector_projector(xi)));
}

Matrix position_projector(std::size_t dim_internal, std::size_t num_labels, std::size_t i) {
  return kron(identity(dim_internal), ket_bra(num_labels, i, i));
}

}  // namespace qmctree::models
