#include <doctest.h>

#include <numeric>

#include "qmctree/error.hpp"
#include "qmctree/models.hpp"
#include "qmctree/oracle.hpp"
#include "support/random_walks.hpp"

using namespace qmctree;
using qmctree::testing::Rng;

namespace {

ProductObservable random_product(Rng& rng, const oracle::DenseScope& scope, Eigen::Index d) {
  ProductObservable a;
  for (const auto& u : scope.sites()) {
    const Matrix m = testing::gaussian(rng, d, d);
    a.set(u, m / op_norm(m));
  }
  return a;
}

}  // namespace

TEST_CASE("nested conditional of the identity is the identity") {
  Rng rng(61);
  const WalkSpec spec = testing::random_walk(rng, 2, 2);
  for (const oracle::DenseScope scope : {oracle::DenseScope{2, 1}, oracle::DenseScope{1, 3}}) {
    const std::size_t total = scope.total_dim(4, 4096);
    const Matrix out = oracle::nested_conditional(spec, scope, Matrix::Identity(
                                                                   static_cast<Eigen::Index>(total),
                                                                   static_cast<Eigen::Index>(total)));
    CHECK(op_norm(out - identity(4)) <= 1e-12);
  }
}

TEST_CASE("nested conditional matches the factored root collapse") {
  Rng rng(62);
  for (int t = 0; t < 10; ++t) {
    const WalkSpec spec = testing::random_walk(rng, 2, 2);
    const TreeChain tree(spec, 2), line(spec, 1);
    const oracle::DenseScope star{2, 1};
    const ProductObservable a = random_product(rng, star, 4);
    CHECK(op_norm(oracle::nested_conditional(spec, star, oracle::densify(a, star, 4)) -
                  tree.conditional_expectation_root(a)) <= 1e-10);

    const oracle::DenseScope deep{1, 3};
    const ProductObservable b = random_product(rng, deep, 4);
    CHECK(op_norm(oracle::nested_conditional(spec, deep, oracle::densify(b, deep, 4)) -
                  line.conditional_expectation_root(b)) <= 1e-9);
  }
}

TEST_CASE("nested conditional at depth 0 is the forward operator") {
  Rng rng(63);
  const WalkSpec spec = testing::random_walk(rng, 3, 1);
  const TreeChain chain(spec, 2);
  const Matrix a = testing::gaussian(rng, 3, 3);
  CHECK(op_norm(oracle::nested_conditional(spec, {2, 0}, a) - chain.forward_operator(a)) <= 1e-12);
}

TEST_CASE("dense scope caps") {
  Rng rng(64);
  const WalkSpec spec = testing::random_walk(rng, 2, 2);
  try {
    oracle::DenseScope{2, 2}.total_dim(4, 4096);
    FAIL("expected SizeOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeOverflow);
  }
  CHECK(oracle::DenseScope{1, 5}.total_dim(4, 4096) == 4096);

  ProductObservable outside;
  outside.set(Vertex{{1, 1}}, identity(4));
  CHECK_THROWS_AS(oracle::densify(outside, {2, 1}, 4), Error);
  CHECK_THROWS_AS(oracle::nested_conditional(spec, {2, 1}, identity(4)), Error);
}

TEST_CASE("path enumeration") {
  const WalkSpec model = models::two_label_walk({0.6, 0.8, 0.8, 0.6});
  const auto len0 = oracle::enumerate_path_distribution(model, 0);
  REQUIRE(len0.size() == 2);
  CHECK(len0[0] == doctest::Approx(0.5));
  CHECK(len0[1] == doctest::Approx(0.5));

  // Frozen from four hand Kraus traces.
  const auto len1 = oracle::enumerate_path_distribution(model, 1);
  REQUIRE(len1.size() == 4);
  CHECK(len1[0] == doctest::Approx(0.18).epsilon(1e-14));
  CHECK(len1[1] == doctest::Approx(0.32).epsilon(1e-14));
  CHECK(std::abs(len1[2]) < 1e-16);
  CHECK(len1[3] == doctest::Approx(0.5).epsilon(1e-14));

  Tolerances tol;
  tol.enumeration_cap = 100;
  CHECK_THROWS_AS(oracle::enumerate_path_distribution(model, 10, tol), Error);

  Rng rng(65);
  for (int t = 0; t < 10; ++t) {
    const WalkSpec spec = testing::random_small_walk(rng, 3, 3);
    for (std::size_t len = 0; len <= 4; ++len) {
      const auto table = oracle::enumerate_path_distribution(spec, len);
      CHECK(std::abs(std::accumulate(table.begin(), table.end(), 0.0) - 1.0) <= 1e-10);
    }
  }
}
