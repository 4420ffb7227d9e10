#include <doctest.h>

#include <set>

#include "qmctree/error.hpp"
#include "qmctree/treegeo.hpp"
#include "support/random_walks.hpp"

using namespace qmctree;

namespace {

Vertex v(std::initializer_list<int> w) { return Vertex{std::vector<int>(w)}; }

}  // namespace

TEST_CASE("levels are lexicographic with k^n entries") {
  const auto l0 = level(0, TreeShape{2});
  REQUIRE(l0.size() == 1);
  CHECK(l0[0].is_root());

  const auto l2 = level(2, TreeShape{2});
  const std::vector<Vertex> expected{v({1, 1}), v({1, 2}), v({2, 1}), v({2, 2})};
  CHECK(l2 == expected);

  CHECK(level(4, TreeShape{3}).size() == 81);
  CHECK(ball(3, TreeShape{2}).size() == 15);
  CHECK(level(5, TreeShape{1}).size() == 1);
}

TEST_CASE("level enumeration respects the cap") {
  try {
    level(20, TreeShape{3}, 1000);
    FAIL("expected SizeOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeOverflow);
  }
}

TEST_CASE("successors") {
  CHECK(successors(Vertex::root(), TreeShape{2}) == std::vector<Vertex>{v({1}), v({2})});
  CHECK(successors(v({1, 2}), TreeShape{2}) == std::vector<Vertex>{v({1, 2, 1}), v({1, 2, 2})});
  CHECK(successors(v({1, 1}), TreeShape{1}) == std::vector<Vertex>{v({1, 1, 1})});

  for (const auto& u : ball(3, TreeShape{3})) {
    const auto kids = successors(u, TreeShape{3});
    CHECK(std::set<Vertex>(kids.begin(), kids.end()).size() == 3);
    for (const auto& c : kids) {
      CHECK(c.level() == u.level() + 1);
      CHECK(c.parent() == u);
    }
  }
}

TEST_CASE("shifts concatenate words") {
  CHECK(shift(Vertex::root(), v({2, 1})) == v({2, 1}));
  CHECK(shift(v({1}), v({2, 2})) == v({1, 2, 2}));
  CHECK(shift(v({2, 1}), v({1})) == v({2, 1, 1}));

  const auto vs = ball(3, TreeShape{2});
  for (const auto& g : vs)
    for (const auto& x : vs) CHECK(shift(g, x).level() == g.level() + x.level());
}

TEST_CASE("rays are root-to-boundary paths") {
  const Ray canon = Ray::canonical();
  CHECK(canon.vertex(0).is_root());
  CHECK(canon.vertex(3) == v({1, 1, 1}));

  const Ray r({2, 1}, {1, 3});
  CHECK(r.vertex(5) == v({2, 1, 1, 3, 1}));
  CHECK(r.direction(0) == 2);
  for (std::size_t m = 0; m < 10; ++m) {
    CHECK(r.vertex(m).level() == m);
    CHECK(r.vertex(m).is_prefix_of(r.vertex(m + 1)));
    CHECK(r.vertex(m + 1).parent() == r.vertex(m));
  }
  CHECK_NOTHROW(r.check(TreeShape{3}));
  CHECK_THROWS_AS(r.check(TreeShape{2}), Error);
}

TEST_CASE("vertex validation and printing") {
  CHECK_NOTHROW(check_vertex(v({1, 2}), TreeShape{2}));
  try {
    check_vertex(v({1, 3}), TreeShape{2});
    FAIL("expected InvalidVertex");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidVertex);
  }
  CHECK(Vertex::root().parent().is_root());
  CHECK(v({1, 2}).child(3) == v({1, 2, 3}));
}
