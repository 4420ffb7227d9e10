#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "qmctree/tolerances.hpp"

namespace qmctree {

/// Vertex of the rooted Cayley tree, addressed by its branch word. The empty
/// word is the root.
struct Vertex {
  std::vector<int> word;

  static Vertex root() { return Vertex{}; }

  std::size_t level() const noexcept { return word.size(); }
  bool is_root() const noexcept { return word.empty(); }

  /// (word, i)
  Vertex child(int i) const;
  /// Drops the last branch index. Root is its own parent.
  Vertex parent() const;
  /// True when this vertex lies on the path from the root to `other`.
  bool is_prefix_of(const Vertex& other) const;

  std::string to_string() const;

  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

struct TreeShape {
  int k = 2;  ///< branching order, every vertex has k successors
};

/// Throws InvalidVertex unless every branch index is in 1..k.
void check_vertex(const Vertex& v, TreeShape shape);

/// All k^n vertices of level n in lexicographic order. Throws SizeOverflow
/// when k^n exceeds `cap`.
std::vector<Vertex> level(std::size_t n, TreeShape shape,
                          std::size_t cap = Tolerances{}.level_cap);

/// Levels 0..n concatenated (the ball of radius n around the root).
std::vector<Vertex> ball(std::size_t n, TreeShape shape,
                         std::size_t cap = Tolerances{}.level_cap);

std::vector<Vertex> successors(const Vertex& v, TreeShape shape);

/// alpha_g(v): the word g followed by the word v.
Vertex shift(const Vertex& g, const Vertex& v);

/// Infinite root-to-boundary path given by an eventually periodic direction
/// stream: `prefix` followed by `period` repeated forever.
class Ray {
 public:
  Ray(std::vector<int> prefix, std::vector<int> period);

  /// The all-ones ray (1), (1,1), (1,1,1), ...
  static Ray canonical();

  /// Branch taken at step n (n = 0 leaves the root).
  int direction(std::size_t n) const;

  /// n-th vertex (length-n prefix of the direction stream); vertex(0) is the root.
  Vertex vertex(std::size_t n) const;

  const std::vector<int>& prefix() const noexcept { return prefix_; }
  const std::vector<int>& period() const noexcept { return period_; }

  /// Throws InvalidVertex if some direction is outside 1..k.
  void check(TreeShape shape) const;

 private:
  std::vector<int> prefix_;
  std::vector<int> period_;
};

}  // namespace qmctree
