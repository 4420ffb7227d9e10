#include "qmctree/treegeo.hpp"

#include <algorithm>
#include <sstream>

#include "qmctree/error.hpp"

namespace qmctree {

Vertex Vertex::child(int i) const {
  Vertex out = *this;
  out.word.push_back(i);
  return out;
}

Vertex Vertex::parent() const {
  Vertex out = *this;
  if (!out.word.empty()) out.word.pop_back();
  return out;
}

bool Vertex::is_prefix_of(const Vertex& other) const {
  return word.size() <= other.word.size() &&
         std::equal(word.begin(), word.end(), other.word.begin());
}

std::string Vertex::to_string() const {
  if (word.empty()) return "o";
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out << ',';
    out << word[i];
  }
  out << ')';
  return out.str();
}

void check_vertex(const Vertex& v, TreeShape shape) {
  for (int b : v.word) {
    if (b < 1 || b > shape.k) {
      throw Error(ErrorCode::InvalidVertex,
                  "vertex " + v.to_string() + " has a branch index outside 1.." +
                      std::to_string(shape.k));
    }
  }
}

std::vector<Vertex> level(std::size_t n, TreeShape shape, std::size_t cap) {
  if (shape.k < 1) throw Error(ErrorCode::InvalidSpec, "branching order must be >= 1");
  const auto k = static_cast<std::size_t>(shape.k);
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (count > cap / k) {
      throw Error(ErrorCode::SizeOverflow, "level " + std::to_string(n) +
                                               " exceeds the vertex cap");
    }
    count *= k;
  }
  if (count > cap) {
    throw Error(ErrorCode::SizeOverflow, "level " + std::to_string(n) +
                                             " exceeds the vertex cap");
  }

  std::vector<Vertex> out;
  out.reserve(count);
  // Odometer over {1..k}^n, last index fastest.
  std::vector<int> word(n, 1);
  for (std::size_t c = 0; c < count; ++c) {
    out.push_back(Vertex{word});
    for (std::size_t pos = n; pos-- > 0;) {
      if (word[pos] < shape.k) {
        ++word[pos];
        break;
      }
      word[pos] = 1;
    }
  }
  return out;
}

std::vector<Vertex> ball(std::size_t n, TreeShape shape, std::size_t cap) {
  std::vector<Vertex> out;
  for (std::size_t m = 0; m <= n; ++m) {
    auto lv = level(m, shape, cap);
    if (out.size() + lv.size() > cap) {
      throw Error(ErrorCode::SizeOverflow, "ball exceeds the vertex cap");
    }
    out.insert(out.end(), lv.begin(), lv.end());
  }
  return out;
}

std::vector<Vertex> successors(const Vertex& v, TreeShape shape) {
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(std::max(shape.k, 0)));
  for (int i = 1; i <= shape.k; ++i) out.push_back(v.child(i));
  return out;
}

Vertex shift(const Vertex& g, const Vertex& v) {
  Vertex out = g;
  out.word.insert(out.word.end(), v.word.begin(), v.word.end());
  return out;
}

Ray::Ray(std::vector<int> prefix, std::vector<int> period)
    : prefix_(std::move(prefix)), period_(std::move(period)) {
  if (period_.empty()) {
    throw Error(ErrorCode::InvalidSpec, "ray period must be nonempty");
  }
}

Ray Ray::canonical() { return Ray({}, {1}); }

int Ray::direction(std::size_t n) const {
  if (n < prefix_.size()) return prefix_[n];
  return period_[(n - prefix_.size()) % period_.size()];
}

Vertex Ray::vertex(std::size_t n) const {
  Vertex v;
  v.word.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.word.push_back(direction(i));
  return v;
}

void Ray::check(TreeShape shape) const {
  auto bad = [&](int b) { return b < 1 || b > shape.k; };
  if (std::any_of(prefix_.begin(), prefix_.end(), bad) ||
      std::any_of(period_.begin(), period_.end(), bad)) {
    throw Error(ErrorCode::InvalidVertex, "ray direction outside 1.." +
                                              std::to_string(shape.k));
  }
}

}  // namespace qmctree
