#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace tw {

inline constexpr int kMaxDim = 3;

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(int a, int b)
      : std::invalid_argument("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

inline void require_same_dim(int a, int b) {
  if (a != b) throw DimensionMismatch(a, b);
}

// Point in R^n for n <= 3; unused trailing coordinates stay zero.
struct Point {
  int dim = 0;
  std::array<double, kMaxDim> c{};

  Point() = default;
  Point(std::initializer_list<double> xs) {
    if (xs.size() > kMaxDim) throw std::invalid_argument("Point: dimension > 3");
    dim = static_cast<int>(xs.size());
    int i = 0;
    for (double v : xs) c[i++] = v;
  }
  static Point zero(int n) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("Point: dimension must be 1..3");
    Point p;
    p.dim = n;
    return p;
  }
  static Point filled(int n, double v) {
    Point p = zero(n);
    for (int i = 0; i < n; ++i) p.c[i] = v;
    return p;
  }

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  bool operator==(const Point& o) const = default;
  // lexicographic on coordinates; dim compared first
  std::partial_ordering operator<=>(const Point& o) const {
    if (dim != o.dim) return dim <=> o.dim;
    for (int i = 0; i < dim; ++i) {
      if (c[i] < o.c[i]) return std::partial_ordering::less;
      if (c[i] > o.c[i]) return std::partial_ordering::greater;
    }
    return std::partial_ordering::equivalent;
  }
};

inline Point operator+(Point a, const Point& b) {
  for (int i = 0; i < a.dim; ++i) a.c[i] += b.c[i];
  return a;
}
inline Point operator-(Point a, const Point& b) {
  for (int i = 0; i < a.dim; ++i) a.c[i] -= b.c[i];
  return a;
}
inline Point operator*(double s, Point a) {
  for (int i = 0; i < a.dim; ++i) a.c[i] *= s;
  return a;
}
inline double dot(const Point& a, const Point& b) {
  double s = 0;
  for (int i = 0; i < a.dim; ++i) s += a.c[i] * b.c[i];
  return s;
}
inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }
inline double dist(const Point& a, const Point& b) { return norm(a - b); }

inline bool is_finite(const Point& p) {
  for (int i = 0; i < p.dim; ++i)
    if (!std::isfinite(p.c[i])) return false;
  return true;
}

}  // namespace tw
