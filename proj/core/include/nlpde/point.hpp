#pragma once

#include <array>
#include <cmath>

namespace nlpde {

/// Spatial point in 1 or 2 dimensions. Unused components stay zero so the
/// same value type flows through dimension-generic code.
struct Point {
  std::array<double, 2> c{0.0, 0.0};

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  Point operator-() const { return Point{{-c[0], -c[1]}}; }
  Point operator+(const Point& o) const { return Point{{c[0] + o.c[0], c[1] + o.c[1]}}; }
  Point operator-(const Point& o) const { return Point{{c[0] - o.c[0], c[1] - o.c[1]}}; }
  Point operator*(double s) const { return Point{{c[0] * s, c[1] * s}}; }
};

inline Point point1(double x) { return Point{{x, 0.0}}; }
inline Point point2(double x0, double x1) { return Point{{x0, x1}}; }

inline double norm(const Point& p, int dim) {
  return dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

inline double norm_inf(const Point& p, int dim) {
  return dim == 1 ? std::abs(p[0]) : std::max(std::abs(p[0]), std::abs(p[1]));
}

/// Surface measure of the unit sphere: 2 points in 1d, the unit circle in 2d.
inline double sphere_measure(int dim) { return dim == 1 ? 2.0 : 2.0 * M_PI; }

}  // namespace nlpde
