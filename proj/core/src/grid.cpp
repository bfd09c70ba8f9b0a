#include "nlpde/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace nlpde {

namespace {

int wrap_index(int i, int period) {
  int r = i % period;
  if (r < 0) r += period;
  return r;
}

// Cubic Lagrange weights on the 4-node stencil {0,1,2,3} at local abscissa s.
void cubic_weights(double s, double w[4]) {
  w[0] = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
  w[1] = s * (s - 2.0) * (s - 3.0) / 2.0;
  w[2] = -s * (s - 1.0) * (s - 3.0) / 2.0;
  w[3] = s * (s - 1.0) * (s - 2.0) / 6.0;
}

}  // namespace

GridFunction::GridFunction(int dim, double box_halfwidth, double h, ExteriorRule exterior,
                           double time)
    : dim_(dim), box_(box_halfwidth), h_(h), ext_(std::move(exterior)), time_(time) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("GridFunction: dim must be 1 or 2");
  if (!(box_halfwidth > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("GridFunction: box and spacing must be positive");
  }
  const double m = 2.0 * box_halfwidth / h;
  const double rounded = std::round(m);
  if (std::abs(m - rounded) > 1e-9 * std::max(1.0, m) || rounded < 2.0) {
    throw std::invalid_argument("GridFunction: 2*box/h must be an integer >= 2");
  }
  n_ = static_cast<int>(rounded);
  const std::size_t per_axis = static_cast<std::size_t>(n_) + 1;
  values_.assign(dim == 1 ? per_axis : per_axis * per_axis, 0.0);
  if (ext_.kind == ExteriorKind::Callable && !ext_.fn) {
    throw std::invalid_argument("GridFunction: callable exterior rule without callable");
  }
}

GridFunction GridFunction::sample(int dim, double box_halfwidth, double h, ExteriorRule exterior,
                                  const std::function<double(const Point&)>& f, double time) {
  GridFunction g(dim, box_halfwidth, h, std::move(exterior), time);
  const int per_axis = g.nodes_per_axis();
  for (int i = 0; i < per_axis; ++i) {
    if (dim == 1) {
      g.at(i) = f(g.node(i));
    } else {
      for (int j = 0; j < per_axis; ++j) g.at(i, j) = f(g.node(i, j));
    }
  }
  return g;
}

Point GridFunction::node(int i, int j) const {
  Point p;
  p[0] = -box_ + i * h_;
  if (dim_ == 2) p[1] = -box_ + j * h_;
  return p;
}

double& GridFunction::at(int i, int j) {
  return values_[dim_ == 1 ? static_cast<std::size_t>(i)
                           : static_cast<std::size_t>(i) * (n_ + 1) + j];
}

double GridFunction::at(int i, int j) const {
  return values_[dim_ == 1 ? static_cast<std::size_t>(i)
                           : static_cast<std::size_t>(i) * (n_ + 1) + j];
}

double GridFunction::value_lattice(int i, int j) const {
  const bool inside = i >= 0 && i <= n_ && (dim_ == 1 || (j >= 0 && j <= n_));
  if (inside) return at(i, j);
  switch (ext_.kind) {
    case ExteriorKind::Zero:
      return 0.0;
    case ExteriorKind::Constant:
      return ext_.constant;
    case ExteriorKind::Periodic:
      return at(wrap_index(i, n_), dim_ == 1 ? 0 : wrap_index(j, n_));
    case ExteriorKind::Callable:
      return ext_.fn(node(i, j), time_);
  }
  return 0.0;
}

double GridFunction::interp(const Point& p) const {
  Point q = p;
  if (ext_.kind == ExteriorKind::Periodic) {
    const double period = 2.0 * box_;
    for (int d = 0; d < dim_; ++d) {
      q[d] = q[d] - period * std::floor((q[d] + box_) / period);
    }
  } else if (norm_inf(q, dim_) > box_ + 1e-12 * std::max(1.0, box_)) {
    switch (ext_.kind) {
      case ExteriorKind::Zero: return 0.0;
      case ExteriorKind::Constant: return ext_.constant;
      case ExteriorKind::Callable: return ext_.fn(p, time_);
      case ExteriorKind::Periodic: break;
    }
  }

  int base[2] = {0, 0};
  double s[2] = {0.0, 0.0};
  const bool periodic = ext_.kind == ExteriorKind::Periodic;
  for (int d = 0; d < dim_; ++d) {
    const double u = (q[d] + box_) / h_;  // fractional lattice coordinate
    int cell = static_cast<int>(std::floor(u));
    if (!periodic) cell = std::max(0, std::min(cell, n_ - 1));
    int b = cell - 1;
    if (!periodic) b = std::max(0, std::min(b, n_ - 3));
    base[d] = b;
    s[d] = u - b;
  }
  double wx[4], wy[4];
  cubic_weights(s[0], wx);
  if (dim_ == 1) {
    double acc = 0.0;
    for (int m = 0; m < 4; ++m) {
      const int idx = periodic ? wrap_index(base[0] + m, n_) : base[0] + m;
      acc += wx[m] * at(idx);
    }
    return acc;
  }
  cubic_weights(s[1], wy);
  double acc = 0.0;
  for (int m = 0; m < 4; ++m) {
    const int i = periodic ? wrap_index(base[0] + m, n_) : base[0] + m;
    for (int l = 0; l < 4; ++l) {
      const int j = periodic ? wrap_index(base[1] + l, n_) : base[1] + l;
      acc += wx[m] * wy[l] * at(i, j);
    }
  }
  return acc;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool GridFunction::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace nlpde
