#include "nlpde/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlpde {

namespace {

int origin_node(const GridFunction& g) {
  const int n = g.nodes_per_axis() - 1;
  if (n % 2 != 0) {
    throw std::invalid_argument("regularity: grid must have a node at the origin");
  }
  return n / 2;
}

/// 5-point central derivative of order j in {0,1,2} along axis `axis` at
/// node (i,j0); 4th-order accurate.
double stencil_derivative(const GridFunction& g, int order, int axis, int i, int j0) {
  const double h = g.spacing();
  auto v = [&](int off) {
    return axis == 0 ? g.value_lattice(i + off, j0) : g.value_lattice(i, j0 + off);
  };
  switch (order) {
    case 0:
      return v(0);
    case 1:
      return (-v(2) + 8.0 * v(1) - 8.0 * v(-1) + v(-2)) / (12.0 * h);
    case 2:
      return (-v(2) + 16.0 * v(1) - 30.0 * v(0) + 16.0 * v(-1) - v(-2)) / (12.0 * h * h);
    default:
      throw std::invalid_argument("regularity: derivative order must be 0, 1, or 2");
  }
}

double origin_derivative(const GridFunction& g, int order) {
  const int c = origin_node(g);
  if (g.dim() == 1) return stencil_derivative(g, order, 0, c, 0);
  if (order == 0) return g.at(c, c);
  // Euclidean norm across axes for vector/diagonal-tensor readouts.
  const double dx = stencil_derivative(g, order, 0, c, c);
  const double dy = stencil_derivative(g, order, 1, c, c);
  return std::hypot(dx, dy);
}

}  // namespace

std::vector<double> geometric_abscissae(double largest, int count, double floor_value) {
  std::vector<double> out;
  double v = largest;
  for (int i = 0; i < count && v >= floor_value; ++i, v *= 0.5) out.push_back(v);
  return out;
}

ExponentFit pointwise_spatial_exponent(const GridFunction& u, const TaylorExpansion& P,
                                       const std::vector<double>& radii) {
  if (radii.size() < 3) {
    throw std::invalid_argument("pointwise_spatial_exponent: need at least 3 radii");
  }
  const double h = u.spacing();
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] < radii[i - 1])) {
      throw std::invalid_argument("pointwise_spatial_exponent: radii must decrease");
    }
  }
  if (radii.back() < 4.0 * h - 1e-12) {
    throw std::invalid_argument("pointwise_spatial_exponent: radii must stay >= 4h");
  }
  const int per_axis = u.nodes_per_axis();
  std::vector<double> m(radii.size(), 0.0);
  for (int i = 0; i < per_axis; ++i) {
    for (int j = 0; j < (u.dim() == 2 ? per_axis : 1); ++j) {
      const Point x = u.node(i, j);
      const double r = norm(x, u.dim());
      const double dev = std::abs(u.at(i, j) - P.eval(x));
      for (std::size_t q = 0; q < radii.size(); ++q) {
        if (r >= radii[q] / std::sqrt(2.0) && r <= radii[q]) m[q] = std::max(m[q], dev);
      }
    }
  }
  std::vector<double> r_used(radii.begin(), radii.end());
  return fit_power_law(r_used, m);
}

ExponentFit time_modulus(const SpaceTimeSolution& u, int derivative_order,
                         const std::vector<double>& times, const KernelSpec* kernel) {
  if (derivative_order < 0 || derivative_order > 2) {
    throw std::invalid_argument("time_modulus: derivative order must be 0, 1, or 2");
  }
  std::string note;
  if (kernel) {
    const int top = static_cast<int>(std::floor(kernel->sigma + kernel->holder_alpha));
    if (derivative_order > top) {
      note = "derivative order exceeds [sigma+alpha]; no guaranteed exponent";
    }
    if (derivative_order == 2 && kernel->class_tag < KernelClass::L3) {
      note = "second derivatives without an L3 kernel: only some positive exponent is guaranteed";
    }
  }
  const double t_ref = u.times.back();
  const GridFunction ref = u.slices.back();
  const double d_ref = origin_derivative(ref, derivative_order);

  std::vector<double> ts, mods;
  const double dt = u.dt_marched;
  for (double t : times) {
    if (!(t > 0.0)) throw std::invalid_argument("time_modulus: times are positive lags");
    if (t < 4.0 * dt - 1e-12) {
      throw std::invalid_argument("time_modulus: times must stay >= 4 dt");
    }
    const std::size_t idx = u.slice_index_at(t_ref - t);
    const GridFunction& g = u.slices[idx];
    const double lag = t_ref - u.times[idx];
    if (lag <= 0.0) continue;
    ts.push_back(lag);
    mods.push_back(std::abs(origin_derivative(g, derivative_order) - d_ref));
  }
  ExponentFit fit = fit_power_law(ts, mods);
  if (!note.empty()) fit.note = fit.note.empty() ? note : fit.note + "; " + note;
  if (fit.degenerate && fit.note.find("no power law") == std::string::npos) {
    fit.note += (fit.note.empty() ? "" : "; ");
    fit.note += "no power law (modulus at or below solver noise)";
  }
  return fit;
}

double uniform_spatial_norm(const SpaceTimeSolution& u, double order, double window_halfwidth,
                            double t_min, double t_max) {
  const GridFunction& g0 = u.slices.front();
  const int d = static_cast<int>(std::floor(order));
  if (d < 0 || d > 2) throw std::invalid_argument("uniform_spatial_norm: order out of range");
  const double beta = order - d;
  const double h = g0.spacing();
  if (window_halfwidth + 2.0 * h > g0.box_halfwidth()) {
    throw std::invalid_argument("uniform_spatial_norm: window too close to the grid edge");
  }
  if (g0.dim() != 1) {
    throw std::invalid_argument("uniform_spatial_norm: 1d solutions only");
  }
  double worst = 0.0;
  for (std::size_t sl = 0; sl < u.slices.size(); ++sl) {
    const double t = u.times[sl];
    if (t < t_min - 1e-12 || t > t_max + 1e-12) continue;
    const GridFunction& g = u.slices[sl];
    std::vector<int> nodes;
    std::vector<double> top;
    const int per_axis = g.nodes_per_axis();
    for (int i = 2; i < per_axis - 2; ++i) {
      if (std::abs(g.node(i)[0]) <= window_halfwidth) {
        nodes.push_back(i);
        top.push_back(stencil_derivative(g, d, 0, i, 0));
      }
    }
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      for (std::size_t b = a + 2; b < nodes.size(); ++b) {  // pairs at least 2h apart
        const double dist = (nodes[b] - nodes[a]) * h;
        worst = std::max(worst, std::abs(top[b] - top[a]) / std::pow(dist, beta));
      }
    }
  }
  return worst;
}

}  // namespace nlpde
