#include "nlpde/nonlocal_operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlpde/quadrature.hpp"

namespace nlpde {

namespace {

constexpr double kFarRadius = 1e3;
constexpr int kFarPanelsPerDecade = 6;
constexpr int kFarAnglePairs = 24;  // dim == 2

double power_cell_integral_1d(double sigma, double a, double b) {
  // (2-s) int_a^b y^{-1-s} dy, 0 < a < b
  return (2.0 - sigma) / sigma * (std::pow(a, -sigma) - std::pow(b, -sigma));
}

double power_cell_integral_2d(double sigma, double cx, double cy, double h) {
  const auto f = [&](double y0) {
    return gauss_legendre_16(
        [&](double y1) { return std::pow(y0 * y0 + y1 * y1, -(2.0 + sigma) / 2.0); },
        cy - h / 2, cy + h / 2);
  };
  return (2.0 - sigma) * gauss_legendre_16(f, cx - h / 2, cx + h / 2);
}

double central_moment(int dim, double sigma, double h) {
  if (dim == 1) return 2.0 * std::pow(h / 2.0, 2.0 - sigma);
  // int over the square cell of |y|^2 (2-s)|y|^{-2-s} dy in polar coordinates:
  // the angular radius of the square is R(th) = (h/2)/max(|cos|,|sin|).
  const int m = 256;
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * M_PI * (k + 0.5) / m;
    const double r = (h / 2.0) / std::max(std::abs(std::cos(th)), std::abs(std::sin(th)));
    acc += std::pow(r, 2.0 - sigma);
  }
  return acc * (2.0 * M_PI / m);
}

double kernel_modulation_at_outer(const KernelSpec& k, const Point& x, double t, double radius) {
  if (k.separable_modulation) return k.separable_modulation(x, t);
  if (k.dim == 1) {
    return 0.5 * (k.modulation(x, point1(radius), t) + k.modulation(x, point1(-radius), t));
  }
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double th = 2.0 * M_PI * (i + 0.5) / 8;
    acc += k.modulation(x, point2(radius * std::cos(th), radius * std::sin(th)), t);
  }
  return acc / 8.0;
}

/// Mean of u(x+y)+u(x-y) beyond the outer radius, per exterior rule.
double far_pair_mean(const GridFunction& u, const Point& x, double radius) {
  switch (u.exterior().kind) {
    case ExteriorKind::Zero:
      return 0.0;
    case ExteriorKind::Constant:
      return 2.0 * u.exterior().constant;
    case ExteriorKind::Periodic: {
      const int n = u.nodes_per_axis() - 1;
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += u.at(i);
      return 2.0 * s / n;
    }
    case ExteriorKind::Callable: {
      const auto& g = u.exterior().fn;
      const double t = u.time();
      if (u.dim() == 1) return g(x + point1(radius), t) + g(x - point1(radius), t);
      double acc = 0.0;
      for (int i = 0; i < 4; ++i) {
        const double th = 2.0 * M_PI * (i + 0.5) / 4;
        const Point d = point2(radius * std::cos(th), radius * std::sin(th));
        acc += g(x + d, t) + g(x - d, t);
      }
      return acc / 4.0;
    }
  }
  return 0.0;
}

void check_match(const GridFunction& u, const QuadratureTable& q) {
  const bool per = u.exterior().kind == ExteriorKind::Periodic;
  if (u.dim() != q.dim || per != q.periodic ||
      std::abs(u.spacing() - q.h) > 1e-12 * q.h ||
      std::abs(u.box_halfwidth() - q.box_halfwidth) > 1e-12 * q.box_halfwidth) {
    throw std::invalid_argument("quadrature table does not match the grid it is applied to");
  }
}

}  // namespace

double QuadratureTable::second_moment_within_unit_ball() const {
  double acc = 0.0;
  const auto y_of = [&](const Coupling& c) {
    return std::hypot(c.j0 * h, c.j1 * h);
  };
  for (const auto& c : lattice) {
    const double r = y_of(c);
    if (r <= 1.0) acc += c.power_weight * r * r;
  }
  for (std::size_t c = 1; c < folded.size(); ++c) {
    const double r = static_cast<double>(c) * h;
    if (r <= 1.0) acc += folded[c] * r * r;
  }
  return acc;
}

QuadratureTable build_quadrature_table(int dim, double box_halfwidth, double h, double sigma,
                                       bool periodic) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("quadrature table: dim must be 1 or 2");
  if (!(sigma > 0.0 && sigma < 2.0)) {
    throw std::invalid_argument("quadrature table: sigma must be in (0,2)");
  }
  if (periodic && dim == 2) {
    throw std::invalid_argument("quadrature table: periodic exterior is 1d only");
  }
  const double m_exact = 2.0 * box_halfwidth / h;
  const int n = static_cast<int>(std::round(m_exact));
  if (std::abs(m_exact - n) > 1e-9 * std::max(1.0, m_exact)) {
    throw std::invalid_argument("quadrature table: 2*box/h must be an integer");
  }

  QuadratureTable q;
  q.dim = dim;
  q.sigma = sigma;
  q.h = h;
  q.box_halfwidth = box_halfwidth;
  q.periodic = periodic;
  q.central_moment = central_moment(dim, sigma, h);

  if (periodic) {
    // Image-summed weights per wrapped offset class; offsets J and N-J couple
    // the same node pair. The fold radius is generous because the remainder's
    // mean-coupling model misses oscillations of order R^{-1-sigma}.
    const int j_max = static_cast<int>(std::ceil(std::max(6e3, 8.0 * box_halfwidth) / h));
    q.folded.assign(static_cast<std::size_t>(n / 2) + 1, 0.0);
    for (int jj = 1; jj <= j_max; ++jj) {
      const int c = jj % n;
      if (c == 0) continue;  // couples a node to itself: second difference vanishes
      const int c_eff = std::min(c, n - c);
      q.folded[static_cast<std::size_t>(c_eff)] +=
          power_cell_integral_1d(sigma, jj * h - h / 2, jj * h + h / 2) * 2.0;
    }
    q.folded[1] += q.central_moment / (h * h);
    q.outer_radius = (j_max + 0.5) * h;
    q.remainder_weight = (2.0 - sigma) * 2.0 * std::pow(q.outer_radius, -sigma) / sigma;
    return q;
  }

  const double square_half = (n + 0.5) * h;  // lattice cells tile [-S, S]^dim exactly
  if (dim == 1) {
    q.lattice.reserve(static_cast<std::size_t>(n));
    for (int jj = 1; jj <= n; ++jj) {
      q.lattice.push_back({jj, 0,
                           2.0 * power_cell_integral_1d(sigma, jj * h - h / 2, jj * h + h / 2)});
    }
    q.lattice[0].power_weight += q.central_moment / (h * h);
  } else {
    // Half-plane of offsets; each entry stands for the pair +-j.
    for (int j0 = 0; j0 <= n; ++j0) {
      for (int j1 = (j0 == 0 ? 1 : -n); j1 <= n; ++j1) {
        const double w = 2.0 * power_cell_integral_2d(sigma, j0 * h, j1 * h, h);
        q.lattice.push_back({j0, j1, w});
      }
    }
    for (auto& c : q.lattice) {
      if ((c.j0 == 1 && c.j1 == 0) || (c.j0 == 0 && c.j1 == 1)) {
        c.power_weight += q.central_moment / (2.0 * h * h);
      }
    }
  }

  // Far field: radial GL panels from the lattice square out to kFarRadius,
  // lower radial limit depending on the angle so the square seam is exact.
  q.outer_radius = kFarRadius;
  const auto add_far_ray = [&](const Point& dir, double ang_measure, double r_lo) {
    const double decades = std::log10(q.outer_radius / r_lo);
    const int n_panels =
        std::max(1, static_cast<int>(std::ceil(decades * kFarPanelsPerDecade)));
    for (int pnl = 0; pnl < n_panels; ++pnl) {
      const double a = r_lo * std::pow(q.outer_radius / r_lo, double(pnl) / n_panels);
      const double b = r_lo * std::pow(q.outer_radius / r_lo, double(pnl + 1) / n_panels);
      // 16-point GL on [a,b] in the radial variable.
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      static const double nodes[8] = {0.0950125098376374, 0.2816035507792589,
                                      0.4580167776572274, 0.6178762444026437,
                                      0.7554044083550030, 0.8656312023878317,
                                      0.9445750230732326, 0.9894009349916499};
      static const double weights[8] = {0.1894506104550685, 0.1826034150449236,
                                        0.1691565193950025, 0.1495959888165767,
                                        0.1246289712555339, 0.0951585116824928,
                                        0.0622535239386479, 0.0271524594117541};
      for (int g = 0; g < 8; ++g) {
        for (int sgn = -1; sgn <= 1; sgn += 2) {
          const double rho = mid + sgn * half * nodes[g];
          const double pw = weights[g] * half * ang_measure * std::pow(rho, dim - 1) *
                            (2.0 - sigma) * std::pow(rho, -(dim + sigma));
          q.far.push_back({dir * rho, pw});
        }
      }
    }
  };
  if (dim == 1) {
    add_far_ray(point1(1.0), 2.0, square_half);  // measure 2: both rays in one pair
  } else {
    for (int k = 0; k < kFarAnglePairs; ++k) {
      const double th = M_PI * (k + 0.5) / kFarAnglePairs;
      const Point dir = point2(std::cos(th), std::sin(th));
      const double r_lo = square_half / std::max(std::abs(dir[0]), std::abs(dir[1]));
      add_far_ray(dir, 2.0 * M_PI / kFarAnglePairs, r_lo);
    }
  }
  q.remainder_weight =
      (2.0 - sigma) * sphere_measure(dim) * std::pow(q.outer_radius, -sigma) / sigma;
  return q;
}

QuadratureTable build_quadrature_table(const GridFunction& geometry, double sigma) {
  return build_quadrature_table(geometry.dim(), geometry.box_halfwidth(), geometry.spacing(),
                                sigma, geometry.exterior().kind == ExteriorKind::Periodic);
}

double second_difference(const GridFunction& u, int i, int j, int off0, int off1) {
  return u.value_lattice(i + off0, j + off1) + u.value_lattice(i - off0, j - off1) -
         2.0 * u.at(i, j);
}

double apply_L(const GridFunction& u, const KernelSpec& k, int i, int j, double t,
               const QuadratureTable& q) {
  check_match(u, q);
  if (std::abs(k.sigma - q.sigma) > 1e-12 || k.dim != q.dim) {
    throw std::invalid_argument("quadrature table was built for a different kernel order");
  }
  const Point x = u.node(i, j);
  const double ux = u.at(i, j);
  const bool separable = static_cast<bool>(k.separable_modulation);
  const double row_mod = separable ? k.separable_modulation(x, t) : 0.0;

  double acc = 0.0;
  for (const auto& c : q.lattice) {
    const double delta = u.value_lattice(i + c.j0, j + c.j1) +
                         u.value_lattice(i - c.j0, j - c.j1) - 2.0 * ux;
    const double mod =
        separable ? row_mod : k.modulation(x, point2(c.j0 * q.h, c.j1 * q.h), t);
    acc += c.power_weight * mod * delta;
  }
  for (std::size_t c = 1; c < q.folded.size(); ++c) {
    if (q.folded[c] == 0.0) continue;
    const int off = static_cast<int>(c);
    const double delta =
        u.value_lattice(i + off, j) + u.value_lattice(i - off, j) - 2.0 * ux;
    const double mod = separable ? row_mod : k.modulation(x, point1(off * q.h), t);
    acc += q.folded[c] * mod * delta;
  }
  for (const auto& f : q.far) {
    const double delta = u.interp(x + f.y) + u.interp(x - f.y) - 2.0 * ux;
    const double mod = separable ? row_mod : k.modulation(x, f.y, t);
    acc += f.power_weight * mod * delta;
  }
  const double delta_bar = far_pair_mean(u, x, q.outer_radius) - 2.0 * ux;
  acc += q.remainder_weight * kernel_modulation_at_outer(k, x, t, q.outer_radius) * delta_bar;
  return acc;
}

double pucci(const GridFunction& u, Extremal sign, double sigma, double lambda_lo,
             double lambda_hi, int i, int j, const QuadratureTable& q) {
  check_match(u, q);
  if (std::abs(sigma - q.sigma) > 1e-12) {
    throw std::invalid_argument("quadrature table was built for a different order");
  }
  const double lo = sign == Extremal::Minus ? lambda_lo : lambda_hi;
  const double hi = sign == Extremal::Minus ? lambda_hi : lambda_lo;
  const auto split = [lo, hi](double delta) {
    return delta >= 0.0 ? lo * delta : hi * delta;
  };
  const Point x = u.node(i, j);
  const double ux = u.at(i, j);
  double acc = 0.0;
  for (const auto& c : q.lattice) {
    acc += c.power_weight * split(u.value_lattice(i + c.j0, j + c.j1) +
                                  u.value_lattice(i - c.j0, j - c.j1) - 2.0 * ux);
  }
  for (std::size_t c = 1; c < q.folded.size(); ++c) {
    if (q.folded[c] == 0.0) continue;
    const int off = static_cast<int>(c);
    acc += q.folded[c] *
           split(u.value_lattice(i + off, j) + u.value_lattice(i - off, j) - 2.0 * ux);
  }
  for (const auto& f : q.far) {
    acc += f.power_weight * split(u.interp(x + f.y) + u.interp(x - f.y) - 2.0 * ux);
  }
  acc += q.remainder_weight * split(far_pair_mean(u, x, q.outer_radius) - 2.0 * ux);
  return acc;
}

ProbeSet ProbeSet::default_cosines(int dim) {
  ProbeSet set;
  const double freqs[] = {0.6, 1.0, 1.4};
  const double phases[] = {0.0, M_PI / 2};
  for (double f : freqs) {
    for (double ph : phases) {
      // |u| <= 1 and the B_1 Taylor remainder is bounded by f^2 |y|^2 / 2 <= |y|^2.
      set.probes.push_back(
          {[f, ph, dim](const Point& z) {
             return std::cos(f * z[0] + 0.37 * f * (dim == 2 ? z[1] : 0.0) + ph);
           },
           1.0});
    }
  }
  return set;
}

StarNormResult star_norm_distance(const KernelSpec& k1, const KernelSpec& k0,
                                  const SpaceTimeBox& region, const ProbeSet& probes) {
  if (k1.dim != k0.dim || std::abs(k1.sigma - k0.sigma) > 1e-12) {
    throw std::invalid_argument("star_norm_distance: kernels must share dim and sigma");
  }
  if (probes.probes.empty()) {
    throw std::invalid_argument("star_norm_distance: probe set must not be empty");
  }
  const int dim = k1.dim;
  StarNormResult out;
  const int ns = std::max(1, region.space_samples);
  const int nt = std::max(1, region.time_samples);
  std::vector<Point> xs;
  if (dim == 1) {
    for (int i = 0; i < ns; ++i) {
      xs.push_back(point1(ns == 1 ? 0.0 : -region.radius + 2.0 * region.radius * i / (ns - 1)));
    }
  } else {
    for (int i = 0; i < ns; ++i) {
      for (int j = 0; j < ns; ++j) {
        const double a = ns == 1 ? 0.0 : -region.radius + 2.0 * region.radius * i / (ns - 1);
        const double b = ns == 1 ? 0.0 : -region.radius + 2.0 * region.radius * j / (ns - 1);
        xs.push_back(point2(a, b));
      }
    }
  }
  std::vector<double> ts;
  for (int i = 0; i < nt; ++i) {
    ts.push_back(nt == 1 ? region.t_max
                         : region.t_min + (region.t_max - region.t_min) * i / (nt - 1));
  }

  for (const Point& x : xs) {
    for (double t : ts) {
      auto abs_diff = [&](const Point& y) { return std::abs(k1.form(x, y, t) - k0.form(x, y, t)); };
      RadialIntegralOptions opt;
      opt.breakpoints = {1.0};
      opt.inner_slope_hint = 2.0 - dim - k1.sigma;
      opt.outer_slope_hint = -(dim + k1.sigma);
      const double surrogate = integrate_radial(
          dim,
          [&](const Point& y) {
            const double r = norm(y, dim);
            return abs_diff(y) * (r <= 1.0 ? r * r : 4.0);
          },
          opt);
      out.surrogate = std::max(out.surrogate, surrogate);

      for (const auto& pr : probes.probes) {
        RadialIntegralOptions eopt;
        eopt.breakpoints = {1.0};
        eopt.inner_slope_hint = 2.0 - dim - k1.sigma;
        eopt.outer_slope_hint = -(dim + k1.sigma);
        eopt.detect_nonintegrable = false;  // signed oscillatory integrand
        const double val = integrate_radial(
            dim,
            [&](const Point& y) {
              const double du = pr.u(x + y) + pr.u(x - y) - 2.0 * pr.u(x);
              return du * (k1.form(x, y, t) - k0.form(x, y, t));
            },
            eopt);
        out.empirical = std::max(out.empirical, std::abs(val) / (1.0 + pr.bound));
      }
    }
  }
  return out;
}

}  // namespace nlpde
