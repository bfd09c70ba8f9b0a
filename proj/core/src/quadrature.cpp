#include "nlpde/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace nlpde {

namespace {

// Abscissae/weights for 16-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

double angular_average_times_measure(int dim, const std::function<double(const Point&)>& F,
                                     double rho, int angular_points) {
  if (dim == 1) {
    return F(point1(rho)) + F(point1(-rho));
  }
  // Trapezoid rule on the circle; spectral accuracy for smooth angular parts.
  double sum = 0.0;
  const int m = angular_points;
  for (int k = 0; k < m; ++k) {
    const double theta = 2.0 * M_PI * (static_cast<double>(k) + 0.5) / m;
    sum += F(point2(rho * std::cos(theta), rho * std::sin(theta)));
  }
  return sum * (2.0 * M_PI / m);
}

// Power-law end correction: integral of G(rho)*rho^{dim-1} over (0, r] or
// [r, inf) under the model G ~ A rho^{slope}. The local order is always
// measured for the integrability check, even when a hint supplies the model
// order. Returns 0 for vanishing G.
double end_model(int dim, const std::function<double(double)>& G, double r, double slope_hint,
                 bool inner, bool detect) {
  const double g = G(r);
  if (g == 0.0) return 0.0;
  const double r2 = inner ? 1.5 * r : r / 1.5;
  const double g2 = G(r2);
  double measured = std::numeric_limits<double>::quiet_NaN();
  if ((g > 0.0) == (g2 > 0.0) && g2 != 0.0) {
    measured = std::log(g2 / g) / std::log(r2 / r);
  }
  if (detect && !std::isnan(measured)) {
    const double p_meas = measured + dim;
    if (inner && p_meas < 0.02) {
      throw IntegrationError("integrand not integrable at the origin (order " +
                             std::to_string(measured) + ")");
    }
    if (!inner && p_meas > -0.02) {
      throw IntegrationError("tail estimate does not converge (order " +
                             std::to_string(measured) + ")");
    }
  }
  const double slope = std::isnan(slope_hint) ? measured : slope_hint;
  if (std::isnan(slope)) return 0.0;  // sign change at the probe: nothing to model
  const double p = slope + dim;  // G*rho^{dim-1} ~ A rho^{p-1}
  if (inner) {
    if (p < 0.02) {
      throw IntegrationError("integrand not integrable at the origin (order " +
                             std::to_string(slope) + ")");
    }
    return g * std::pow(r, dim) / p;  // A r^p / p with A = g r^{-slope}
  }
  if (p > -0.02) {
    throw IntegrationError("tail estimate does not converge (order " + std::to_string(slope) +
                           ")");
  }
  return g * std::pow(r, dim) / (-p);
}

}  // namespace

double RadialIntegralOptions::nan_hint() { return std::numeric_limits<double>::quiet_NaN(); }

double gauss_legendre_16(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
    sum += kGlWeights[i] * (f(mid + half * kGlNodes[i]) + f(mid - half * kGlNodes[i]));
  }
  return sum * half;
}

double integrate_log_panels(const std::function<double(double)>& f, double a, double b,
                            int panels_per_decade, const std::vector<double>& breakpoints) {
  if (!(a > 0.0) || !(b > a)) throw std::invalid_argument("integrate_log_panels: need 0 < a < b");
  std::vector<double> edges;
  const double decades = std::log10(b / a);
  const int n_panels = std::max(1, static_cast<int>(std::ceil(decades * panels_per_decade)));
  edges.reserve(static_cast<std::size_t>(n_panels) + breakpoints.size() + 1);
  for (int i = 0; i <= n_panels; ++i) {
    edges.push_back(a * std::pow(b / a, static_cast<double>(i) / n_panels));
  }
  for (double br : breakpoints) {
    if (br > a * (1 + 1e-14) && br < b * (1 - 1e-14)) edges.push_back(br);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double x, double y) { return std::abs(x - y) <= 1e-14 * y; }),
              edges.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    total += gauss_legendre_16(f, edges[i], edges[i + 1]);
  }
  return total;
}

double integrate_radial(int dim, const std::function<double(const Point&)>& F,
                        const RadialIntegralOptions& opt) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("integrate_radial: dim must be 1 or 2");
  const auto G = [&](double rho) {
    return angular_average_times_measure(dim, F, rho, opt.angular_points);
  };
  const auto radial_integrand = [&](double rho) {
    return G(rho) * std::pow(rho, dim - 1);
  };
  double total = integrate_log_panels(radial_integrand, opt.inner_radius, opt.outer_radius,
                                      opt.panels_per_decade, opt.breakpoints);
  total += end_model(dim, G, opt.inner_radius, opt.inner_slope_hint, /*inner=*/true,
                     opt.detect_nonintegrable);
  total += end_model(dim, G, opt.outer_radius, opt.outer_slope_hint, /*inner=*/false,
                     opt.detect_nonintegrable);
  return total;
}

}  // namespace nlpde
