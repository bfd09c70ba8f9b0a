#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "nlpde/point.hpp"

namespace nlpde {

/// Raised when a tail estimate does not converge (integrand decaying too
/// slowly at infinity, or blowing up too fast at the origin).
struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 16-point Gauss-Legendre on [a, b].
double gauss_legendre_16(const std::function<double(double)>& f, double a, double b);

/// Integral over [a, b] on log-spaced panels (panels_per_decade per decade),
/// with additional panel splits at the given breakpoints.
double integrate_log_panels(const std::function<double(double)>& f, double a, double b,
                            int panels_per_decade, const std::vector<double>& breakpoints = {});

struct RadialIntegralOptions {
  double inner_radius = 1e-4;
  double outer_radius = 1e3;
  int panels_per_decade = 3;
  int angular_points = 48;            // dim == 2 only
  std::vector<double> breakpoints;    // kinks of the integrand in |y|
  // Known power-law orders of the integrand at the two ends, F ~ A|y|^slope.
  // NaN means "fit the slope from two samples". Supplying the exact order
  // makes the end corrections exact for power-law integrands.
  double inner_slope_hint = nan_hint();
  double outer_slope_hint = nan_hint();
  // Raise IntegrationError when the measured end order is non-integrable
  // even if a hint was supplied. Disable for signed oscillatory integrands,
  // whose sampled log-slope is meaningless.
  bool detect_nonintegrable = true;
  static double nan_hint();
};

/// ∫_{R^n} F(y) dy for integrands with power-law behavior at 0 and infinity.
/// The bulk [inner_radius, outer_radius] is done by panel quadrature (radial
/// Gauss-Legendre times, in 2d, a trapezoid rule over angles); the two ends
/// are closed analytically from a power-law model fitted (or hinted) at the
/// cut radii. Throws IntegrationError when an end model is non-integrable.
double integrate_radial(int dim, const std::function<double(const Point&)>& F,
                        const RadialIntegralOptions& opt);

}  // namespace nlpde
