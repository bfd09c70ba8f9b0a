#pragma once

#include <vector>

#include "nlpde/fit.hpp"
#include "nlpde/grid.hpp"
#include "nlpde/kernel.hpp"
#include "nlpde/scheme.hpp"
#include "nlpde/solver.hpp"

namespace nlpde {

/// Default geometric abscissa list: `count` points from `largest` with ratio
/// 1/2, capped below at `floor_value`.
std::vector<double> geometric_abscissae(double largest, int count, double floor_value);

/// Pointwise spatial modulus at the origin: for each radius r the annular max
/// m(r) = max over nodes with |x| in [r/sqrt(2), r] of |u(x) - P(x)|, fitted
/// as a power law in r. Radii below 4h are rejected; radii with m(r) = 0 are
/// dropped and noted.
ExponentFit pointwise_spatial_exponent(const GridFunction& u, const TaylorExpansion& P,
                                       const std::vector<double>& radii);

/// Time modulus of the j-th spatial derivative at the origin:
/// |D^j u(0,t) - D^j u(0,0)| against |t|, with D^j computed per slice by
/// 5-point (4th order) central stencils. Passing the kernel flags requests
/// the estimate does not cover (j = 2 below class L3).
ExponentFit time_modulus(const SpaceTimeSolution& u, int derivative_order,
                         const std::vector<double>& times, const KernelSpec* kernel = nullptr);

/// Worst Hoelder quotient of the top derivative over node pairs in the
/// window, sup over stored slices with time in [t_min, t_max]:
/// |D^d u(x) - D^d u(x')| / |x - x'|^{order - d} with d = [order].
double uniform_spatial_norm(const SpaceTimeSolution& u, double order, double window_halfwidth,
                            double t_min = -1.0, double t_max = 0.0);

}  // namespace nlpde
