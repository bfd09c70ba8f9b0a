#pragma once

#include <functional>
#include <vector>

#include "nlpde/grid.hpp"
#include "nlpde/kernel.hpp"
#include "nlpde/point.hpp"

namespace nlpde {

/// Discrete skeleton of the nonlocal operator for one grid geometry:
/// exact cell integrals of the unit power density (2-sigma)|y|^{-n-sigma}
/// over the offset lattice, the singular-cell second moment folded onto the
/// nearest neighbors, a radial Gauss-Legendre far field beyond the lattice
/// square, and an analytic power-law remainder past outer_radius. The
/// skeleton is kernel-independent; apply time multiplies each weight by the
/// kernel's local modulation, so one table serves every kernel of matching
/// (dim, sigma) and every (x,t). All weights are nonnegative: the scheme is
/// monotone by construction.
struct QuadratureTable {
  int dim = 1;
  double sigma = 1.0;
  double h = 0.0;
  double box_halfwidth = 0.0;
  bool periodic = false;

  /// Unordered offset pair +-(j0 h, j1 h); power_weight integrates the unit
  /// power density over both cells. The central-cell correction
  /// m0/(n h^2) is already folded onto the axis neighbors.
  struct Coupling {
    int j0 = 0, j1 = 0;
    double power_weight = 0.0;
  };
  std::vector<Coupling> lattice;  // half-lattice (empty for periodic tables)

  /// Periodic (1d): weight per wrapped offset class c = 1..N/2, image-summed
  /// out to image_radius.
  std::vector<double> folded;

  /// Far-field quadrature points beyond the lattice square, one entry per
  /// unordered direction pair; power_weight includes the radial and angular
  /// measures and the unit power density.
  struct FarEntry {
    Point y;
    double power_weight = 0.0;
  };
  std::vector<FarEntry> far;

  double outer_radius = 0.0;     // far entries stop here
  double remainder_weight = 0.0; // integral of the unit power density beyond outer_radius
  double central_moment = 0.0;   // m0 = int_{cell 0} |y|^2 (2-sigma)|y|^{-n-sigma} dy

  /// Sum of power_weight * |y|^2 over couplings with |y| <= 1 (the folded
  /// central mass contributes exactly m0 through the axis neighbors); tests
  /// compare it with the exact truncated second moment.
  double second_moment_within_unit_ball() const;
};

/// Geometry must describe the grid the table will be used with; periodic
/// exteriors get image-folded weights (1d only).
QuadratureTable build_quadrature_table(int dim, double box_halfwidth, double h, double sigma,
                                       bool periodic);
QuadratureTable build_quadrature_table(const GridFunction& geometry, double sigma);

/// u(x+y) + u(x-y) - 2u(x) for a lattice offset, exterior rule applied when
/// x +- y leaves the box.
double second_difference(const GridFunction& u, int i, int j, int off0, int off1 = 0);

/// Discrete Lu(x_i, t) = sum over the skeleton of modulation * weight * delta u
/// plus the analytic remainder. For kernels with two bounded y-derivatives the
/// value converges at rate O(h^{2-sigma}).
double apply_L(const GridFunction& u, const KernelSpec& k, int i, int j, double t,
               const QuadratureTable& q);

enum class Extremal { Minus, Plus };

/// Pucci extremal operators over the class with constants (lambda_lo,
/// lambda_hi): same skeleton as apply_L with the sign-split weights
/// lambda (delta u)^+ - Lambda (delta u)^- (Minus; Plus swaps the constants).
double pucci(const GridFunction& u, Extremal sign, double sigma, double lambda_lo,
             double lambda_hi, int i, int j, const QuadratureTable& q);

struct SpaceTimeBox {
  double radius = 1.0;
  double t_min = -1.0;
  double t_max = 0.0;
  int space_samples = 5;  // per axis
  int time_samples = 3;
};

/// Test function for the weak operator norm: |u| <= bound everywhere and
/// |u(x+y) - u(x) - y . grad u(x)| <= bound |y|^2 on B_1.
struct Probe {
  std::function<double(const Point&)> u;
  double bound = 1.0;
};

struct ProbeSet {
  std::vector<Probe> probes;
  static ProbeSet default_cosines(int dim);
};

struct StarNormResult {
  double surrogate = 0.0;  // sup over region of int_{B1}|y|^2|K1-K0| + 4 int_{B1^c}|K1-K0|
  double empirical = 0.0;  // sup over region and probes of |L1 u - L0 u| / (1 + bound)
};

/// Distance between two operators in the weak norm: the integral surrogate
/// (the majorization the norm is bounded by) and the empirical sup over the
/// probe family. The empirical value cannot exceed the surrogate beyond
/// quadrature tolerance.
StarNormResult star_norm_distance(const KernelSpec& k1, const KernelSpec& k0,
                                  const SpaceTimeBox& region, const ProbeSet& probes);

}  // namespace nlpde
