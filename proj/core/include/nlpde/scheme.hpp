#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlpde/fit.hpp"
#include "nlpde/kernel.hpp"
#include "nlpde/solver.hpp"

namespace nlpde {

/// Raised when a scale index outruns the resolution of the stored base
/// solution.
struct ScaleExhaustedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemeConfig {
  double rho = 0.2;        // scale factor between consecutive cylinders
  int i_max = 3;           // corrections are built for i = 0..i_max
  double base_radius = 4.0;  // each scale solves on B_4 x (-4^sigma, 0] in unit coordinates
  double tau = 0.5;          // interior margin for derivative readouts
  double derivative_step = 0.0;  // 0 selects 4 * scale_h
  double scale_h = 1.0 / 64;     // grid spacing of the rescaled unit solves
  double scale_dt = 0.0;         // 0 selects the solver default
  int threads = 1;
};

/// One frozen-coefficient correction, stored in rescaled unit coordinates:
/// w_i(z,s) = amplitude * v(z/scale, s/scale^sigma).
struct CorrectionTerm {
  int scale_index = 0;
  double scale = 1.0;      // rho^i
  double amplitude = 1.0;  // rho^{(sigma+alpha) i}
  SpaceTimeSolution v;
  // Origin jet of w_i in physical coordinates.
  double value = 0.0;
  std::array<double, 2> gradient{0.0, 0.0};
  std::array<double, 3> hessian{0.0, 0.0, 0.0};  // xx, xy, yy
  double sup_norm = 0.0;  // sup |w_i| over its cylinder

  double eval(const Point& z, double s) const;
};

/// The field u - sum of stored corrections, evaluated by interpolating the
/// base solution (cubic in space, linear in time) and subtracting the
/// corrections. Once i corrections are pushed the residual vanishes outside
/// B_{R rho^i} and at times before -(R rho^i)^sigma by construction, and the
/// evaluator returns exactly zero there.
class ResidualField {
 public:
  ResidualField(const SpaceTimeSolution& base, double sigma, double rho, double base_radius);

  double operator()(const Point& z, double s) const;
  void push(const CorrectionTerm* term);

  double zero_radius() const { return zero_radius_; }
  double zero_time() const { return zero_time_; }
  int corrections() const { return static_cast<int>(terms_.size()); }

 private:
  const SpaceTimeSolution* base_;
  std::vector<const CorrectionTerm*> terms_;
  int dim_;
  double sigma_;
  double rho_;
  double base_radius_;
  double zero_radius_;
  double zero_time_;
};

struct CorrectionSequence {
  double sigma = 0.0;
  double alpha = 0.0;
  double rho = 0.2;
  std::vector<CorrectionTerm> terms;
  std::vector<double> residual_norms;  // e_i, sup of the residual over the scale-i cylinder
  std::string notes;
};

/// Taylor polynomial at the origin assembled from the correction jets.
struct TaylorExpansion {
  int dim = 1;
  int degree = 0;
  double value = 0.0;
  std::array<double, 2> gradient{0.0, 0.0};
  std::array<double, 3> hessian{0.0, 0.0, 0.0};
  std::array<double, 3> truncation_bound{0.0, 0.0, 0.0};  // geometric tail per order
  std::string warning;

  double eval(const Point& x) const;
};

/// Solves, in rescaled unit coordinates on B_R x (-R^sigma, 0], the
/// frozen-coefficient problem whose exterior/initial data is the rescaled
/// residual; i = 0 carries the constant right-hand side f(0,0), later
/// increments are homogeneous.
CorrectionTerm build_correction(int i, const ResidualField& resid, const KernelSpec& k,
                                double f00, const SchemeConfig& cfg);

/// Runs the inductive construction for i = 0..i_max against a solved base
/// problem: freeze + rescale the kernel, solve the correction, record origin
/// jets and residual norms. 1d only at desk scale.
CorrectionSequence run_scheme(const SpaceTimeSolution& u, const CauchyExteriorProblem& p,
                              const SchemeConfig& cfg);

/// Sums the correction jets into the polynomial of degree [sigma+alpha];
/// warns when sigma+alpha is within 0.05 of an integer.
TaylorExpansion taylor_at_origin(const CorrectionSequence& seq, double sigma, double alpha);

/// Least squares of log e_i against i log(1/rho). Requires >= 3 positive
/// entries; returns the decay exponent (positive for decaying input), the
/// amplitude, and the max fit residual.
ExponentFit fit_decay_rate(const std::vector<double>& errors, double rho);

}  // namespace nlpde
