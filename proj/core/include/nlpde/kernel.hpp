#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nlpde/point.hpp"

namespace nlpde {

/// Smoothness class claimed for a kernel: L0 = symmetric + two-sided power
/// bounds, L1/L2/L3 add decaying first/second/third y-derivative envelopes.
enum class KernelClass { L0 = 0, L1 = 1, L2 = 2, L3 = 3 };

const char* to_string(KernelClass c);

using KernelFn = std::function<double(const Point& x, const Point& y, double t)>;

/// A jump kernel K(x,y;t) of order sigma with ellipticity constants
/// (lambda_lo, lambda_hi). Immutable after construction; safe to share
/// across threads.
struct KernelSpec {
  int dim = 1;
  double sigma = 1.0;
  double lambda_lo = 1.0;
  double lambda_hi = 1.0;
  KernelClass class_tag = KernelClass::L0;
  KernelFn form;
  double holder_alpha = 0.5;   // alpha of the integral Hoelder condition
  double holder_const = 0.0;   // constant multiplying (|x|^a + |t|^{a/s}) r^{2-s}
  std::string name = "custom";

  /// Set when K(x,y;t) = m(x,t) (2-sigma)|y|^{-n-sigma} exactly (the power
  /// kernel and the Hoelder-modulated family). Quadrature and assembly then
  /// evaluate the modulation once per (x,t) instead of once per offset.
  std::function<double(const Point& x, double t)> separable_modulation;

  /// True when the evaluation rule does not depend on t; lets the solver
  /// reuse one factorization across time steps.
  bool time_invariant = true;

  /// Pure power comparison density (2-sigma)|y|^{-n-sigma} with amplitude c.
  double power_envelope(double c, double abs_y) const;

  /// K(x,y;t) |y|^{n+sigma} / (2-sigma): the kernel's local amplitude
  /// relative to the unit power density.
  double modulation(const Point& x, const Point& y, double t) const;
};

/// (2-sigma) lambda |y|^{-n-sigma}; the equality case of the ellipticity
/// sandwich, exactly scale invariant.
KernelSpec make_fractional_laplacian(int dim, double sigma, double lambda, double alpha = 0.5);

/// (2-sigma)[lambda + (L-l)(y_1/|y|)^2]|y|^{-n-sigma}; direction-dependent,
/// translation invariant. Collapses to the pure power kernel in 1d.
KernelSpec make_anisotropic_mixture(int dim, double sigma, double lambda_lo, double lambda_hi,
                                    double alpha = 0.5);

struct HolderModulation {
  double scale = 0.5;          // multiplier c in g = min(1, c(|x|^a + |t|^{a/s}))
  bool time_dependent = true;  // include the |t|^{a/s} term
};

/// (2-sigma)[lambda + (L-l) g(x,t)]|y|^{-n-sigma} with g = min(1, c(|x|^a + |t|^{a/s})).
/// Exactly C^alpha at the origin in the integral sense; the constructor
/// computes the resulting integral-Hoelder constant in closed form.
KernelSpec make_holder_modulated(int dim, double sigma, double lambda_lo, double lambda_hi,
                                 double alpha, HolderModulation mod,
                                 KernelClass tag = KernelClass::L2);

KernelSpec make_custom_kernel(int dim, double sigma, double lambda_lo, double lambda_hi,
                              KernelClass tag, double alpha, double holder_const, KernelFn fn,
                              std::string name);

/// K(x,y;t). Throws std::domain_error at y = 0 (kernel singular there).
double eval_kernel(const KernelSpec& k, const Point& x, const Point& y, double t);

struct HypothesisCheck {
  std::string hypothesis;
  double worst_ratio = 0.0;  // <= 1 means the inequality held at every sample
  double tolerance = 1e-6;
  bool pass = false;
};

struct CertificationReport {
  std::string kernel_name;
  KernelClass class_tag = KernelClass::L0;
  std::vector<HypothesisCheck> checks;
  bool all_pass() const;
};

/// Sampling-based certification of the class hypotheses consistent with
/// class_tag, over a log-spaced radial grid |y| in [1e-4, 1e2] and seeded
/// random (x,t) draws from B_5 x (-5^sigma, 0]. Derivative envelopes are
/// normalized so the pure power kernel is the exact equality case of every
/// inequality; derivatives are checked by central finite differences with
/// step 1e-3 |y| (tolerance 1e-2), exact evaluations with tolerance 1e-6.
/// Sampling parallelizes over the radial grid; the report is deterministic
/// for a fixed seed regardless of thread count.
CertificationReport check_hypotheses(const KernelSpec& k, int sample_budget,
                                     std::uint64_t seed = 20240501ull, int threads = 1);

/// Integral Hoelder modulus: int |K(x,y;t) - K(0,y;0)| min(|y|^2, r^2) dy,
/// adaptive radial panels with analytic power-law ends. Requires r in (0, 1].
double holder_integral(const KernelSpec& k, const Point& x, double t, double r);

/// The kernel (x,y,t) -> r^{n+sigma} K(rx, ry; r^sigma t). Preserves class and
/// ellipticity; the integral-Hoelder constant contracts by r^alpha.
KernelSpec rescale_kernel(const KernelSpec& k, double r);

/// The translation-invariant kernel y -> K(0,y;0).
KernelSpec freeze_kernel(const KernelSpec& k);

}  // namespace nlpde
