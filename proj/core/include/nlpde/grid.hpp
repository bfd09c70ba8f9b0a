#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlpde/point.hpp"

namespace nlpde {

enum class ExteriorKind { Zero, Constant, Periodic, Callable };

/// Rule standing in for function values on all of R^n outside the grid box.
struct ExteriorRule {
  ExteriorKind kind = ExteriorKind::Zero;
  double constant = 0.0;
  std::function<double(const Point&, double t)> fn;

  static ExteriorRule zero() { return {}; }
  static ExteriorRule constant_value(double c) { return {ExteriorKind::Constant, c, nullptr}; }
  static ExteriorRule periodic() { return {ExteriorKind::Periodic, 0.0, nullptr}; }
  static ExteriorRule callable(std::function<double(const Point&, double)> g) {
    return {ExteriorKind::Callable, 0.0, std::move(g)};
  }
};

/// A function sampled on the uniform grid of [-R, R]^n with spacing h
/// (2R/h must be an integer, nodes at -R + i h) plus an exterior rule giving
/// values on the rest of R^n. One time slice; `time` is carried as metadata
/// so callable exterior rules can be evaluated consistently.
class GridFunction {
 public:
  GridFunction(int dim, double box_halfwidth, double h, ExteriorRule exterior,
               double time = 0.0);

  static GridFunction sample(int dim, double box_halfwidth, double h, ExteriorRule exterior,
                             const std::function<double(const Point&)>& f, double time = 0.0);

  int dim() const { return dim_; }
  double box_halfwidth() const { return box_; }
  double spacing() const { return h_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }
  const ExteriorRule& exterior() const { return ext_; }

  int nodes_per_axis() const { return n_ + 1; }
  std::size_t size() const { return values_.size(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  Point node(int i, int j = 0) const;
  double& at(int i, int j = 0);
  double at(int i, int j = 0) const;

  /// Value at any integer lattice index, applying the exterior rule (or the
  /// periodic wrap) outside [0, N]^n.
  double value_lattice(int i, int j = 0) const;

  /// Value at an arbitrary point: exterior rule outside the box, tensor cubic
  /// Lagrange interpolation of nodal values inside (periodic wrap when the
  /// rule is periodic).
  double interp(const Point& p) const;

  double max_abs() const;
  bool all_finite() const;

 private:
  int dim_;
  double box_;
  double h_;
  int n_;  // nodes per axis minus one; node i at -R + i h, i in [0, n_]
  ExteriorRule ext_;
  double time_;
  std::vector<double> values_;
};

}  // namespace nlpde
