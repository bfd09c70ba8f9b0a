#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "nlpde/grid.hpp"
#include "nlpde/kernel.hpp"
#include "nlpde/nonlocal_operator.hpp"

namespace nlpde {

/// Cauchy problem with data prescribed on the complement of the solve ball
/// and on the initial slice: u_t - Lu = f in B_r x (t_start, t_end], u = g
/// outside. A periodic exterior turns it into a pure initial-value problem on
/// one period cell (1d).
struct CauchyExteriorProblem {
  KernelSpec kernel;
  std::function<double(const Point&, double)> rhs;  // f(x,t)
  double rhs_bound = 0.0;                           // declared bound M_f
  double domain_radius = 1.0;
  double t_start = -1.0;
  double t_end = 0.0;
  ExteriorRule exterior;
  /// Data on the initial slice; defaults to the exterior rule at t_start.
  /// Required for periodic problems.
  std::function<double(const Point&)> initial;
};

struct StorePolicy {
  int stride = 1;  // keep every stride-th slice
  double fine_window = std::numeric_limits<double>::infinity();  // keep all slices this close to t_end
};

struct SolveOptions {
  double h = 0.1;
  double dt = 0.0;             // <= 0 selects h^{min(sigma,1)}
  double box_halfwidth = 0.0;  // <= 0 selects domain_radius
  StorePolicy store;
  /// Data (rhs and exterior values) treated as time-invariant: the data
  /// vector is assembled once. The system matrix is reused whenever the
  /// kernel itself is time-invariant.
  bool static_data = false;
  int threads = 1;
};

/// Stored time slices of a solve; possibly strided away from t_end per the
/// store policy. Evaluation is cubic in space and linear in time between
/// stored slices.
struct SpaceTimeSolution {
  std::vector<double> times;
  std::vector<GridFunction> slices;
  double dt_marched = 0.0;
  double sigma = 0.0;
  std::uint64_t problem_hash = 0;

  double value(const Point& p, double t) const;
  const GridFunction& final_slice() const { return slices.back(); }
  /// Index of the last stored slice with time <= t (clamped).
  std::size_t slice_index_at(double t) const;
  bool fully_stored() const;
};

/// Implicit Euler with the monotone quadrature-table discretization of L;
/// each step solves (I - dt A(t_{k+1})) u_{k+1} = u_k + dt f(., t_{k+1}) on
/// the interior unknowns by dense LU, with exterior data folded into the
/// right-hand side. Off-diagonal weights are nonnegative, so the step map is
/// inverse-positive and the discrete comparison principle holds exactly.
SpaceTimeSolution solve(const CauchyExteriorProblem& p, const SolveOptions& opts);

struct ComparisonReport {
  double max_violation = 0.0;  // max over nodes/times of (u1 - u2)^+
  bool ordered = false;
};

/// Solves both problems on the shared grid and verifies u1 <= u2 everywhere.
/// Requires f1 <= f2 and g1 <= g2 (checked on samples; violation throws).
ComparisonReport compare(const CauchyExteriorProblem& p1, const CauchyExteriorProblem& p2,
                         const SolveOptions& opts);

struct ResidualReport {
  double max_abs = 0.0;
  std::vector<double> per_node_max;  // interior unknowns only
};

/// Backward-difference residual u_t - Lu - f of a fully stored solution,
/// recomputed through apply_L on the same quadrature table the solve used.
ResidualReport steady_residual(const SpaceTimeSolution& u, const CauchyExteriorProblem& p);

/// Compact binary snapshot: header (n: int32, h, R_box, dt: doubles,
/// count: int64), then per stored slice its time followed by the raw nodal
/// values. Exterior rules are not serialized; the loader reattaches one.
void save_snapshot(const SpaceTimeSolution& u, const std::string& path);
SpaceTimeSolution load_snapshot(const std::string& path, double sigma,
                                ExteriorRule exterior);

}  // namespace nlpde
